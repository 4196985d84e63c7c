// Copyright 2026 The coalition-attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/schema.hpp"

namespace coalition_attrib {

// DAG over the schema's features. Edges point parent -> child.
class CausalGraph {
 public:
  CausalGraph(const FeatureSchema& schema, const std::vector<std::string>& nodes,
              const std::vector<std::pair<std::string, std::string>>& edges)
      : names_(schema.names()), parents_(schema.size()), children_(schema.size()) {
    std::set<std::string> node_set(nodes.begin(), nodes.end());
    if (node_set.size() != nodes.size()) {
      throw GraphSchemaMismatch("graph lists a node more than once");
    }
    for (const auto& n : nodes) {
      if (!schema.find(n)) throw GraphSchemaMismatch("graph node '" + n + "' is not a feature");
    }
    if (node_set.size() != schema.size()) {
      for (const auto& f : schema.features()) {
        if (!node_set.count(f.name)) {
          throw GraphSchemaMismatch("feature '" + f.name + "' is missing from the graph");
        }
      }
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [p, c] : edges) {
      if (!node_set.count(p) || !node_set.count(c)) {
        throw GraphSchemaMismatch("edge " + p + " -> " + c + " names an unknown node");
      }
      const std::size_t pi = *schema.find(p);
      const std::size_t ci = *schema.find(c);
      if (pi == ci) throw GraphSchemaMismatch("self-loop on '" + p + "'");
      if (!seen.insert({pi, ci}).second) continue;
      parents_[ci].push_back(pi);
      children_[pi].push_back(ci);
    }
    for (auto& v : parents_) std::sort(v.begin(), v.end());
    for (auto& v : children_) std::sort(v.begin(), v.end());
    topo_ = topological_sort();
  }

  // Graph without edges over the given schema.
  static CausalGraph empty(const FeatureSchema& schema) {
    return CausalGraph(schema, schema.names(), {});
  }

  // Parses {"nodes": [...], "edges": [[parent, child], ...]}.
  static CausalGraph from_json(const nlohmann::json& doc, const FeatureSchema& schema) {
    if (!doc.is_object()) throw GraphSchemaMismatch("graph must be an object");
    for (const auto& [key, value] : doc.items()) {
      (void)value;
      if (key != "nodes" && key != "edges") {
        throw GraphSchemaMismatch("unknown graph key '" + key + "'");
      }
    }
    std::vector<std::string> nodes;
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
      throw GraphSchemaMismatch("graph needs a \"nodes\" array");
    }
    for (const auto& n : doc["nodes"]) {
      if (!n.is_string()) throw GraphSchemaMismatch("graph node names must be strings");
      nodes.push_back(n.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> edges;
    if (doc.contains("edges")) {
      if (!doc["edges"].is_array()) throw GraphSchemaMismatch("\"edges\" must be an array");
      for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
          throw GraphSchemaMismatch("each edge must be a [parent, child] pair of names");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
    return CausalGraph(schema, nodes, edges);
  }

  nlohmann::json to_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t c = 0; c < parents_.size(); ++c) {
      for (std::size_t p : parents_[c]) edges.push_back({names_[p], names_[c]});
    }
    return {{"nodes", names_}, {"edges", edges}};
  }

  std::size_t size() const { return parents_.size(); }
  const std::vector<std::size_t>& parents(std::size_t j) const { return parents_[j]; }
  const std::vector<std::size_t>& children(std::size_t j) const { return children_[j]; }
  // Deterministic topological order (smallest ready index first).
  const std::vector<std::size_t>& topological_order() const { return topo_; }
  bool has_edges() const {
    return std::any_of(parents_.begin(), parents_.end(), [](const auto& p) { return !p.empty(); });
  }

  // Bitmask of the parents of j.
  std::uint64_t parent_mask(std::size_t j) const {
    std::uint64_t m = 0;
    for (std::size_t p : parents_[j]) m |= std::uint64_t{1} << p;
    return m;
  }

  std::vector<bool> ancestors_of(const std::vector<bool>& targets) const {
    std::vector<bool> out(size(), false);
    std::vector<std::size_t> stack;
    for (std::size_t j = 0; j < size(); ++j) {
      if (targets[j]) stack.push_back(j);
    }
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      for (std::size_t p : parents_[j]) {
        if (!out[p]) {
          out[p] = true;
          stack.push_back(p);
        }
      }
    }
    return out;
  }

  // True when `order` lists every node once with parents before children.
  bool is_linear_extension(const std::vector<std::size_t>& order) const {
    if (order.size() != size()) return false;
    std::vector<std::size_t> pos(size(), size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] >= size() || pos[order[i]] != size()) return false;
      pos[order[i]] = i;
    }
    for (std::size_t c = 0; c < size(); ++c) {
      for (std::size_t p : parents_[c]) {
        if (pos[p] > pos[c]) return false;
      }
    }
    return true;
  }

 private:
  std::vector<std::size_t> topological_sort() const {
    std::vector<std::size_t> indegree(size());
    for (std::size_t j = 0; j < size(); ++j) indegree[j] = parents_[j].size();
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t j = 0; j < size(); ++j) {
      if (indegree[j] == 0) ready.push(j);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
      const std::size_t j = ready.top();
      ready.pop();
      order.push_back(j);
      for (std::size_t c : children_[j]) {
        if (--indegree[c] == 0) ready.push(c);
      }
    }
    if (order.size() != size()) throw GraphSchemaMismatch("causal graph has a cycle");
    return order;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> topo_;
};

}  // namespace coalition_attrib
