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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "coalition_attrib/errors.hpp"

namespace coalition_attrib {

enum class FeatureKind { kContinuous, kBinary, kCategorical };

inline const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kContinuous: return "continuous";
    case FeatureKind::kBinary: return "binary";
    case FeatureKind::kCategorical: return "categorical";
  }
  return "continuous";
}

struct Feature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  // Level names for categorical features; a value is the level index.
  std::vector<std::string> levels;

  bool operator==(const Feature&) const = default;
};

// Ordered, uniquely named feature list. Feature j is identified by its
// position in the list.
class FeatureSchema {
 public:
  FeatureSchema() = default;

  explicit FeatureSchema(std::vector<Feature> features)
      : features_(std::move(features)) {
    if (features_.empty()) {
      throw InvalidArgument("a feature schema needs at least one feature");
    }
    for (std::size_t i = 0; i < features_.size(); ++i) {
      const auto& f = features_[i];
      if (f.name.empty()) throw InvalidArgument("empty feature name");
      if (!index_.emplace(f.name, i).second) {
        throw InvalidArgument("duplicate feature name '" + f.name + "'");
      }
      if (f.kind == FeatureKind::kCategorical && f.levels.empty()) {
        throw InvalidArgument("categorical feature '" + f.name +
                              "' declares no levels");
      }
    }
  }

  // Convenience: all-continuous schema from names.
  static FeatureSchema continuous(const std::vector<std::string>& names) {
    std::vector<Feature> features;
    for (const auto& n : names) features.push_back({n, FeatureKind::kContinuous, {}});
    return FeatureSchema(std::move(features));
  }

  std::size_t size() const { return features_.size(); }
  const Feature& operator[](std::size_t i) const { return features_.at(i); }
  const std::vector<Feature>& features() const { return features_; }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw UnknownFeature(std::string(name));
    return *idx;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(features_.size());
    for (const auto& f : features_) out.push_back(f.name);
    return out;
  }

  bool operator==(const FeatureSchema& other) const {
    return features_ == other.features_;
  }

 private:
  std::vector<Feature> features_;
  std::unordered_map<std::string, std::size_t> index_;
};

// A complete assignment of values to the schema's features, stored by index.
struct Instance {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> view() const { return values; }
  bool operator==(const Instance&) const = default;
};

// Builds an instance from named values. Every schema feature must be present
// and no unknown names are accepted.
inline Instance make_instance(const FeatureSchema& schema,
                              const std::map<std::string, double>& named) {
  for (const auto& [name, value] : named) {
    (void)value;
    if (!schema.find(name)) throw UnknownFeature(name);
  }
  Instance x;
  x.values.reserve(schema.size());
  for (const auto& f : schema.features()) {
    auto it = named.find(f.name);
    if (it == named.end()) throw MissingFeature(f.name);
    x.values.push_back(it->second);
  }
  return x;
}

inline void check_instance(const FeatureSchema& schema, const Instance& x) {
  if (x.size() < schema.size()) throw MissingFeature(schema[x.size()].name);
  if (x.size() > schema.size()) {
    throw InvalidArgument("instance has more values than the schema has features");
  }
}

}  // namespace coalition_attrib
