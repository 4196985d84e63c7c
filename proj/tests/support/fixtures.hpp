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

// Shared fixtures and brute-force oracles for the test suites.

#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "coalition_attrib.hpp"

namespace coalition_attrib::testing {

inline std::shared_ptr<const ParametricSpec> parametric(std::vector<std::string> names,
                                                        std::vector<Law> laws) {
  return std::make_shared<const ParametricSpec>(std::move(names), std::move(laws));
}

inline std::shared_ptr<const Dataset> dataset(const FeatureSchema& schema,
                                              const std::vector<std::vector<double>>& rows,
                                              std::vector<double> weights = {}) {
  return std::make_shared<const Dataset>(Dataset::from_rows(schema, rows, std::move(weights)));
}

inline FeatureSchema binary_schema(std::vector<std::string> names) {
  std::vector<Feature> f;
  for (auto& n : names) f.push_back({n, FeatureKind::kBinary, {}});
  return FeatureSchema(std::move(f));
}

// Additive model on uniforms: f = x1 + x2 with x1 ~ U(-1, 2), x2 ~ U(0, 3).
struct UniformSumSetting {
  FeatureSchema schema = FeatureSchema::continuous({"x1", "x2"});
  ModelExpr model = parse_model("x1 + x2", schema);
  ReferenceDistribution ref = ReferenceDistribution::marginal(
      parametric({"x1", "x2"}, {UniformLaw{-1, 2}, UniformLaw{0, 3}}));
};

// Squares of centred normals: f = x1^2 + x2^2 with x1 ~ N(0, 1), x2 ~ N(0, 10^2).
struct GaussianSquaresSetting {
  FeatureSchema schema = FeatureSchema::continuous({"x1", "x2"});
  ModelExpr model = parse_model("x1^2 + x2^2", schema);
  ReferenceDistribution ref = ReferenceDistribution::marginal(
      parametric({"x1", "x2"}, {NormalLaw{0, 1}, NormalLaw{0, 10}}));
};

// Threshold-switched slope: f = 1{x1 > 1} 3 x2 - 1{x1 <= 1} x2 with x1, x2 ~ N(1, 1).
struct ThresholdSwitchSetting {
  FeatureSchema schema = FeatureSchema::continuous({"x1", "x2"});
  ModelExpr model =
      parse_model("indicator(x1 > 1) * 3 * x2 - indicator(x1 <= 1) * x2", schema);
  ReferenceDistribution ref = ReferenceDistribution::marginal(
      parametric({"x1", "x2"}, {NormalLaw{1, 1}, NormalLaw{1, 1}}));
};

// Shapley values by averaging marginal contributions over all M! orderings,
// given any value function over bitmasks. Independent of the engine's
// coalition-weight code path.
template <typename V>
std::vector<double> permutation_oracle(std::size_t m, V&& value) {
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(m, 0.0);
  std::size_t count = 0;
  do {
    std::uint64_t s = 0;
    double prev = value(s);
    for (std::size_t j : order) {
      s |= std::uint64_t{1} << j;
      const double next = value(s);
      phi[j] += next - prev;
      prev = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= static_cast<double>(count);
  return phi;
}

// Same oracle restricted to orderings that are linear extensions of `graph`.
template <typename V>
std::vector<double> ordering_oracle(const CausalGraph& graph, V&& value) {
  const std::size_t m = graph.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(m, 0.0);
  std::size_t count = 0;
  do {
    if (!graph.is_linear_extension(order)) continue;
    std::uint64_t s = 0;
    double prev = value(s);
    for (std::size_t j : order) {
      s |= std::uint64_t{1} << j;
      const double next = value(s);
      phi[j] += next - prev;
      prev = next;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& p : phi) p /= static_cast<double>(count);
  return phi;
}

}  // namespace coalition_attrib::testing
