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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "coalition_attrib.hpp"
#include "fixtures.hpp"

namespace ca = coalition_attrib;
namespace ct = coalition_attrib::testing;

namespace {

const ca::FeatureSchema kXY = ca::FeatureSchema::continuous({"x1", "x2"});

// ---------------------------------------------------------------- v(S)

TEST(ValueFunction, EmptyCoalitionIsMeanOfSum) {
  ct::UniformSumSetting s;
  const auto v = ca::value_function(s.model, s.ref, ca::Instance{{0, 0}}, ca::Coalition());
  EXPECT_NEAR(v.value, 2.0, 1e-12);
  EXPECT_EQ(v.backend, "quadrature");
  EXPECT_EQ(v.standard_error, 0.0);
}

TEST(ValueFunction, FullCoalitionIsPredictionForEveryBackend) {
  ct::ThresholdSwitchSetting s;
  const ca::Instance x{{0.5, 0.5}};
  ca::BackendConfig mc;
  mc.backend = ca::Backend::kMonteCarlo;
  mc.draws = 7;
  EXPECT_EQ(ca::value_function(s.model, s.ref, x, ca::Coalition::full(2)).value, -0.5);
  EXPECT_EQ(ca::value_function(s.model, s.ref, x, ca::Coalition::full(2), mc).value, -0.5);
  ct::UniformSumSetting u;
  EXPECT_EQ(ca::value_function(u.model, u.ref, ca::Instance{{0, 0}}, ca::Coalition::full(2)).value,
            0.0);
}

TEST(ValueFunction, ThresholdSwitchWithSecondFeatureFixed) {
  // E f(X1, 0.5) = 0.5 * 1.5 - 0.5 * 0.5 with P(X1 > 1) = 1/2.
  ct::ThresholdSwitchSetting s;
  const auto v = ca::value_function(s.model, s.ref, ca::Instance{{0.5, 0.5}}, ca::Coalition::of({1}));
  EXPECT_NEAR(v.value, 0.5, 1e-12);
}

TEST(ValueFunction, ThresholdSwitchRemainingTerms) {
  ct::ThresholdSwitchSetting s;
  const ca::Instance x{{0.5, 0.5}};
  EXPECT_NEAR(ca::value_function(s.model, s.ref, x, ca::Coalition()).value, 1.0, 1e-12);
  EXPECT_NEAR(ca::value_function(s.model, s.ref, x, ca::Coalition::of({0})).value, -1.0, 1e-12);
}

TEST(ValueFunction, MonteCarloReportsStreamAndError) {
  ct::UniformSumSetting s;
  ca::BackendConfig mc;
  mc.backend = ca::Backend::kMonteCarlo;
  mc.draws = 100000;
  mc.seed = 3;
  const auto v = ca::value_function(s.model, s.ref, ca::Instance{{0, 0}}, ca::Coalition::of({1}), mc);
  EXPECT_EQ(v.backend, "monte-carlo");
  EXPECT_EQ(v.draws, 100000u);
  EXPECT_EQ(v.stream_index, 2u);
  EXPECT_GT(v.standard_error, 0.0);
  EXPECT_NEAR(v.value, 0.5, 4 * v.standard_error);
}

TEST(ValueFunction, DatasetSourceEnumeratesRows) {
  auto data = ct::dataset(kXY, {{1, 10}, {2, 20}, {3, 30}}, {1, 1, 2});
  const auto ref = ca::ReferenceDistribution::marginal(data);
  const auto m = ca::parse_model("x1 * x2", kXY);
  // E[X1] * 5 over weighted rows: (1 + 2 + 6) / 4 * 5.
  const auto v = ca::value_function(m, ref, ca::Instance{{0, 5}}, ca::Coalition::of({1}));
  EXPECT_DOUBLE_EQ(v.value, 9.0 / 4.0 * 5.0);
  EXPECT_EQ(v.backend, "enumeration");
}

// ---------------------------------------------------------------- exact

TEST(ExactShapley, UniformSumClosedForm) {
  ct::UniformSumSetting s;
  const auto r = ca::exact_shapley(s.model, s.ref, ca::Instance{{0, 0}});
  EXPECT_NEAR(r.phi[0], -0.5, 1e-12);
  EXPECT_NEAR(r.phi[1], -1.5, 1e-12);
  EXPECT_NEAR(r.base, 2.0, 1e-12);
  EXPECT_EQ(r.mode, "marginal");
  EXPECT_EQ(r.estimator, "exact");
}

TEST(ExactShapley, GaussianSquaresClosedForm) {
  ct::GaussianSquaresSetting s;
  const auto r = ca::exact_shapley(s.model, s.ref, ca::Instance{{0, 0}});
  EXPECT_NEAR(r.phi[0], -1.0, 1e-9);
  EXPECT_NEAR(r.phi[1], -100.0, 1e-9);
}

TEST(ExactShapley, AllMaleCohortGivesMaleZero) {
  const auto schema = ct::binary_schema({"x_male", "x_eligible"});
  auto data = ct::dataset(schema, {{1, 1}, {1, 0}, {1, 0}, {1, 1}, {1, 0}});
  const auto ref = ca::ReferenceDistribution::marginal(data);
  const auto m = ca::parse_model("x_male * x_eligible", schema);
  const auto r = ca::exact_shapley(m, ref, ca::Instance{{1, 1}});
  EXPECT_EQ(r.phi[0], 0.0);
  EXPECT_NEAR(r.phi[1], 1.0 - 0.4, 1e-15);
}

TEST(ExactShapley, ConstantModel) {
  ct::UniformSumSetting s;
  const auto m = ca::parse_model("7", s.schema);
  const auto r = ca::exact_shapley(m, s.ref, ca::Instance{{0.3, 1}});
  EXPECT_EQ(r.base, 7.0);
  EXPECT_EQ(r.phi, (std::vector<double>{0.0, 0.0}));
}

TEST(ExactShapley, SingleFeatureMarginalValue) {
  // f = x_male alone: phi = x_male - P(male), not 1.
  const auto schema = ct::binary_schema({"x_male", "x_eligible"});
  auto data = ct::dataset(schema, {{1, 1}, {0, 0}, {1, 0}, {0, 1}});
  const auto r = ca::exact_shapley(ca::parse_model("x_male", schema),
                                   ca::ReferenceDistribution::marginal(data), ca::Instance{{1, 0}});
  EXPECT_DOUBLE_EQ(r.phi[0], 0.5);
  EXPECT_EQ(r.phi[1], 0.0);
}

TEST(ExactShapley, MatchesPermutationOracle) {
  const auto schema = ca::FeatureSchema::continuous({"a", "b", "c", "d"});
  const auto m = ca::parse_model("a * b + indicator(c > 0.2) * d - min(a, c)^2", schema);
  auto spec = ct::parametric({"a", "b", "c", "d"},
                             {ca::UniformLaw{-1, 1}, ca::NormalLaw{0.5, 2}, ca::NormalLaw{0, 1},
                              ca::BernoulliLaw{0.3}});
  const auto ref = ca::ReferenceDistribution::marginal(spec);
  const ca::Instance x{{0.4, -1.0, 0.9, 1.0}};
  const auto r = ca::exact_shapley(m, ref, x);
  const auto oracle = ct::permutation_oracle(4, [&](std::uint64_t s) {
    return ca::value_function(m, ref, x, ca::Coalition(s)).value;
  });
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(r.phi[j], oracle[j], 1e-12) << j;
}

TEST(ExactShapley, TooManyFeaturesUnlessForced) {
  std::vector<std::string> names;
  for (int i = 0; i < 26; ++i) names.push_back("f" + std::to_string(i));
  const auto schema = ca::FeatureSchema::continuous(names);
  const auto m = ca::parse_model("f0", schema);
  std::vector<ca::Law> laws(26, ca::UniformLaw{0, 1});
  const auto ref = ca::ReferenceDistribution::marginal(ct::parametric(names, laws));
  const ca::Instance x{std::vector<double>(26, 0.0)};
  try {
    ca::exact_shapley(m, ref, x);
    FAIL() << "expected TooManyFeatures";
  } catch (const ca::TooManyFeatures& e) {
    EXPECT_EQ(e.features(), 26u);
    EXPECT_NE(std::string(e.what()).find("sampled_shapley"), std::string::npos);
  }
  ca::EnumerationLimits small{3, false};
  const auto s3 = ca::FeatureSchema::continuous({"a", "b", "c", "d"});
  const auto ref4 = ca::ReferenceDistribution::marginal(
      ct::parametric({"a", "b", "c", "d"}, std::vector<ca::Law>(4, ca::UniformLaw{0, 1})));
  EXPECT_THROW(ca::exact_shapley(ca::parse_model("a", s3), ref4, ca::Instance{{0, 0, 0, 0}}, {}, small),
               ca::TooManyFeatures);
  small.force = true;
  EXPECT_NO_THROW(ca::exact_shapley(ca::parse_model("a", s3), ref4, ca::Instance{{0, 0, 0, 0}}, {}, small));
}

TEST(ExactShapley, SizeStrataFormulationAgrees) {
  const std::vector<double> values{0.3, 1.2, -0.7, 2.5, 0.1, 0.0, 4.0, -1.0};
  const auto a = ca::shapley_from_values(values, 3);
  const auto b = ca::shapley_by_size_strata(values, 3);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a[j], b[j], 1e-15);
}

// ---------------------------------------------------------------- sampled

TEST(SampledShapley, UniformSumWithinTolerance) {
  ct::UniformSumSetting s;
  const auto r = ca::sampled_shapley(s.model, s.ref, ca::Instance{{0, 0}}, {20000, 10, 0, 1});
  EXPECT_NEAR(r.phi[0], -0.5, 0.02);
  EXPECT_NEAR(r.phi[1], -1.5, 0.03);
  EXPECT_EQ(r.estimator, "sampled");
  EXPECT_EQ(r.standard_errors.size(), 2u);
  EXPECT_LE(std::abs(r.efficiency_residual()), 1e-9);
}

TEST(SampledShapley, SingleFeatureIsPredictionMinusBase) {
  const auto schema = ca::FeatureSchema::continuous({"x"});
  const auto m = ca::parse_model("3 * x + 1", schema);
  auto data = ct::dataset(schema, {{0}, {1}, {2}, {5}});
  const auto ref = ca::ReferenceDistribution::marginal(data);
  const auto r = ca::sampled_shapley(m, ref, ca::Instance{{4}}, {200, 50, 1, 1});
  EXPECT_NEAR(r.phi[0] + r.base, 13.0, 1e-12);
  EXPECT_NEAR(r.phi[0], 13.0 - 7.0, 4 * r.standard_errors[0] + 1e-12);
}

TEST(SampledShapley, SameSeedIsBitIdenticalAcrossWorkerCounts) {
  ct::ThresholdSwitchSetting s;
  const ca::Instance x{{0.5, 0.5}};
  const auto a = ca::sampled_shapley(s.model, s.ref, x, {3000, 5, 42, 1});
  const auto b = ca::sampled_shapley(s.model, s.ref, x, {3000, 5, 42, 1});
  const auto c = ca::sampled_shapley(s.model, s.ref, x, {3000, 5, 42, 4});
  EXPECT_EQ(a.phi, b.phi);
  EXPECT_EQ(a.phi, c.phi);
  EXPECT_EQ(a.standard_errors, c.standard_errors);
  EXPECT_EQ(a.base, c.base);
  const auto d = ca::sampled_shapley(s.model, s.ref, x, {3000, 5, 43, 1});
  EXPECT_NE(a.phi, d.phi);
}

TEST(SampledShapley, RejectsZeroCounts) {
  ct::UniformSumSetting s;
  EXPECT_THROW(ca::sampled_shapley(s.model, s.ref, ca::Instance{{0, 0}}, {0, 10, 0, 1}),
               ca::InvalidArgument);
  EXPECT_THROW(ca::sampled_shapley(s.model, s.ref, ca::Instance{{0, 0}}, {10, 0, 0, 1}),
               ca::InvalidArgument);
}

// ---------------------------------------------------------------- orderings

TEST(LinearExtensions, CountsAndUniformSampling) {
  const auto schema = ca::FeatureSchema::continuous({"a", "b", "c", "d"});
  // a -> c, b -> c, c -> d: orders are (a b c d) and (b a c d).
  const ca::CausalGraph g(schema, {"a", "b", "c", "d"}, {{"a", "c"}, {"b", "c"}, {"c", "d"}});
  const ca::LinearExtensionCounter counter(g);
  EXPECT_EQ(counter.total(), 2.0);
  const ca::LinearExtensionCounter free_counter(ca::CausalGraph::empty(schema));
  EXPECT_EQ(free_counter.total(), 24.0);
  std::map<std::vector<std::size_t>, int> seen;
  ca::RandomStream s(0, "t", 0);
  for (int i = 0; i < 24000; ++i) ++seen[free_counter.sample(s)];
  EXPECT_EQ(seen.size(), 24u);
  for (const auto& [order, n] : seen) EXPECT_NEAR(n, 1000, 150);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(g.is_linear_extension(counter.sample(s)));
}

TEST(AsymmetricShapley, EmptyGraphEqualsConditionalExact) {
  const auto schema = ct::binary_schema({"x1", "x2", "x3"});
  auto data = ct::dataset(schema, {{1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 1, 0}});
  const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
  const auto m = ca::parse_model("x1 * x2 + 2 * x3 - x1", schema);
  const ca::Instance x{{1, 1, 0}};
  const auto a = ca::asymmetric_shapley(m, ref, x, ca::CausalGraph::empty(schema));
  const auto e = ca::exact_shapley(m, ref, x);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.phi[j], e.phi[j], 1e-12);
  EXPECT_EQ(a.mode, "asymmetric");
}

TEST(AsymmetricShapley, TotalOrderIsSinglePermutation) {
  const auto schema = ct::binary_schema({"x1", "x2", "x3"});
  auto data = ct::dataset(schema, {{1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {0, 0, 0}, {1, 1, 1}});
  const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
  const auto m = ca::parse_model("x1 + 2 * x2 * x3", schema);
  const ca::CausalGraph g(schema, {"x1", "x2", "x3"}, {{"x1", "x2"}, {"x2", "x3"}});
  const ca::Instance x{{1, 1, 1}};
  const auto r = ca::asymmetric_shapley(m, ref, x, g);
  auto v = [&](std::uint64_t s) { return ca::value_function(m, ref, x, ca::Coalition(s)).value; };
  EXPECT_NEAR(r.phi[0], v(0b001) - v(0), 1e-12);
  EXPECT_NEAR(r.phi[1], v(0b011) - v(0b001), 1e-12);
  EXPECT_NEAR(r.phi[2], v(0b111) - v(0b011), 1e-12);
}

TEST(AsymmetricShapley, ChainCopyGivesRootEverything) {
  const auto schema = ct::binary_schema({"x1", "x2"});
  auto data = ct::dataset(schema, {{1, 1}, {0, 0}, {0, 0}, {1, 1}, {0, 0}});
  const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
  const ca::CausalGraph g(schema, {"x1", "x2"}, {{"x1", "x2"}});
  const auto r = ca::asymmetric_shapley(ca::parse_model("x2", schema), ref, ca::Instance{{1, 1}}, g);
  EXPECT_NEAR(r.phi[0], 1.0 - 0.4, 1e-15);
  EXPECT_EQ(r.phi[1], 0.0);
}

TEST(AsymmetricShapley, MatchesOrderingOracleAndSampled) {
  const auto schema = ca::FeatureSchema::continuous({"a", "b", "c", "d"});
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 40; ++i) {
    const double a = std::sin(i * 0.9);
    raw.push_back({a, a + 0.3 * std::cos(i * 2.1), std::cos(i * 0.4), a * 0.5});
  }
  auto data = ct::dataset(schema, raw);
  const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
  const ca::CausalGraph g(schema, {"a", "b", "c", "d"}, {{"a", "b"}, {"a", "d"}});
  const auto m = ca::parse_model("a + b * c + max(d, 0)", schema);
  const ca::Instance x{{0.2, 0.4, -0.5, 0.1}};
  const auto r = ca::asymmetric_shapley(m, ref, x, g);
  const auto oracle = ct::ordering_oracle(g, [&](std::uint64_t s) {
    return ca::value_function(m, ref, x, ca::Coalition(s)).value;
  });
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(r.phi[j], oracle[j], 1e-12) << j;
  ca::OrderingOptions sampled;
  sampled.exact = false;
  sampled.sampling = {4000, 20, 5, 2};
  const auto s = ca::asymmetric_shapley(m, ref, x, g, sampled);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(s.phi[j], r.phi[j], 4 * s.standard_errors[j] + 1e-9) << j;
  }
}

TEST(AsymmetricShapley, RequiresConditionalReferenceAndSmallM) {
  ct::UniformSumSetting s;
  EXPECT_THROW(ca::asymmetric_shapley(s.model, s.ref, ca::Instance{{0, 0}},
                                      ca::CausalGraph::empty(s.schema)),
               ca::InvalidArgument);
  std::vector<std::string> names;
  for (int i = 0; i < 11; ++i) names.push_back("f" + std::to_string(i));
  const auto schema = ct::binary_schema(names);
  auto data = ct::dataset(schema, {std::vector<double>(11, 0.0), std::vector<double>(11, 1.0)});
  const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
  EXPECT_THROW(ca::asymmetric_shapley(ca::parse_model("f0", schema), ref,
                                      ca::Instance{std::vector<double>(11, 0.0)},
                                      ca::CausalGraph::empty(schema)),
               ca::TooManyFeatures);
}

TEST(CausalShapley, EmptyGraphEqualsMarginal) {
  std::vector<std::vector<double>> raw;
  for (int i = 0; i < 12; ++i) raw.push_back({double(i % 4), double((i * 7) % 5), double(i % 2)});
  const auto schema = ca::FeatureSchema::continuous({"a", "b", "c"});
  auto data = ct::dataset(schema, raw);
  const auto m = ca::parse_model("a * b - indicator(c > 0.5) * a", schema);
  const ca::Instance x{{1, 2, 1}};
  const auto c = ca::causal_shapley(
      m, ca::ReferenceDistribution::interventional_dag(data, ca::CausalGraph::empty(schema)), x);
  const auto e = ca::exact_shapley(m, ca::ReferenceDistribution::marginal(data), x);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(c.phi[j], e.phi[j], 1e-12);
  EXPECT_EQ(c.mode, "causal");
}

TEST(CausalShapley, ChainRootAbsorbsDownstreamEffect) {
  // Standardized x1 (mean 0, sd 1) with x2 := x1, evaluated at x = (1, 1).
  std::vector<std::vector<double>> raw{{-1, -1}, {1, 1}, {-1, -1}, {1, 1}};
  auto data = ct::dataset(kXY, raw);
  ca::KernelOptions opt;
  opt.bandwidth = 1e-3;
  const auto ref = ca::ReferenceDistribution::interventional_dag(
      data, ca::CausalGraph(kXY, {"x1", "x2"}, {{"x1", "x2"}}), opt);
  const auto m = ca::parse_model("x1 + x2", kXY);
  const auto r = ca::causal_shapley(m, ref, ca::Instance{{1, 1}});
  // v(0) = 0, v({1}) = 2 (x2 follows), v({2}) = E X1 + 1 = 1, v({1,2}) = 2.
  EXPECT_NEAR(r.phi[0], 0.5 * (2 - 0) + 0.5 * (2 - 1), 1e-12);
  EXPECT_NEAR(r.phi[1], 0.5 * (1 - 0) + 0.5 * (2 - 2), 1e-12);
  EXPECT_GT(std::abs(r.phi[0]), std::abs(r.phi[1]));
}

TEST(CausalShapley, DummyChildGetsZero) {
  std::vector<std::vector<double>> raw{{-1, -1}, {1, 1}, {0, 0}, {2, 2}};
  auto data = ct::dataset(kXY, raw);
  const auto ref = ca::ReferenceDistribution::interventional_dag(
      data, ca::CausalGraph(kXY, {"x1", "x2"}, {{"x1", "x2"}}));
  const auto r = ca::causal_shapley(ca::parse_model("x1", kXY), ref, ca::Instance{{1, 1}});
  EXPECT_EQ(r.phi[1], 0.0);
}

TEST(CausalShapley, RequiresInterventionalReference) {
  ct::UniformSumSetting s;
  EXPECT_THROW(ca::causal_shapley(s.model, s.ref, ca::Instance{{0, 0}}), ca::InvalidArgument);
}

// ---------------------------------------------------------------- deltas

TEST(CoalitionDeltas, ThresholdSwitchCancellation) {
  ct::ThresholdSwitchSetting s;
  const auto d = ca::coalition_deltas(s.model, s.ref, ca::Instance{{0.5, 0.5}}, 1);
  ASSERT_EQ(d.deltas.size(), 2u);
  EXPECT_EQ(d.deltas[0].coalition, ca::Coalition());
  EXPECT_NEAR(d.deltas[0].delta, -0.5, 1e-12);
  EXPECT_EQ(d.deltas[1].coalition, ca::Coalition::of({0}));
  EXPECT_NEAR(d.deltas[1].delta, 0.5, 1e-12);
  EXPECT_NEAR(d.phi, 0.0, 1e-12);
  EXPECT_TRUE(d.cancellation);
  EXPECT_NEAR(d.tau, 0.05, 1e-12);  // 0.05 * max |v| = 0.05 * 1
}

TEST(CoalitionDeltas, AdditiveModelHasConstantDeltas) {
  ct::UniformSumSetting s;
  const ca::Instance x{{1.25, -0.5}};
  for (std::size_t j = 0; j < 2; ++j) {
    const auto d = ca::coalition_deltas(s.model, s.ref, x, j);
    const double expect = x.values[j] - (j == 0 ? 0.5 : 1.5);
    double weights = 0.0;
    for (const auto& e : d.deltas) {
      EXPECT_NEAR(e.delta, expect, 1e-12);
      weights += e.weight;
    }
    EXPECT_NEAR(weights, 1.0, 1e-15);
    EXPECT_FALSE(d.cancellation);
  }
}

TEST(CoalitionDeltas, ConstantModelAllZero) {
  ct::UniformSumSetting s;
  const auto d = ca::coalition_deltas(ca::parse_model("3", s.schema), s.ref, ca::Instance{{0, 0}}, 0);
  for (const auto& e : d.deltas) EXPECT_EQ(e.delta, 0.0);
  EXPECT_FALSE(d.cancellation);
}

TEST(CoalitionDeltas, WeightedSumReproducesPhi) {
  const auto schema = ca::FeatureSchema::continuous({"a", "b", "c"});
  const auto m = ca::parse_model("a * b * c + indicator(b > 0) * 2", schema);
  const auto ref = ca::ReferenceDistribution::marginal(
      ct::parametric({"a", "b", "c"}, {ca::NormalLaw{0, 1}, ca::NormalLaw{0.5, 1}, ca::UniformLaw{0, 2}}));
  const ca::Instance x{{1, -1, 0.5}};
  const auto r = ca::exact_shapley(m, ref, x);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto d = ca::coalition_deltas(m, ref, x, j);
    EXPECT_EQ(d.deltas.size(), 4u);
    EXPECT_NEAR(d.phi, r.phi[j], 1e-12);
  }
  ca::DeltaOptions tight;
  tight.tau = 10.0;
  EXPECT_FALSE(ca::coalition_deltas(m, ref, x, 0, {}, tight).cancellation);
}

}  // namespace
