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

#include <vector>

#include "coalition_attrib.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace ca = coalition_attrib;
namespace ct = coalition_attrib::testing;

namespace {

// Random binary cohort with a random model over it.
struct Cohort {
  ca::FeatureSchema schema = ct::binary_schema({"x_male", "x_eligible", "x_senior"});
  std::shared_ptr<const ca::Dataset> data;
  ca::ModelExpr model = ca::parse_model("0", schema);
};

Cohort random_cohort(std::uint64_t seed) {
  ct::Gen g(seed);
  Cohort c;
  std::vector<std::vector<double>> rows(60 + g.index(240), std::vector<double>(3));
  const double p_male = g.uniform(0.0, 1.0);
  for (auto& r : rows) {
    r[0] = g.coin(p_male) ? 1 : 0;
    r[1] = g.coin(0.5) ? 1 : 0;
    r[2] = g.coin(0.3) ? r[1] : (g.coin() ? 1 : 0);
  }
  c.data = ct::dataset(c.schema, rows);
  ct::ExprShape shape;
  shape.max_depth = 3;
  shape.division = false;
  shape.negative_exponents = false;
  shape.max_constant = 3.0;
  ct::ExprGen gen(g, c.schema, {0, 1, 2}, shape);
  c.model = gen.model();
  return c;
}

TEST(FairnessProperty, SameInputsAndSeedGiveIdenticalScreens) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto c = random_cohort(seed);
    ca::FairnessScreenOptions opt;
    opt.max_rows = 40;
    opt.seed = seed;
    const auto a = ca::counterfactual_fairness_screen(c.model, c.data, "x_male", opt);
    opt.workers = 3;
    const auto b = ca::counterfactual_fairness_screen(c.model, c.data, "x_male", opt);
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_EQ(a.rows, b.rows);
    EXPECT_EQ(a.phi, b.phi);
  }
}

TEST(FairnessProperty, ShrinkingToleranceNeverTurnsFailIntoPass) {
  const std::vector<double> tolerances{1.0, 0.3, 0.1, 1e-2, 1e-4, 1e-8, 0.0};
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto c = random_cohort(seed);
    bool failed = false;
    for (double tol : tolerances) {
      ca::FairnessScreenOptions opt;
      opt.tolerance = tol;
      opt.max_rows = 40;
      opt.seed = seed;
      const bool pass = ca::counterfactual_fairness_screen(c.model, c.data, "x_male", opt).passed();
      if (failed) {
        EXPECT_FALSE(pass) << "seed " << seed << " tolerance " << tol;
      }
      failed = failed || !pass;
    }
  }
}

TEST(CompareModesProperty, AdditiveModelsOverIndependentFeaturesHaveNoGap) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    ct::Gen g(seed);
    const std::size_t m = 2 + g.index(3);
    const auto schema = ca::FeatureSchema::continuous(ct::feature_names(m));
    std::vector<ca::Law> laws;
    for (std::size_t j = 0; j < m; ++j) laws.push_back(ct::random_law(g));
    const auto spec = ct::parametric(schema.names(), laws);
    // Sum of one-feature polynomial terms.
    ca::NodePtr sum = ca::constant(g.grid(0.0, 2.0));
    for (std::size_t j = 0; j < m; ++j) {
      ct::ExprShape shape;
      shape.max_depth = 3;
      shape.division = false;
      shape.piecewise = false;
      shape.negative_exponents = false;
      shape.max_exponent = 2;
      shape.max_constant = 3.0;
      ct::ExprGen gen(g, schema, {j}, shape);
      sum = ca::binary(ca::BinaryOp::kAdd, sum, gen.model().root_ptr());
    }
    const ca::ModelExpr model(sum, m);
    std::vector<ca::Instance> xs{ct::random_instance(g, m), ct::random_instance(g, m)};
    const auto r = ca::compare_modes(model, ca::ReferenceDistribution::marginal(spec),
                                     ca::ReferenceDistribution::conditional_gaussian(spec), xs);
    EXPECT_LE(r.aggregate_max_gap, 1e-9) << ca::to_string(model);
    EXPECT_TRUE(r.flagged.empty());
  }
}

}  // namespace
