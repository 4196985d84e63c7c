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
#include <memory>
#include <vector>

#include "coalition_attrib.hpp"
#include "fixtures.hpp"
#include "generators.hpp"

namespace ca = coalition_attrib;
namespace ct = coalition_attrib::testing;

namespace {

constexpr std::size_t kDraws = 100000;

struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> var;
};

ColumnMoments moments(const ca::RowMatrix& rows) {
  ColumnMoments c;
  std::vector<double> col(rows.rows());
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    for (std::size_t i = 0; i < rows.rows(); ++i) col[i] = rows(i, j);
    const double mu = ca::mean(col);
    for (double& v : col) v = (v - mu) * (v - mu);
    c.mean.push_back(mu);
    c.var.push_back(ca::pairwise_sum(col) / static_cast<double>(rows.rows() - 1));
  }
  return c;
}

ca::RowMatrix draw(const ca::ReferenceDistribution& ref, ca::Coalition s, const ca::Instance& x,
                   std::size_t tag_index) {
  ca::RandomStream stream(4242, "refdist-property", tag_index);
  return ca::impute(ref, s, x.values, kDraws, stream);
}

// Two-sample comparison of column means over the columns outside `s`.
void expect_same_means(const ca::RowMatrix& a, const ca::RowMatrix& b, ca::Coalition s,
                       const char* label) {
  const auto ma = moments(a);
  const auto mb = moments(b);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    if (s.contains(j)) continue;
    const double se = std::sqrt(ma.var[j] / a.rows() + mb.var[j] / b.rows());
    EXPECT_LE(std::abs(ma.mean[j] - mb.mean[j]), 3.0 * se + 1e-12)
        << label << " column " << j << ": " << ma.mean[j] << " vs " << mb.mean[j];
  }
}

// 0/1 rows with strong dependence, so every conditional has exact support.
std::shared_ptr<const ca::Dataset> binary_chain_data() {
  const auto schema = ct::binary_schema({"b1", "b2", "b3"});
  ct::Gen g(31);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 1000; ++i) {
    const double b1 = g.coin(0.4) ? 1 : 0;
    const double b2 = g.coin(0.85) ? b1 : 1 - b1;
    const double b3 = g.coin(0.7) ? b2 : 1 - b2;
    rows.push_back({b1, b2, b3});
  }
  return ct::dataset(schema, rows);
}

std::shared_ptr<const ca::ParametricSpec> correlated_gaussian() {
  Eigen::MatrixXd cov(3, 3);
  cov << 1.0, 0.6, 0.3, 0.6, 4.0, 1.0, 0.3, 1.0, 2.25;
  return std::make_shared<const ca::ParametricSpec>(
      std::vector<std::string>{"x1", "x2", "x3"},
      std::vector<ca::Law>{ca::NormalLaw{0.0, 1.0}, ca::NormalLaw{1.0, 2.0}, ca::NormalLaw{-1.0, 1.5}},
      cov);
}

std::shared_ptr<const ca::Dataset> gaussian_rows(std::size_t n) {
  const auto spec = correlated_gaussian();
  ca::RandomStream stream(99, "gaussian-rows", 0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(3));
  for (auto& r : rows) spec->draw_row(stream, r);
  return ct::dataset(spec->schema(), rows);
}

TEST(RefdistProperty, FullCoalitionIsPointMassInEveryMode) {
  const auto data = binary_chain_data();
  const auto graph = ca::CausalGraph(data->schema(), data->schema().names(), {{"b1", "b2"}, {"b2", "b3"}});
  const ca::Instance x{{1, 0, 1}};
  const std::vector<ca::ReferenceDistribution> refs{
      ca::ReferenceDistribution::marginal(data), ca::ReferenceDistribution::conditional_empirical(data),
      ca::ReferenceDistribution::conditional_gaussian(data),
      ca::ReferenceDistribution::interventional_dag(data, graph)};
  for (const auto& ref : refs) {
    ca::RandomStream stream(1, "refdist-property", 0);
    const auto rows = ca::impute(ref, ca::Coalition::full(3), x.values, 1000, stream);
    for (std::size_t i = 0; i < rows.rows(); ++i)
      for (std::size_t j = 0; j < 3; ++j) ASSERT_EQ(rows(i, j), x[j]);
  }
}

TEST(RefdistProperty, EmptyCoalitionIsSourceJointOnData) {
  const auto data = binary_chain_data();
  const auto graph = ca::CausalGraph(data->schema(), data->schema().names(), {{"b1", "b2"}, {"b2", "b3"}});
  const ca::Instance x{{1, 0, 1}};
  const auto base = draw(ca::ReferenceDistribution::marginal(data), ca::Coalition(), x, 0);
  expect_same_means(draw(ca::ReferenceDistribution::conditional_empirical(data), ca::Coalition(), x, 1),
                    base, ca::Coalition(), "conditional-empirical");
  expect_same_means(draw(ca::ReferenceDistribution::conditional_gaussian(data), ca::Coalition(), x, 2),
                    base, ca::Coalition(), "conditional-gaussian");
  expect_same_means(draw(ca::ReferenceDistribution::interventional_dag(data, graph), ca::Coalition(), x, 3),
                    base, ca::Coalition(), "interventional-dag");
}

TEST(RefdistProperty, EmptyCoalitionIsSourceJointOnGaussianSpec) {
  const auto spec = correlated_gaussian();
  const auto graph = ca::CausalGraph(spec->schema(), spec->schema().names(), {{"x1", "x2"}, {"x1", "x3"}});
  const ca::Instance x{{2, -3, 4}};
  const auto base = draw(ca::ReferenceDistribution::marginal(spec), ca::Coalition(), x, 10);
  expect_same_means(draw(ca::ReferenceDistribution::conditional_gaussian(spec), ca::Coalition(), x, 11),
                    base, ca::Coalition(), "conditional-gaussian");
  expect_same_means(draw(ca::ReferenceDistribution::interventional_dag(spec, graph), ca::Coalition(), x, 12),
                    base, ca::Coalition(), "interventional-dag");
}

TEST(RefdistProperty, HugeBandwidthWithAllNeighboursIsMarginal) {
  const auto data = gaussian_rows(2000);
  ca::KernelOptions wide;
  wide.bandwidth = 1e6;
  wide.neighbors = data->rows();
  const ca::Instance x{{2.5, 0, 0}};
  const auto s = ca::Coalition::of({0});
  expect_same_means(draw(ca::ReferenceDistribution::conditional_empirical(data, wide), s, x, 20),
                    draw(ca::ReferenceDistribution::marginal(data), s, x, 21), s, "h=1e6");
}

TEST(RefdistProperty, GaussianAndEmpiricalConditionalsAgreeOnLargeSample) {
  const auto spec = correlated_gaussian();
  const auto data = gaussian_rows(100000);
  const ca::Instance x{{0.5, 0, 0}};
  const auto s = ca::Coalition::of({0});
  const auto gauss = moments(draw(ca::ReferenceDistribution::conditional_gaussian(spec), s, x, 30));
  // All rows eligible: the default k = max(20, sqrt(n)) neighbours would leave
  // a sampling error near 0.1 on these means, larger than the tolerance.
  ca::KernelOptions all_rows;
  all_rows.neighbors = data->rows();
  const auto emp = moments(draw(ca::ReferenceDistribution::conditional_empirical(data, all_rows), s, x, 31));
  // Closed form: E[X_j | X1 = 0.5] = mu_j + cov(j,1) * 0.5.
  EXPECT_NEAR(gauss.mean[1], 1.0 + 0.6 * 0.5, 0.02);
  EXPECT_NEAR(gauss.mean[2], -1.0 + 0.3 * 0.5, 0.02);
  EXPECT_NEAR(gauss.mean[1], emp.mean[1], 0.05);
  EXPECT_NEAR(gauss.mean[2], emp.mean[2], 0.05);
}

TEST(RefdistProperty, ImputationIsAPureFunctionOfTheStream) {
  ct::Gen g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + g.index(4);
    const auto schema = ca::FeatureSchema::continuous(ct::feature_names(m));
    const auto data = ct::dataset(schema, ct::random_rows(g, 10, m));
    const auto ref = ca::ReferenceDistribution::conditional_empirical(data);
    const auto x = ct::random_instance(g, m);
    const ca::Coalition s(g.index(std::size_t{1} << m));
    ca::RandomStream a(trial, "imputation", 5), b(trial, "imputation", 5);
    EXPECT_EQ(ca::impute(ref, s, x.values, 50, a).data(), ca::impute(ref, s, x.values, 50, b).data());
  }
}

}  // namespace
