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

// Deterministic evaluation of v(S) = E[f(x_S, X_Sbar)] under a reference
// distribution: tensor-product Gauss rules for parametric laws (split at the
// breakpoints of indicator and min/max factors) and exact enumeration of the
// weighted rows of a dataset.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coalition_attrib/coalition.hpp"
#include "coalition_attrib/data.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/expr.hpp"
#include "coalition_attrib/expr_analysis.hpp"
#include "coalition_attrib/gaussian.hpp"
#include "coalition_attrib/numeric.hpp"
#include "coalition_attrib/quadrature.hpp"
#include "coalition_attrib/refdist.hpp"

namespace coalition_attrib {

struct QuadratureOptions {
  // Nodes per free axis when the integrand is not (piecewise) polynomial in
  // that axis. Polynomial axes get exactly as many nodes as their degree needs.
  std::size_t order = 32;
  // Nodes per piece for Normal axes split at breakpoints whose pieces are not
  // polynomial.
  std::size_t dense_order = 64;
  // Upper bound on integrand evaluations for one v(S).
  std::size_t max_points = 50'000'000;
};

// Discrete law over a block of features.
struct PointSet {
  std::vector<std::size_t> features;
  std::vector<double> values;  // size() x features.size(), row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  void add(std::span<const double> point, double weight) {
    values.insert(values.end(), point.begin(), point.end());
    weights.push_back(weight);
  }
};

namespace detail {

inline std::size_t nodes_for_degree(std::optional<int> degree, std::size_t fallback) {
  if (!degree) return fallback;
  const auto n = static_cast<std::size_t>(*degree / 2 + 1);
  return n <= 256 ? n : fallback;
}

inline PointSet single_axis(std::size_t j, const QuadratureRule& rule, double scale = 1.0) {
  PointSet ps;
  ps.features = {j};
  for (std::size_t i = 0; i < rule.size(); ++i) {
    if (rule.weights[i] > 0.0) ps.add({&rule.nodes[i], 1}, rule.weights[i] * scale);
  }
  return ps;
}

// Rule for one independent parametric axis, split at the integrand's
// breakpoints in that axis.
inline PointSet axis_rule(const Law& law, std::size_t j, const Node& root,
                          const PartialAssignment& pa, const QuadratureOptions& opt) {
  if (const auto* b = std::get_if<BernoulliLaw>(&law)) {
    PointSet ps;
    ps.features = {j};
    const double zero = 0.0;
    const double one = 1.0;
    if (b->p < 1.0) ps.add({&zero, 1}, 1.0 - b->p);
    if (b->p > 0.0) ps.add({&one, 1}, b->p);
    return ps;
  }
  const std::vector<double> cuts = breakpoints(root, j, pa);
  const std::optional<int> degree = piecewise_degree(root, j, pa);
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    std::vector<double> edges = {u->a};
    for (double c : cuts) {
      if (c > u->a && c < u->b) edges.push_back(c);
    }
    edges.push_back(u->b);
    const std::size_t n = nodes_for_degree(degree, opt.order);
    PointSet ps;
    ps.features = {j};
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const QuadratureRule r = gauss_legendre_uniform(n, edges[k], edges[k + 1]);
      const double share = (edges[k + 1] - edges[k]) / (u->b - u->a);
      for (std::size_t i = 0; i < r.size(); ++i) ps.add({&r.nodes[i], 1}, r.weights[i] * share);
    }
    return ps;
  }
  const auto& nl = std::get<NormalLaw>(law);
  std::vector<double> zcuts;
  for (double c : cuts) {
    const double z = (c - nl.mean) / nl.sd;
    if (std::isfinite(z)) zcuts.push_back(z);
  }
  if (zcuts.empty()) {
    QuadratureRule r = gauss_hermite_normal(nodes_for_degree(degree, opt.order));
    for (double& t : r.nodes) t = nl.mean + nl.sd * t;
    return single_axis(j, r);
  }
  std::vector<double> edges = {-INFINITY};
  edges.insert(edges.end(), zcuts.begin(), zcuts.end());
  edges.push_back(INFINITY);
  PointSet ps;
  ps.features = {j};
  const std::size_t n = degree ? nodes_for_degree(degree, opt.dense_order) : 0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    QuadratureRule r;
    if (n >= 1 && n <= 12) {
      r = truncated_normal_rule(edges[k], edges[k + 1], n);
    } else {
      // Dense Gauss-Legendre in probability space t = Phi(z).
      const double tl = normal_cdf(edges[k]);
      const double tu = normal_cdf(edges[k + 1]);
      if (!(tu > tl)) continue;
      const QuadratureRule g = gauss_legendre_uniform(opt.dense_order, tl, tu);
      for (std::size_t i = 0; i < g.size(); ++i) {
        r.nodes.push_back(normal_quantile(g.nodes[i]));
        r.weights.push_back(g.weights[i] * (tu - tl));
      }
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double v = nl.mean + nl.sd * r.nodes[i];
      if (r.weights[i] > 0.0) ps.add({&v, 1}, r.weights[i]);
    }
  }
  return ps;
}

// Tensor Gauss-Hermite grid for a correlated Gaussian block, mapped through
// its PSD factor. Zero columns of the factor (degenerate directions) are
// dropped from the grid.
inline PointSet gaussian_block_rule(const std::vector<std::size_t>& features,
                                    const GaussianBlock& block, std::size_t nodes_per_dim,
                                    std::size_t max_points) {
  PointSet ps;
  ps.features = features;
  const auto d = static_cast<Eigen::Index>(features.size());
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < block.factor.cols(); ++c) {
    if (block.factor.col(c).cwiseAbs().maxCoeff() > 0.0) active.push_back(c);
  }
  const QuadratureRule h = gauss_hermite_normal(nodes_per_dim);
  double total = 1.0;
  for (std::size_t a = 0; a < active.size(); ++a) total *= static_cast<double>(h.size());
  if (total > static_cast<double>(max_points)) {
    throw QuadratureUnavailable("Gaussian quadrature grid needs " + std::to_string(total) +
                                " points; use the monte-carlo backend");
  }
  std::vector<std::size_t> idx(active.size(), 0);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(block.factor.cols());
  std::vector<double> point(features.size());
  for (;;) {
    double w = 1.0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      z[active[a]] = h.nodes[idx[a]];
      w *= h.weights[idx[a]];
    }
    const Eigen::VectorXd v = block.mean + block.factor * z;
    for (Eigen::Index i = 0; i < d; ++i) point[static_cast<std::size_t>(i)] = v[i];
    ps.add(point, w);
    std::size_t a = 0;
    while (a < active.size() && ++idx[a] == h.size()) idx[a++] = 0;
    if (a == active.size()) break;
  }
  return ps;
}

// Weighted rows of a dataset projected onto `features`, merged by value.
inline PointSet aggregate_rows(const Dataset& data, const std::vector<double>& weights,
                               const std::vector<std::size_t>& features) {
  std::map<std::vector<double>, double> merged;
  std::vector<double> key(features.size());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (weights[i] == 0.0) continue;
    for (std::size_t a = 0; a < features.size(); ++a) key[a] = data(i, features[a]);
    merged[key] += weights[i];
  }
  PointSet ps;
  ps.features = features;
  for (const auto& [k, w] : merged) ps.add(k, w);
  return ps;
}

class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

using Level = std::function<const PointSet&(std::span<const double>)>;

class LevelWalker {
 public:
  LevelWalker(const ModelExpr& model, std::vector<Level> levels, std::size_t max_points)
      : model_(model), levels_(std::move(levels)), max_points_(max_points) {}

  double run(std::vector<double> x) {
    walk(0, 1.0, x);
    return total_.value() / weight_.value();
  }

 private:
  void walk(std::size_t level, double weight, std::vector<double>& x) {
    if (level == levels_.size()) {
      if (++points_ > max_points_) {
        throw QuadratureUnavailable("exact expectation needs more than " +
                                    std::to_string(max_points_) +
                                    " integrand evaluations; use the monte-carlo backend");
      }
      total_.add(weight * eval_model(model_, x));
      weight_.add(weight);
      return;
    }
    // Each level is a conditional law given the levels above it, so its
    // weights are normalized on their own before multiplying through.
    const PointSet& ps = levels_[level](x);
    const std::size_t width = ps.features.size();
    const double mass = pairwise_sum(ps.weights);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      for (std::size_t a = 0; a < width; ++a) x[ps.features[a]] = ps.values[p * width + a];
      walk(level + 1, weight * (ps.weights[p] / mass), x);
    }
  }

  const ModelExpr& model_;
  std::vector<Level> levels_;
  std::size_t max_points_;
  std::size_t points_ = 0;
  CompensatedSum total_;
  CompensatedSum weight_;
};

inline Level fixed_level(std::shared_ptr<const PointSet> ps) {
  return [ps](std::span<const double>) -> const PointSet& { return *ps; };
}

}  // namespace detail

// Features whose value can influence v(S): referenced by the model and, for
// interventional references, their causal ancestors.
inline std::vector<bool> relevant_features(const ModelExpr& model,
                                           const ReferenceDistribution& ref) {
  std::vector<bool> rel = referenced_mask(model);
  if (ref.mode() == ReferenceMode::kInterventionalDag && ref.graph()) {
    const auto anc = ref.graph()->ancestors_of(rel);
    for (std::size_t j = 0; j < rel.size(); ++j) rel[j] = rel[j] || anc[j];
  }
  return rel;
}

// "quadrature" for parametric sources, "enumeration" for datasets.
inline const char* exact_backend_name(const ReferenceDistribution& ref) {
  return ref.dataset() != nullptr ? "enumeration" : "quadrature";
}

// Deterministic v(S). v(S) == f(x) exactly whenever S covers every relevant
// feature (in particular for the full coalition).
inline double exact_value(const ModelExpr& model, const ReferenceDistribution& ref,
                          std::span<const double> x, Coalition s,
                          const QuadratureOptions& opt = {}) {
  const std::size_t m = ref.schema().size();
  if (x.size() != m || model.feature_count() != m) {
    throw InvalidArgument("model, reference and instance disagree on the feature count");
  }
  const std::vector<bool> relevant = relevant_features(model, ref);
  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < m; ++j) {
    if (relevant[j] && !s.contains(j)) free.push_back(j);
  }
  if (free.empty()) return eval_model(model, x);

  const std::vector<bool> fixed = s.mask(m);
  const PartialAssignment pa{x, fixed};
  const Node& root = model.root();
  std::vector<detail::Level> levels;

  auto independent_axes = [&](const ParametricSpec& spec, const std::vector<std::size_t>& axes) {
    for (std::size_t j : axes) {
      levels.push_back(detail::fixed_level(
          std::make_shared<const PointSet>(detail::axis_rule(spec.law(j), j, root, pa, opt))));
    }
  };
  auto free_mask = [&](const std::vector<std::size_t>& feats) {
    std::vector<bool> mask(m, false);
    for (std::size_t j : feats) mask[j] = true;
    return mask;
  };
  auto gaussian_levels = [&](const std::vector<std::size_t>& feats, const GaussianBlock& block) {
    bool diagonal = true;
    for (Eigen::Index a = 0; a < block.cov.rows() && diagonal; ++a) {
      for (Eigen::Index b = 0; b < block.cov.cols(); ++b) {
        if (a != b && block.cov(a, b) != 0.0) {
          diagonal = false;
          break;
        }
      }
    }
    if (diagonal) {
      for (std::size_t a = 0; a < feats.size(); ++a) {
        const auto ai = static_cast<Eigen::Index>(a);
        const double var = block.cov(ai, ai);
        if (var > 0.0) {
          levels.push_back(detail::fixed_level(std::make_shared<const PointSet>(
              detail::axis_rule(NormalLaw{block.mean[ai], std::sqrt(var)}, feats[a], root, pa, opt))));
        } else {
          PointSet ps;
          ps.features = {feats[a]};
          const double v = block.mean[ai];
          ps.add({&v, 1}, 1.0);
          levels.push_back(detail::fixed_level(std::make_shared<const PointSet>(std::move(ps))));
        }
      }
      return;
    }
    const std::size_t n = detail::nodes_for_degree(total_degree(root, free_mask(feats)), opt.order);
    levels.push_back(detail::fixed_level(std::make_shared<const PointSet>(
        detail::gaussian_block_rule(feats, block, n, opt.max_points))));
  };
  auto given_of = [&](Coalition c) {
    std::vector<double> vals;
    for (std::size_t j : c.members(m)) vals.push_back(x[j]);
    return vals;
  };

  switch (ref.mode()) {
    case ReferenceMode::kMarginal:
    case ReferenceMode::kConditionalGaussian: {
      const bool conditional = ref.mode() == ReferenceMode::kConditionalGaussian;
      if (const Dataset* d = ref.dataset(); d != nullptr && !conditional) {
        levels.push_back(detail::fixed_level(std::make_shared<const PointSet>(
            detail::aggregate_rows(*d, d->weights(), free))));
        break;
      }
      const ParametricSpec* spec = ref.parametric();
      if (conditional && ref.has_gaussian()) {
        gaussian_levels(free, condition_gaussian(ref.gaussian_mean(), ref.gaussian_cov(), free,
                                                 s.members(m), given_of(s)));
      } else if (spec != nullptr && spec->joint_gaussian()) {
        gaussian_levels(free, condition_gaussian(spec->mean(), spec->covariance(), free, {}, {}));
      } else {
        independent_axes(*spec, free);
      }
      break;
    }
    case ReferenceMode::kConditionalEmpirical: {
      const Dataset& d = *ref.dataset();
      levels.push_back(detail::fixed_level(std::make_shared<const PointSet>(
          detail::aggregate_rows(d, ref.kernel().weights(s.members(m), x), free))));
      break;
    }
    case ReferenceMode::kInterventionalDag: {
      const CausalGraph& g = *ref.graph();
      std::vector<std::size_t> roots;
      std::vector<std::size_t> inner;
      for (std::size_t j : g.topological_order()) {
        if (!relevant[j] || s.contains(j)) continue;
        (g.parents(j).empty() ? roots : inner).push_back(j);
      }
      const Dataset* d = ref.dataset();
      const ParametricSpec* spec = ref.parametric();
      if (d == nullptr && !spec->joint_gaussian()) {
        // Independent laws: intervening changes nothing downstream.
        independent_axes(*spec, free);
        break;
      }
      if (!roots.empty()) {
        if (d != nullptr) {
          levels.push_back(detail::fixed_level(
              std::make_shared<const PointSet>(detail::aggregate_rows(*d, d->weights(), roots))));
        } else {
          gaussian_levels(roots, condition_gaussian(spec->mean(), spec->covariance(), roots, {}, {}));
        }
      }
      const std::size_t hermite_n =
          detail::nodes_for_degree(total_degree(root, free_mask(free)), opt.order);
      for (std::size_t j : inner) {
        auto cache = std::make_shared<std::map<std::vector<double>, PointSet>>();
        const auto& parents = g.parents(j);
        levels.push_back([&ref, d, spec, j, &parents, cache,
                          hermite_n](std::span<const double> cur) -> const PointSet& {
          std::vector<double> pv;
          pv.reserve(parents.size());
          for (std::size_t p : parents) pv.push_back(cur[p]);
          auto it = cache->find(pv);
          if (it != cache->end()) return it->second;
          PointSet ps;
          if (d != nullptr) {
            ps = detail::aggregate_rows(*d, ref.kernel().weights(parents, cur), {j});
          } else {
            const GaussianBlock b =
                condition_gaussian(spec->mean(), spec->covariance(), {j}, parents, pv);
            QuadratureRule r = gauss_hermite_normal(b.factor(0, 0) > 0.0 ? hermite_n : 1);
            for (double& t : r.nodes) t = b.mean[0] + b.factor(0, 0) * t;
            ps = detail::single_axis(j, r);
          }
          return cache->emplace(std::move(pv), std::move(ps)).first->second;
        });
      }
      break;
    }
  }
  detail::LevelWalker walker(model, std::move(levels), opt.max_points);
  return walker.run(std::vector<double>(x.begin(), x.end()));
}

}  // namespace coalition_attrib
