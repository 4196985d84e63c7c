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

// Audits built on the engine: a counterfactual-fairness screen, a
// marginal-vs-conditional comparison and a property validator.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "coalition_attrib/data.hpp"
#include "coalition_attrib/engine.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/expr.hpp"
#include "coalition_attrib/parallel.hpp"
#include "coalition_attrib/random.hpp"
#include "coalition_attrib/refdist.hpp"

namespace coalition_attrib {

inline constexpr const char* kFairnessCaveat =
    "necessary condition only — not a fairness certificate";
inline constexpr const char* kVerdictFail = "FAIL-NECESSARY-CONDITION";
inline constexpr const char* kVerdictPass = "PASS-NECESSARY-CONDITION";

struct FairnessScreenOptions {
  double tolerance = 1e-6;
  std::size_t max_rows = 200;  // larger datasets are screened on a seeded subset
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  QuadratureOptions quadrature;
  EnumerationLimits limits;
};

struct FairnessScreenResult {
  std::string sensitive;
  std::size_t sensitive_index = 0;
  double tolerance = 0.0;
  std::vector<std::size_t> rows;  // dataset row indices screened (0-based)
  std::vector<double> phi;        // marginal phi_sensitive per screened row
  double max_abs_phi = 0.0;
  std::string verdict;
  std::string caveat = kFairnessCaveat;
  bool subsampled = false;

  bool passed() const { return verdict == kVerdictPass; }
};

namespace detail {

// `count` distinct row indices, sorted; all rows when count >= n.
inline std::vector<std::size_t> choose_rows(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (count >= n) return idx;
  RandomStream stream(seed, "fairness-rows", 0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto k = i + static_cast<std::size_t>(stream.below(n - i));
    std::swap(idx[i], idx[k]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

// Exact marginal attribution of the sensitive feature at each dataset row,
// with the dataset itself as the reference population. Zero attribution
// everywhere is necessary for counterfactual fairness but not sufficient.
inline FairnessScreenResult counterfactual_fairness_screen(
    const ModelExpr& model, std::shared_ptr<const Dataset> data, const std::string& sensitive,
    const FairnessScreenOptions& opt = {}) {
  if (!data) throw InvalidArgument("fairness screen needs a dataset");
  if (!(opt.tolerance >= 0.0)) throw InvalidArgument("tolerance must be >= 0");
  if (opt.max_rows == 0) throw InvalidArgument("max_rows must be >= 1");
  const std::size_t j = data->schema().index_of(sensitive);
  const ReferenceDistribution ref = ReferenceDistribution::marginal(data);
  FairnessScreenResult r;
  r.sensitive = sensitive;
  r.sensitive_index = j;
  r.tolerance = opt.tolerance;
  r.rows = detail::choose_rows(data->rows(), opt.max_rows, opt.seed);
  r.subsampled = r.rows.size() < data->rows();
  r.phi.resize(r.rows.size());
  BackendConfig cfg;
  cfg.quadrature = opt.quadrature;
  parallel_for(r.rows.size(), opt.workers, [&](std::size_t i) {
    r.phi[i] = exact_shapley(model, ref, data->instance(r.rows[i]), cfg, opt.limits).phi[j];
  });
  for (double p : r.phi) r.max_abs_phi = std::max(r.max_abs_phi, std::abs(p));
  r.verdict = r.max_abs_phi > opt.tolerance ? kVerdictFail : kVerdictPass;
  return r;
}

struct ModeComparisonOptions {
  double threshold = 1e-6;
  BackendConfig backend;
  EnumerationLimits limits;
};

struct InstanceComparison {
  Instance instance;
  std::vector<double> phi_marginal;
  std::vector<double> phi_conditional;
  std::vector<double> gap;
};

struct ModeComparisonReport {
  std::vector<std::string> features;
  double threshold = 0.0;
  std::vector<InstanceComparison> instances;
  std::vector<double> max_gap;  // per feature, over instances
  double aggregate_max_gap = 0.0;
  std::vector<std::string> flagged;
  std::string conditional_note;
};

// Exact attributions of one model under a marginal and a conditional
// reference, instance by instance, with absolute gaps per feature.
inline ModeComparisonReport compare_modes(const ModelExpr& model,
                                          const ReferenceDistribution& marginal_ref,
                                          const ReferenceDistribution& conditional_ref,
                                          const std::vector<Instance>& instances,
                                          const ModeComparisonOptions& opt = {}) {
  if (!(marginal_ref.schema() == conditional_ref.schema())) {
    throw InvalidArgument("compared references must share a schema");
  }
  if (!(opt.threshold >= 0.0)) throw InvalidArgument("threshold must be >= 0");
  const std::size_t m = marginal_ref.schema().size();
  ModeComparisonReport r;
  r.features = marginal_ref.schema().names();
  r.threshold = opt.threshold;
  r.conditional_note = conditional_ref.estimator_note();
  r.max_gap.assign(m, 0.0);
  for (const Instance& x : instances) {
    InstanceComparison c;
    c.instance = x;
    c.phi_marginal = exact_shapley(model, marginal_ref, x, opt.backend, opt.limits).phi;
    c.phi_conditional = exact_shapley(model, conditional_ref, x, opt.backend, opt.limits).phi;
    c.gap.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      c.gap[j] = std::abs(c.phi_marginal[j] - c.phi_conditional[j]);
      r.max_gap[j] = std::max(r.max_gap[j], c.gap[j]);
    }
    r.instances.push_back(std::move(c));
  }
  for (std::size_t j = 0; j < m; ++j) {
    r.aggregate_max_gap = std::max(r.aggregate_max_gap, r.max_gap[j]);
    if (r.max_gap[j] > opt.threshold) r.flagged.push_back(r.features[j]);
  }
  return r;
}

enum class CheckStatus { kPass, kFail, kNotApplicable };

inline const char* check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kNotApplicable: return "not applicable";
  }
  return "fail";
}

struct PropertyCheck {
  std::string property;  // efficiency | symmetry | linearity | dummy
  CheckStatus status = CheckStatus::kNotApplicable;
  double max_residual = 0.0;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool all_passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const PropertyCheck& c) { return c.status == CheckStatus::kFail; });
  }
  const PropertyCheck& check(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.property == name) return c;
    }
    throw InvalidArgument("no property check named '" + name + "'");
  }
};

struct ValidateOptions {
  std::uint64_t seed = 0;
  // Residuals are compared against tolerance * max(1, |scale|), where scale is
  // the largest magnitude among the quantities being compared.
  double tolerance = 1e-9;
  std::size_t probes = 64;  // random points used to detect interchangeable features
  BackendConfig backend;
  EnumerationLimits limits;
};

namespace detail {

inline bool same_law(const Law& a, const Law& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& la) {
        using L = std::decay_t<decltype(la)>;
        const L& lb = std::get<L>(b);
        if constexpr (std::is_same_v<L, UniformLaw>) return la.a == lb.a && la.b == lb.b;
        if constexpr (std::is_same_v<L, NormalLaw>) return la.mean == lb.mean && la.sd == lb.sd;
        if constexpr (std::is_same_v<L, BernoulliLaw>) return la.p == lb.p;
      },
      a);
}

// Reference population invariant under swapping features i and k.
inline bool swap_invariant_reference(const ReferenceDistribution& ref, std::size_t i,
                                     std::size_t k) {
  const FeatureSchema& schema = ref.schema();
  if (!(schema[i].kind == schema[k].kind && schema[i].levels == schema[k].levels)) return false;
  if (ref.graph() && ref.graph()->has_edges()) return false;
  if (const ParametricSpec* spec = ref.parametric()) {
    if (!same_law(spec->law(i), spec->law(k))) return false;
    if (!spec->joint_gaussian()) return true;
    const Eigen::MatrixXd& c = spec->covariance();
    const auto n = c.rows();
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::swap(perm[i], perm[k]);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        if (c(a, b) != c(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)])) {
          return false;
        }
      }
    }
    return true;
  }
  const Dataset& data = *ref.dataset();
  if (ref.mode() == ReferenceMode::kConditionalEmpirical &&
      ref.kernel().bandwidth(i) != ref.kernel().bandwidth(k)) {
    return false;
  }
  // The weighted multiset of rows must be unchanged by the column swap.
  auto key = [&](std::size_t r, bool swapped) {
    std::vector<double> row(data.row(r).begin(), data.row(r).end());
    if (swapped) std::swap(row[i], row[k]);
    row.push_back(data.weight(r));
    return row;
  };
  std::vector<std::vector<double>> a, b;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    a.push_back(key(r, false));
    b.push_back(key(r, true));
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// f(z) == f(z with i and k swapped) on the instance and on seeded probe rows.
inline bool interchangeable_in_model(const ModelExpr& model, const ReferenceDistribution& ref,
                                     const std::vector<Instance>& instances, std::size_t i,
                                     std::size_t k, const ValidateOptions& opt) {
  RandomStream stream(opt.seed, "symmetry-probe", i * kMaxFeatures + k);
  const RowMatrix probes = impute(ref, Coalition(), instances.front().view(), opt.probes, stream);
  auto agrees = [&](std::vector<double> z) {
    const double a = eval_model(model, z);
    std::swap(z[i], z[k]);
    return a == eval_model(model, z);
  };
  for (std::size_t r = 0; r < probes.rows(); ++r) {
    if (!agrees({probes.row(r).begin(), probes.row(r).end()})) return false;
  }
  for (const Instance& x : instances) {
    if (!agrees(x.values)) return false;
  }
  return true;
}

inline double scaled(double residual, double scale) { return residual / std::max(1.0, scale); }

// Auxiliary model g = sum_j (j+1) x_j + x_0 * x_{M-1} for the linearity check.
inline ModelExpr auxiliary_model(const FeatureSchema& schema) {
  const std::size_t m = schema.size();
  auto ref = [&](std::size_t j) { return feature(schema, schema[j].name); };
  NodePtr sum;
  for (std::size_t j = 0; j < m; ++j) {
    NodePtr term = binary(BinaryOp::kMul, constant(static_cast<double>(j + 1)), ref(j));
    sum = sum ? binary(BinaryOp::kAdd, sum, term) : term;
  }
  sum = binary(BinaryOp::kAdd, sum, binary(BinaryOp::kMul, ref(0), ref(m - 1)));
  return ModelExpr(sum, m);
}

}  // namespace detail

// Checks efficiency, symmetry, linearity and dummy on exact attributions.
inline PropertyReport validate_properties(const ModelExpr& model, const ReferenceDistribution& ref,
                                          const std::vector<Instance>& instances,
                                          const ValidateOptions& opt = {}) {
  const std::size_t m = ref.schema().size();
  PropertyReport report;
  if (instances.empty()) throw InvalidArgument("validate_properties needs at least one instance");
  std::vector<AttributionReport> base;
  for (const Instance& x : instances) base.push_back(exact_shapley(model, ref, x, opt.backend, opt.limits));

  {  // efficiency
    PropertyCheck c{"efficiency", CheckStatus::kPass, 0.0, ""};
    double worst = 0.0;
    for (const auto& r : base) {
      const double res = std::abs(r.efficiency_residual());
      c.max_residual = std::max(c.max_residual, res);
      worst = std::max(worst, detail::scaled(res, std::abs(r.prediction)));
    }
    if (worst > opt.tolerance) c.status = CheckStatus::kFail;
    c.detail = "|base + sum(phi) - f(x)| over " + std::to_string(instances.size()) + " instance(s)";
    report.checks.push_back(c);
  }

  {  // symmetry
    PropertyCheck c{"symmetry", CheckStatus::kNotApplicable, 0.0, ""};
    std::size_t pairs = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = i + 1; k < m; ++k) {
        if (!detail::swap_invariant_reference(ref, i, k)) continue;
        if (!detail::interchangeable_in_model(model, ref, instances, i, k, opt)) continue;
        ++pairs;
        for (const Instance& x : instances) {
          Instance sym = x;
          sym.values[k] = sym.values[i];
          const auto r = exact_shapley(model, ref, sym, opt.backend, opt.limits);
          const double res = std::abs(r.phi[i] - r.phi[k]);
          c.max_residual = std::max(c.max_residual, res);
          worst = std::max(worst, detail::scaled(res, std::max(std::abs(r.phi[i]), std::abs(r.phi[k]))));
        }
      }
    }
    if (pairs == 0) {
      c.detail = "no interchangeable feature pair with identical reference laws";
    } else {
      c.status = worst > opt.tolerance ? CheckStatus::kFail : CheckStatus::kPass;
      c.detail = std::to_string(pairs) + " interchangeable pair(s), checked at x with x_k := x_i";
    }
    report.checks.push_back(c);
  }

  {  // linearity: phi(a f + b g) == a phi(f) + b phi(g)
    constexpr double a = 2.0;
    constexpr double b = -3.0;
    PropertyCheck c{"linearity", CheckStatus::kPass, 0.0, ""};
    const ModelExpr g = detail::auxiliary_model(ref.schema());
    const ModelExpr h(binary(BinaryOp::kAdd, binary(BinaryOp::kMul, constant(a), model.root_ptr()),
                             binary(BinaryOp::kMul, constant(b), g.root_ptr())),
                      m);
    double worst = 0.0;
    for (std::size_t n = 0; n < instances.size(); ++n) {
      const auto& x = instances[n];
      const auto rg = exact_shapley(g, ref, x, opt.backend, opt.limits);
      const auto rh = exact_shapley(h, ref, x, opt.backend, opt.limits);
      for (std::size_t j = 0; j <= m; ++j) {
        const double pf = j < m ? base[n].phi[j] : base[n].base;
        const double pg = j < m ? rg.phi[j] : rg.base;
        const double ph = j < m ? rh.phi[j] : rh.base;
        const double expect = a * pf + b * pg;
        const double res = std::abs(ph - expect);
        c.max_residual = std::max(c.max_residual, res);
        worst = std::max(worst, detail::scaled(res, std::max({std::abs(a * pf), std::abs(b * pg),
                                                             std::abs(ph)})));
      }
    }
    if (worst > opt.tolerance) c.status = CheckStatus::kFail;
    c.detail = "phi and base of 2*f - 3*g against g = " + to_string(g);
    report.checks.push_back(c);
  }

  {  // dummy
    PropertyCheck c{"dummy", CheckStatus::kNotApplicable, 0.0, ""};
    const std::vector<bool> referenced = referenced_mask(model);
    std::vector<std::size_t> dummies;
    for (std::size_t j = 0; j < m; ++j) {
      if (!referenced[j]) dummies.push_back(j);
    }
    if (dummies.empty()) {
      c.detail = "every feature is referenced by the model";
    } else if (ref.is_conditional()) {
      c.detail =
          "conditional reference: a feature outside the model can carry attribution through "
          "its dependence on model features";
    } else {
      const std::vector<bool> relevant = relevant_features(model, ref);
      std::vector<std::size_t> checked;
      for (std::size_t j : dummies) {
        if (!relevant[j]) checked.push_back(j);
      }
      if (checked.empty()) {
        c.detail = "every unreferenced feature is a causal ancestor of a model feature";
      } else {
        c.status = CheckStatus::kPass;
        for (const auto& r : base) {
          for (std::size_t j : checked) {
            c.max_residual = std::max(c.max_residual, std::abs(r.phi[j]));
          }
        }
        if (c.max_residual != 0.0) c.status = CheckStatus::kFail;
        c.detail = "phi_j == 0 exactly for " + std::to_string(checked.size()) +
                   " unreferenced feature(s)";
        if (checked.size() < dummies.size()) {
          c.detail += "; causal ancestors of model features not applicable";
        }
      }
    }
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace coalition_attrib
