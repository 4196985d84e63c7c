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

// Shapley attribution: value functions, exact enumeration over coalitions,
// permutation sampling, DAG-restricted orderings and coalition deltas.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coalition_attrib/causal_graph.hpp"
#include "coalition_attrib/coalition.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/expectation.hpp"
#include "coalition_attrib/expr.hpp"
#include "coalition_attrib/numeric.hpp"
#include "coalition_attrib/parallel.hpp"
#include "coalition_attrib/random.hpp"
#include "coalition_attrib/refdist.hpp"

namespace coalition_attrib {

enum class Backend { kExact, kMonteCarlo };

struct BackendConfig {
  Backend backend = Backend::kExact;
  QuadratureOptions quadrature;
  std::size_t draws = 1000;  // reference draws per v(S), monte-carlo only
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Default cutoffs for exhaustive enumeration; `force` lifts them.
struct EnumerationLimits {
  std::size_t max_features = 25;
  bool force = false;
};

struct ValueFunctionEstimate {
  Coalition coalition;
  double value = 0.0;
  std::string backend;  // "quadrature", "enumeration" or "monte-carlo"
  std::size_t draws = 0;
  std::uint64_t stream_index = 0;
  double standard_error = 0.0;
};

struct AttributionReport {
  std::vector<std::string> features;
  Instance instance;
  double prediction = 0.0;  // f(x)
  double base = 0.0;        // phi_0 = v(empty set)
  std::vector<double> phi;
  std::vector<double> standard_errors;  // sampled estimates only
  std::string mode;       // marginal | conditional | asymmetric | causal
  std::string estimator;  // exact | sampled
  std::string backend;    // quadrature | enumeration | monte-carlo
  std::size_t permutations = 0;
  std::size_t reference_draws = 0;
  std::uint64_t seed = 0;
  std::size_t quadrature_order = 0;
  std::string reference_note;

  double efficiency_residual() const {
    std::vector<double> terms = phi;
    terms.push_back(base);
    return pairwise_sum(terms) - prediction;
  }
};

struct CoalitionDelta {
  Coalition coalition;  // S, never containing the feature
  double delta = 0.0;   // v(S u {j}) - v(S)
  double weight = 0.0;  // |S|! (M - |S| - 1)! / M!
};

struct CoalitionDeltaReport {
  std::string feature;
  std::size_t feature_index = 0;
  std::vector<std::string> features;
  double phi = 0.0;
  std::vector<CoalitionDelta> deltas;
  double tau = 0.0;
  double max_abs_delta = 0.0;
  // phi is near zero (|phi| <= tau) while some delta exceeds tau in size.
  bool cancellation = false;
  std::string mode;
  std::string backend;
};

inline const char* mode_tag(const ReferenceDistribution& ref) {
  switch (ref.mode()) {
    case ReferenceMode::kMarginal: return "marginal";
    case ReferenceMode::kConditionalEmpirical:
    case ReferenceMode::kConditionalGaussian: return "conditional";
    case ReferenceMode::kInterventionalDag: return "causal";
  }
  return "marginal";
}

namespace detail {

inline void check_inputs(const ModelExpr& model, const ReferenceDistribution& ref,
                         const Instance& x) {
  check_instance(ref.schema(), x);
  if (model.feature_count() != ref.schema().size()) {
    throw InvalidArgument("model and reference schemas differ in size");
  }
}

inline void check_limit(std::size_t m, const EnumerationLimits& limits, const char* hint) {
  check_feature_count(m);
  if (m > limits.max_features && !limits.force) {
    throw TooManyFeatures(m, limits.max_features, hint);
  }
}

// Mean of f over imputed rows, with its standard error.
inline std::pair<double, double> monte_carlo_value(const ModelExpr& model,
                                                   const ReferenceDistribution& ref,
                                                   std::span<const double> x, Coalition s,
                                                   std::size_t draws, RandomStream& stream) {
  const RowMatrix rows = impute(ref, s, x, draws, stream);
  std::vector<double> f(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) f[i] = eval_model(model, rows.row(i));
  return {mean(f), standard_error(f)};
}

inline bool covers(Coalition s, const std::vector<bool>& relevant) {
  for (std::size_t j = 0; j < relevant.size(); ++j) {
    if (relevant[j] && !s.contains(j)) return false;
  }
  return true;
}

}  // namespace detail

inline ValueFunctionEstimate value_function(const ModelExpr& model,
                                            const ReferenceDistribution& ref, const Instance& x,
                                            Coalition s, const BackendConfig& cfg = {}) {
  detail::check_inputs(model, ref, x);
  const std::size_t m = x.size();
  if ((s.bits() & ~Coalition::full(m).bits()) != 0) {
    throw InvalidArgument("coalition names features outside the schema");
  }
  ValueFunctionEstimate est;
  est.coalition = s;
  if (cfg.backend == Backend::kExact) {
    est.backend = exact_backend_name(ref);
    est.value = exact_value(model, ref, x.view(), s, cfg.quadrature);
    return est;
  }
  est.backend = "monte-carlo";
  est.draws = cfg.draws;
  est.stream_index = s.bits();
  if (detail::covers(s, relevant_features(model, ref))) {
    est.value = eval_model(model, x.view());
    return est;
  }
  if (cfg.draws == 0) throw InvalidArgument("monte-carlo backend needs draws >= 1");
  RandomStream stream(cfg.seed, "value-function", s.bits());
  auto [v, se] = detail::monte_carlo_value(model, ref, x.view(), s, cfg.draws, stream);
  est.value = v;
  est.standard_error = se;
  return est;
}

// v(S) for every coalition, indexed by bitmask.
inline std::vector<double> value_table(const ModelExpr& model, const ReferenceDistribution& ref,
                                       const Instance& x, const BackendConfig& cfg = {}) {
  detail::check_inputs(model, ref, x);
  const std::size_t m = x.size();
  check_feature_count(m);
  if (m > 30) throw TooManyFeatures(m, 30, "a full value table does not fit in memory");
  const std::size_t count = std::size_t{1} << m;
  std::vector<double> values(count);
  parallel_for(count, cfg.workers, [&](std::size_t mask) {
    values[mask] = value_function(model, ref, x, Coalition(mask), cfg).value;
  });
  return values;
}

// Weighted-coalition form: phi_j = sum_{S not containing j} w(|S|) (v(S+j) - v(S)).
inline std::vector<double> shapley_from_values(std::span<const double> values, std::size_t m) {
  std::vector<double> weight(m);
  for (std::size_t k = 0; k < m; ++k) weight[k] = shapley_weight(k, m);
  std::vector<double> phi(m);
  std::vector<double> terms;
  terms.reserve(values.size() / 2);
  for (std::size_t j = 0; j < m; ++j) {
    terms.clear();
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t s = 0; s < values.size(); ++s) {
      if (s & bit) continue;
      terms.push_back(weight[static_cast<std::size_t>(Coalition(s).size())] *
                      (values[s | bit] - values[s]));
    }
    phi[j] = pairwise_sum(terms);
  }
  return phi;
}

// Size-stratified form: draw |S| uniformly from {0..M-1}, then S uniformly
// among subsets of that size; phi_j is the expected marginal contribution.
inline std::vector<double> shapley_by_size_strata(std::span<const double> values, std::size_t m) {
  std::vector<double> phi(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    std::vector<std::vector<double>> by_size(m);
    for (std::uint64_t s = 0; s < values.size(); ++s) {
      if (s & bit) continue;
      by_size[static_cast<std::size_t>(Coalition(s).size())].push_back(values[s | bit] -
                                                                       values[s]);
    }
    std::vector<double> stratum_means(m);
    for (std::size_t k = 0; k < m; ++k) stratum_means[k] = mean(by_size[k]);
    phi[j] = mean(stratum_means);
  }
  return phi;
}

namespace detail {

inline AttributionReport make_report(const ModelExpr& model, const ReferenceDistribution& ref,
                                     const Instance& x, const char* mode) {
  AttributionReport r;
  r.features = ref.schema().names();
  r.instance = x;
  r.prediction = eval_model(model, x.view());
  r.mode = mode;
  r.reference_note = ref.estimator_note();
  return r;
}

inline void fill_exact_metadata(AttributionReport& r, const ReferenceDistribution& ref,
                                const BackendConfig& cfg) {
  r.estimator = "exact";
  if (cfg.backend == Backend::kExact) {
    r.backend = exact_backend_name(ref);
    if (ref.dataset() == nullptr) r.quadrature_order = cfg.quadrature.order;
  } else {
    r.backend = "monte-carlo";
    r.reference_draws = cfg.draws;
    r.seed = cfg.seed;
  }
}

}  // namespace detail

// Exact Shapley values from all 2^M coalition values.
inline AttributionReport exact_shapley(const ModelExpr& model, const ReferenceDistribution& ref,
                                       const Instance& x, const BackendConfig& cfg = {},
                                       const EnumerationLimits& limits = {}) {
  detail::check_inputs(model, ref, x);
  const std::size_t m = x.size();
  detail::check_limit(m, limits, "use sampled_shapley for this many features");
  const std::vector<double> values = value_table(model, ref, x, cfg);
  AttributionReport r = detail::make_report(model, ref, x, mode_tag(ref));
  detail::fill_exact_metadata(r, ref, cfg);
  r.base = values[0];
  r.phi = shapley_from_values(values, m);
  return r;
}

// ---------------------------------------------------------------------------
// Orderings

// Counts linear extensions of a DAG restricted to the sets that can occur as
// prefixes of an admissible ordering (down-sets).
class LinearExtensionCounter {
 public:
  explicit LinearExtensionCounter(const CausalGraph& graph) : m_(graph.size()) {
    check_feature_count(m_);
    parent_masks_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) parent_masks_[j] = graph.parent_mask(j);
    // Breadth-first over down-sets, so `downsets_` is ordered by size.
    std::unordered_map<std::uint64_t, std::size_t> index;
    downsets_.push_back(0);
    index.emplace(0, 0);
    for (std::size_t head = 0; head < downsets_.size(); ++head) {
      const std::uint64_t d = downsets_[head];
      for (std::size_t j = 0; j < m_; ++j) {
        if (!available(d, j)) continue;
        const std::uint64_t next = d | (std::uint64_t{1} << j);
        if (index.emplace(next, downsets_.size()).second) downsets_.push_back(next);
      }
    }
    prefix_.assign(downsets_.size(), 0.0);
    suffix_.assign(downsets_.size(), 0.0);
    prefix_[0] = 1.0;
    for (std::size_t i = 0; i < downsets_.size(); ++i) {
      const std::uint64_t d = downsets_[i];
      for (std::size_t j = 0; j < m_; ++j) {
        if (available(d, j)) prefix_[index.at(d | (std::uint64_t{1} << j))] += prefix_[i];
      }
    }
    for (std::size_t i = downsets_.size(); i-- > 0;) {
      const std::uint64_t d = downsets_[i];
      double total = 0.0;
      bool any = false;
      for (std::size_t j = 0; j < m_; ++j) {
        if (!available(d, j)) continue;
        any = true;
        total += suffix_[index.at(d | (std::uint64_t{1} << j))];
      }
      suffix_[i] = any ? total : 1.0;
    }
    index_ = std::move(index);
  }

  std::size_t size() const { return m_; }
  const std::vector<std::uint64_t>& downsets() const { return downsets_; }
  bool available(std::uint64_t placed, std::size_t j) const {
    return !((placed >> j) & 1u) && (parent_masks_[j] & ~placed) == 0;
  }
  // Number of admissible orderings of the features in `downset`.
  double prefix_count(std::uint64_t downset) const { return prefix_[index_.at(downset)]; }
  // Number of admissible ways to order the features outside `downset`.
  double suffix_count(std::uint64_t downset) const { return suffix_[index_.at(downset)]; }
  double total() const { return suffix_[0]; }

  // Uniformly random linear extension.
  std::vector<std::size_t> sample(RandomStream& stream) const {
    std::vector<std::size_t> order;
    order.reserve(m_);
    std::uint64_t placed = 0;
    for (std::size_t step = 0; step < m_; ++step) {
      double r = stream.uniform() * suffix_count(placed);
      std::size_t chosen = m_;
      std::size_t last = m_;
      for (std::size_t j = 0; j < m_; ++j) {
        if (!available(placed, j)) continue;
        last = j;
        const double c = suffix_count(placed | (std::uint64_t{1} << j));
        if (r < c) {
          chosen = j;
          break;
        }
        r -= c;
      }
      if (chosen == m_) chosen = last;
      order.push_back(chosen);
      placed |= std::uint64_t{1} << chosen;
    }
    return order;
  }

 private:
  std::size_t m_;
  std::vector<std::uint64_t> parent_masks_;
  std::vector<std::uint64_t> downsets_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

inline std::vector<std::size_t> random_permutation(std::size_t m, RandomStream& stream) {
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) {
    const auto k = static_cast<std::size_t>(stream.below(i));
    std::swap(order[i - 1], order[k]);
  }
  return order;
}

struct SamplingOptions {
  std::size_t permutations = 1000;
  std::size_t reference_draws = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

namespace detail {

// Walks each sampled ordering, estimating every v(S) along it from
// `reference_draws` imputed rows. Consecutive estimates are shared, so each
// ordering's contributions telescope to f(x) - v_hat(empty).
inline AttributionReport permutation_estimate(const ModelExpr& model,
                                              const ReferenceDistribution& ref,
                                              const Instance& x, const SamplingOptions& opt,
                                              const LinearExtensionCounter* orderings,
                                              const char* mode) {
  check_inputs(model, ref, x);
  if (opt.permutations == 0) throw InvalidArgument("permutations must be >= 1");
  if (opt.reference_draws == 0) throw InvalidArgument("reference draws must be >= 1");
  const std::size_t m = x.size();
  check_feature_count(m);
  const std::vector<bool> relevant = relevant_features(model, ref);
  const double fx = eval_model(model, x.view());
  const std::size_t p_count = opt.permutations;
  std::vector<double> contrib(p_count * m, 0.0);
  std::vector<double> bases(p_count, 0.0);

  parallel_for(p_count, opt.workers, [&](std::size_t p) {
    RandomStream order_stream(opt.seed, "permutation", p);
    const std::vector<std::size_t> order =
        orderings ? orderings->sample(order_stream) : random_permutation(m, order_stream);
    // Every step restarts the same imputation stream (common random numbers),
    // so a step's delta compares coalitions on matched reference draws.
    auto estimate = [&](Coalition s) {
      if (covers(s, relevant)) return fx;
      RandomStream draw_stream(opt.seed, "imputation", p);
      return monte_carlo_value(model, ref, x.view(), s, opt.reference_draws, draw_stream).first;
    };
    Coalition s;
    double prev = estimate(s);
    bases[p] = prev;
    for (std::size_t j : order) {
      s = s.with(j);
      const double next = estimate(s);
      contrib[p * m + j] = next - prev;
      prev = next;
    }
  });

  AttributionReport r = make_report(model, ref, x, mode);
  r.estimator = "sampled";
  r.backend = "monte-carlo";
  r.permutations = p_count;
  r.reference_draws = opt.reference_draws;
  r.seed = opt.seed;
  r.base = mean(bases);
  r.phi.resize(m);
  r.standard_errors.resize(m);
  std::vector<double> column(p_count);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t p = 0; p < p_count; ++p) column[p] = contrib[p * m + j];
    r.phi[j] = mean(column);
    r.standard_errors[j] = standard_error(column);
  }
  return r;
}

}  // namespace detail

// Monte Carlo Shapley values over uniformly random feature orderings.
inline AttributionReport sampled_shapley(const ModelExpr& model, const ReferenceDistribution& ref,
                                         const Instance& x, const SamplingOptions& opt = {}) {
  return detail::permutation_estimate(model, ref, x, opt, nullptr, mode_tag(ref));
}

struct OrderingOptions {
  bool exact = true;
  BackendConfig backend;       // value backend for exact mode
  SamplingOptions sampling;    // used when exact == false
  EnumerationLimits limits{10, false};
};

// Shapley values averaged over the orderings in which every causal ancestor
// precedes its descendants, with conditioning by observation.
inline AttributionReport asymmetric_shapley(const ModelExpr& model,
                                            const ReferenceDistribution& ref, const Instance& x,
                                            const CausalGraph& graph,
                                            const OrderingOptions& opt = {}) {
  detail::check_inputs(model, ref, x);
  if (!ref.is_conditional()) {
    throw InvalidArgument("asymmetric Shapley values need a conditional reference");
  }
  const std::size_t m = x.size();
  if (graph.size() != m) throw GraphSchemaMismatch("graph and schema differ in size");
  if (!opt.exact) {
    detail::check_limit(m, EnumerationLimits{25, opt.limits.force},
                        "too many features to index orderings");
    const LinearExtensionCounter counter(graph);
    return detail::permutation_estimate(model, ref, x, opt.sampling, &counter, "asymmetric");
  }
  detail::check_limit(m, opt.limits, "use sampled mode for this many features");
  const LinearExtensionCounter counter(graph);
  const auto& downsets = counter.downsets();
  std::vector<double> values(downsets.size());
  parallel_for(downsets.size(), opt.backend.workers, [&](std::size_t i) {
    values[i] = value_function(model, ref, x, Coalition(downsets[i]), opt.backend).value;
  });
  std::unordered_map<std::uint64_t, double> value_of;
  for (std::size_t i = 0; i < downsets.size(); ++i) value_of.emplace(downsets[i], values[i]);

  AttributionReport r = detail::make_report(model, ref, x, "asymmetric");
  detail::fill_exact_metadata(r, ref, opt.backend);
  r.base = value_of.at(0);
  r.phi.resize(m);
  const double total = counter.total();
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> terms;
    for (std::uint64_t d : downsets) {
      if (!counter.available(d, j)) continue;
      const std::uint64_t with = d | (std::uint64_t{1} << j);
      const double w = counter.prefix_count(d) * counter.suffix_count(with) / total;
      terms.push_back(w * (value_of.at(with) - value_of.at(d)));
    }
    r.phi[j] = pairwise_sum(terms);
  }
  return r;
}

// Shapley values (all orderings) whose value function conditions by
// intervention over the reference's causal graph.
inline AttributionReport causal_shapley(const ModelExpr& model, const ReferenceDistribution& ref,
                                        const Instance& x, const OrderingOptions& opt = {}) {
  if (ref.mode() != ReferenceMode::kInterventionalDag) {
    throw InvalidArgument("causal Shapley values need an interventional reference");
  }
  if (!opt.exact) return sampled_shapley(model, ref, x, opt.sampling);
  return exact_shapley(model, ref, x, opt.backend, EnumerationLimits{25, opt.limits.force});
}

struct DeltaOptions {
  // Cancellation threshold; default 0.05 * max |v(S)| over all coalitions.
  std::optional<double> tau;
  EnumerationLimits limits;
};

// All 2^(M-1) marginal contributions of feature j with their Shapley weights.
inline CoalitionDeltaReport coalition_deltas(const ModelExpr& model,
                                             const ReferenceDistribution& ref, const Instance& x,
                                             std::size_t j, const BackendConfig& cfg = {},
                                             const DeltaOptions& opt = {}) {
  detail::check_inputs(model, ref, x);
  const std::size_t m = x.size();
  if (j >= m) throw InvalidArgument("feature index out of range");
  detail::check_limit(m, opt.limits, "too many coalitions to list");
  const std::vector<double> values = value_table(model, ref, x, cfg);
  CoalitionDeltaReport r;
  r.features = ref.schema().names();
  r.feature = r.features[j];
  r.feature_index = j;
  r.mode = mode_tag(ref);
  r.backend = cfg.backend == Backend::kExact ? exact_backend_name(ref) : "monte-carlo";
  const std::uint64_t bit = std::uint64_t{1} << j;
  std::vector<double> terms;
  for (std::uint64_t s = 0; s < values.size(); ++s) {
    if (s & bit) continue;
    CoalitionDelta d;
    d.coalition = Coalition(s);
    d.delta = values[s | bit] - values[s];
    d.weight = shapley_weight(static_cast<std::size_t>(d.coalition.size()), m);
    terms.push_back(d.weight * d.delta);
    r.max_abs_delta = std::max(r.max_abs_delta, std::abs(d.delta));
    r.deltas.push_back(d);
  }
  r.phi = pairwise_sum(terms);
  double max_v = 0.0;
  for (double v : values) max_v = std::max(max_v, std::abs(v));
  r.tau = opt.tau ? *opt.tau : 0.05 * max_v;
  if (r.tau < 0.0) throw InvalidArgument("tau must be >= 0");
  r.cancellation = std::abs(r.phi) <= r.tau && r.max_abs_delta > r.tau;
  return r;
}

}  // namespace coalition_attrib
