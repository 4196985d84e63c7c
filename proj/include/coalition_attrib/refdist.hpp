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

// Reference distributions used to impute the features a coalition drops.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coalition_attrib/causal_graph.hpp"
#include "coalition_attrib/coalition.hpp"
#include "coalition_attrib/data.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/gaussian.hpp"
#include "coalition_attrib/random.hpp"
#include "coalition_attrib/schema.hpp"

namespace coalition_attrib {

enum class ReferenceMode {
  kMarginal,
  kConditionalEmpirical,
  kConditionalGaussian,
  kInterventionalDag,
};

inline const char* reference_mode_name(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::kMarginal: return "marginal";
    case ReferenceMode::kConditionalEmpirical: return "conditional-empirical";
    case ReferenceMode::kConditionalGaussian: return "conditional-gaussian";
    case ReferenceMode::kInterventionalDag: return "interventional-dag";
  }
  return "marginal";
}

using DatasetPtr = std::shared_ptr<const Dataset>;
using ParametricPtr = std::shared_ptr<const ParametricSpec>;
using Source = std::variant<DatasetPtr, ParametricPtr>;

// Kernel estimator settings for conditioning on a dataset. Unset values take
// the documented defaults: Silverman bandwidth 1.06 * sd * n^(-1/5) per
// continuous feature and k = max(20, ceil(sqrt(n))) neighbours.
struct KernelOptions {
  std::optional<double> bandwidth;             // applies to every continuous feature
  std::map<std::string, double> bandwidths;    // per-feature overrides
  std::optional<std::size_t> neighbors;
};

// Row weights for sampling from the dataset conditionally on the features in
// `given` taking the values in `x`: exact match for binary/categorical
// features, Gaussian kernel for continuous ones, then restricted to the rows
// whose weight reaches the k-th largest (ties kept). Weights are normalized so
// the largest is 1.
class KernelConditioner {
 public:
  KernelConditioner() = default;

  KernelConditioner(DatasetPtr data, const KernelOptions& options) : data_(std::move(data)) {
    const std::size_t n = data_->rows();
    const std::size_t m = data_->cols();
    bandwidth_.assign(m, 0.0);
    const auto& schema = data_->schema();
    for (const auto& [name, h] : options.bandwidths) {
      if (!schema.find(name)) throw UnknownFeature(name);
      if (!(h > 0.0)) throw InvalidArgument("bandwidth for '" + name + "' must be > 0");
    }
    if (options.bandwidth && !(*options.bandwidth > 0.0)) {
      throw InvalidArgument("bandwidth must be > 0");
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (schema[j].kind != FeatureKind::kContinuous) continue;
      auto it = options.bandwidths.find(schema[j].name);
      if (it != options.bandwidths.end()) {
        bandwidth_[j] = it->second;
      } else if (options.bandwidth) {
        bandwidth_[j] = *options.bandwidth;
      } else {
        const double sd = data_->column_sd(j);
        const double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
        bandwidth_[j] = h > 0.0 ? h : 1.0;
      }
    }
    if (options.neighbors) {
      if (*options.neighbors == 0) throw InvalidArgument("neighbor count must be >= 1");
      neighbors_ = *options.neighbors;
    } else {
      neighbors_ = std::max<std::size_t>(
          20, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
    }
  }

  double bandwidth(std::size_t j) const { return bandwidth_[j]; }
  std::size_t neighbors() const { return neighbors_; }

  std::vector<double> weights(const std::vector<std::size_t>& given,
                              std::span<const double> x) const {
    const std::size_t n = data_->rows();
    const auto& schema = data_->schema();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double rw = data_->weight(i);
      double lw = rw > 0.0 ? std::log(rw) : kNegInf;
      for (std::size_t j : given) {
        if (lw == kNegInf) break;
        const double r = (*data_)(i, j);
        if (schema[j].kind == FeatureKind::kContinuous) {
          const double z = (r - x[j]) / bandwidth_[j];
          lw += -0.5 * z * z;
        } else if (r != x[j]) {
          lw = kNegInf;
        }
      }
      logw[i] = lw;
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    if (top == kNegInf) {
      throw NoSupport("no reference row matches the conditioning values");
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = logw[i] == kNegInf ? 0.0 : std::exp(logw[i] - top);
    if (!given.empty() && neighbors_ < n) {
      std::vector<double> sorted = w;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(neighbors_ - 1),
                       sorted.end(), std::greater<>());
      const double cutoff = sorted[neighbors_ - 1];
      for (double& v : w) {
        if (v < cutoff) v = 0.0;
      }
    }
    return w;
  }

 private:
  DatasetPtr data_;
  std::vector<double> bandwidth_;
  std::size_t neighbors_ = 20;
};

// Weighted categorical draw over indices with nonnegative weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights) : cumulative_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cumulative_[i] = acc;
    }
    total_ = acc;
    if (!(total_ > 0.0)) throw NoSupport("all conditional weights are zero");
  }

  std::size_t draw(RandomStream& stream) const {
    const double u = stream.uniform() * total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
    if (idx >= cumulative_.size()) idx = cumulative_.size() - 1;
    while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
    return idx;
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

// The law p~ used to fill in dropped features, in one of four semantics.
class ReferenceDistribution {
 public:
  static ReferenceDistribution marginal(Source source) {
    return ReferenceDistribution(ReferenceMode::kMarginal, std::move(source));
  }

  static ReferenceDistribution conditional_empirical(DatasetPtr data,
                                                     const KernelOptions& options = {}) {
    ReferenceDistribution r(ReferenceMode::kConditionalEmpirical, data);
    r.kernel_ = KernelConditioner(data, options);
    return r;
  }

  // Exact conditioning of a joint Gaussian: the given covariance of a
  // parametric spec, or moments fitted to a dataset. For a parametric spec
  // without covariance the features are independent and conditioning leaves
  // the product of marginals unchanged.
  static ReferenceDistribution conditional_gaussian(Source source) {
    ReferenceDistribution r(ReferenceMode::kConditionalGaussian, std::move(source));
    if (const auto* d = std::get_if<DatasetPtr>(&r.source_)) {
      r.fit_gaussian(**d);
    } else {
      const auto& spec = *std::get<ParametricPtr>(r.source_);
      if (spec.joint_gaussian()) {
        r.gauss_mean_ = spec.mean();
        r.gauss_cov_ = spec.covariance();
        r.has_gaussian_ = true;
      }
    }
    return r;
  }

  static ReferenceDistribution interventional_dag(Source source, CausalGraph graph,
                                                  const KernelOptions& options = {}) {
    ReferenceDistribution r(ReferenceMode::kInterventionalDag, std::move(source));
    if (graph.size() != r.schema().size()) {
      throw GraphSchemaMismatch("graph and reference schema differ in size");
    }
    r.graph_ = std::move(graph);
    if (const auto* d = std::get_if<DatasetPtr>(&r.source_)) {
      r.kernel_ = KernelConditioner(*d, options);
    } else {
      const auto& spec = *std::get<ParametricPtr>(r.source_);
      if (spec.joint_gaussian()) {
        r.gauss_mean_ = spec.mean();
        r.gauss_cov_ = spec.covariance();
        r.has_gaussian_ = true;
      }
    }
    return r;
  }

  ReferenceMode mode() const { return mode_; }
  const Source& source() const { return source_; }
  const FeatureSchema& schema() const {
    if (const auto* d = std::get_if<DatasetPtr>(&source_)) return (*d)->schema();
    return std::get<ParametricPtr>(source_)->schema();
  }
  const Dataset* dataset() const {
    const auto* d = std::get_if<DatasetPtr>(&source_);
    return d ? d->get() : nullptr;
  }
  const ParametricSpec* parametric() const {
    const auto* p = std::get_if<ParametricPtr>(&source_);
    return p ? p->get() : nullptr;
  }
  const std::optional<CausalGraph>& graph() const { return graph_; }
  const KernelConditioner& kernel() const { return kernel_; }
  bool has_gaussian() const { return has_gaussian_; }
  const Eigen::VectorXd& gaussian_mean() const { return gauss_mean_; }
  const Eigen::MatrixXd& gaussian_cov() const { return gauss_cov_; }

  bool is_conditional() const {
    return mode_ == ReferenceMode::kConditionalEmpirical ||
           mode_ == ReferenceMode::kConditionalGaussian;
  }

  // Human-readable description of the conditional estimator, carried into
  // reports so readers know conditional values depend on this choice.
  std::string estimator_note() const {
    switch (mode_) {
      case ReferenceMode::kMarginal:
        return "marginal: dropped features drawn from the source joint, ignoring the instance";
      case ReferenceMode::kConditionalEmpirical:
        return "conditional (kernel estimator): exact match on binary/categorical features, "
               "Gaussian kernel on continuous features, restricted to the top-" +
               std::to_string(kernel_.neighbors()) + " weighted rows";
      case ReferenceMode::kConditionalGaussian:
        return has_gaussian_ ? "conditional (Gaussian): exact conditional normal of the joint Gaussian"
                             : "conditional (independent parametric laws): equals the marginal";
      case ReferenceMode::kInterventionalDag:
        return "interventional: ancestral sampling over the causal graph with in-coalition "
               "features clamped; root features drawn jointly from the source, other features "
               "from their conditional given parents";
    }
    return {};
  }

 private:
  ReferenceDistribution(ReferenceMode mode, Source source)
      : mode_(mode), source_(std::move(source)) {
    std::visit([](const auto& p) {
      if (!p) throw InvalidArgument("reference source is null");
    }, source_);
    check_feature_count(schema().size());
  }

  void fit_gaussian(const Dataset& d) {
    const auto m = static_cast<Eigen::Index>(d.cols());
    gauss_mean_.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) gauss_mean_[j] = d.column_mean(static_cast<std::size_t>(j));
    gauss_cov_ = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      const double w = d.weight(i) / d.total_weight();
      for (Eigen::Index a = 0; a < m; ++a) {
        const double da = d(i, static_cast<std::size_t>(a)) - gauss_mean_[a];
        for (Eigen::Index b = 0; b < m; ++b) {
          gauss_cov_(a, b) += w * da * (d(i, static_cast<std::size_t>(b)) - gauss_mean_[b]);
        }
      }
    }
    has_gaussian_ = true;
  }

  ReferenceMode mode_;
  Source source_;
  KernelConditioner kernel_;
  std::optional<CausalGraph> graph_;
  bool has_gaussian_ = false;
  Eigen::VectorXd gauss_mean_;
  Eigen::MatrixXd gauss_cov_;
};

// ---------------------------------------------------------------------------
// Imputation

namespace detail {

inline void clamp_coalition(RowMatrix& rows, Coalition s, std::span<const double> x) {
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    auto r = rows.row(i);
    for (std::size_t j = 0; j < rows.cols(); ++j) {
      if (s.contains(j)) r[j] = x[j];
    }
  }
}

inline void check_impute_args(const ReferenceDistribution& ref, std::span<const double> x,
                              std::size_t count) {
  if (count == 0) throw InvalidArgument("imputation count must be >= 1");
  if (x.size() != ref.schema().size()) {
    throw InvalidArgument("instance width does not match the reference schema");
  }
}

}  // namespace detail

// Dropped features from the source joint, ignoring x_S (do-semantics).
inline RowMatrix impute_marginal(const ReferenceDistribution& ref, Coalition s,
                                 std::span<const double> x, std::size_t count,
                                 RandomStream& stream) {
  detail::check_impute_args(ref, x, count);
  RowMatrix rows = std::visit([&](const auto& src) { return sample(*src, count, stream); },
                              ref.source());
  detail::clamp_coalition(rows, s, x);
  return rows;
}

// Dropped features from their conditional law given x_S.
inline RowMatrix impute_conditional(const ReferenceDistribution& ref, Coalition s,
                                    std::span<const double> x, std::size_t count,
                                    RandomStream& stream) {
  detail::check_impute_args(ref, x, count);
  const std::size_t m = ref.schema().size();
  switch (ref.mode()) {
    case ReferenceMode::kConditionalEmpirical: {
      const Dataset& d = *ref.dataset();
      const DiscreteSampler sampler(ref.kernel().weights(s.members(m), x));
      RowMatrix rows(count, m);
      for (std::size_t i = 0; i < count; ++i) {
        auto src = d.row(sampler.draw(stream));
        std::copy(src.begin(), src.end(), rows.row(i).begin());
      }
      detail::clamp_coalition(rows, s, x);
      return rows;
    }
    case ReferenceMode::kConditionalGaussian: {
      if (!ref.has_gaussian()) return impute_marginal(ref, s, x, count, stream);
      const auto free = s.complement(m).members(m);
      const auto given = s.members(m);
      std::vector<double> given_values;
      for (std::size_t j : given) given_values.push_back(x[j]);
      const GaussianBlock block =
          condition_gaussian(ref.gaussian_mean(), ref.gaussian_cov(), free, given, given_values);
      RowMatrix rows(count, m);
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::VectorXd z(nf);
      for (std::size_t i = 0; i < count; ++i) {
        for (Eigen::Index a = 0; a < nf; ++a) z[a] = stream.normal();
        const Eigen::VectorXd v = block.mean + block.factor * z;
        auto r = rows.row(i);
        for (Eigen::Index a = 0; a < nf; ++a) r[free[static_cast<std::size_t>(a)]] = v[a];
      }
      detail::clamp_coalition(rows, s, x);
      return rows;
    }
    default:
      throw InvalidArgument(std::string("impute_conditional needs a conditional reference, got ") +
                            reference_mode_name(ref.mode()));
  }
}

// Ancestral sampling over the causal graph: S clamped to x_S, unclamped root
// features drawn jointly from the source, every other unclamped feature drawn
// from its conditional given its (sampled or clamped) parents.
inline RowMatrix impute_interventional_dag(const ReferenceDistribution& ref, Coalition s,
                                           std::span<const double> x, std::size_t count,
                                           RandomStream& stream) {
  detail::check_impute_args(ref, x, count);
  if (ref.mode() != ReferenceMode::kInterventionalDag || !ref.graph()) {
    throw InvalidArgument("impute_interventional_dag needs an interventional reference");
  }
  const CausalGraph& g = *ref.graph();
  const std::size_t m = g.size();
  RowMatrix rows(count, m);
  const Dataset* d = ref.dataset();
  const ParametricSpec* spec = ref.parametric();

  // Conditionals of a node given parent values repeat often with discrete
  // parents; cache their samplers for the duration of this call.
  std::map<std::pair<std::size_t, std::vector<double>>, DiscreteSampler> cache;
  std::map<std::pair<std::size_t, std::vector<double>>, GaussianBlock> gauss_cache;

  std::vector<double> full(m);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = rows.row(i);
    // Roots, jointly.
    if (d != nullptr) {
      auto src = d->row(d->draw_row(stream));
      std::copy(src.begin(), src.end(), full.begin());
    } else {
      spec->draw_row(stream, full);
    }
    for (std::size_t j : g.topological_order()) {
      if (s.contains(j)) {
        r[j] = x[j];
        continue;
      }
      const auto& parents = g.parents(j);
      if (parents.empty()) {
        r[j] = full[j];
        continue;
      }
      std::vector<double> pv;
      pv.reserve(parents.size());
      for (std::size_t p : parents) pv.push_back(r[p]);
      if (d != nullptr) {
        auto key = std::make_pair(j, pv);
        auto it = cache.find(key);
        if (it == cache.end()) {
          std::vector<double> cond(m, 0.0);
          for (std::size_t a = 0; a < parents.size(); ++a) cond[parents[a]] = pv[a];
          it = cache.emplace(key, DiscreteSampler(ref.kernel().weights(parents, cond))).first;
        }
        r[j] = (*d)(it->second.draw(stream), j);
      } else if (ref.has_gaussian()) {
        auto key = std::make_pair(j, pv);
        auto it = gauss_cache.find(key);
        if (it == gauss_cache.end()) {
          it = gauss_cache
                   .emplace(key, condition_gaussian(ref.gaussian_mean(), ref.gaussian_cov(), {j},
                                                    parents, pv))
                   .first;
        }
        r[j] = it->second.mean[0] + it->second.factor(0, 0) * stream.normal();
      } else {
        r[j] = draw(spec->law(j), stream);
      }
    }
  }
  return rows;
}

// Dispatches on the reference's mode.
inline RowMatrix impute(const ReferenceDistribution& ref, Coalition s, std::span<const double> x,
                        std::size_t count, RandomStream& stream) {
  switch (ref.mode()) {
    case ReferenceMode::kMarginal: return impute_marginal(ref, s, x, count, stream);
    case ReferenceMode::kConditionalEmpirical:
    case ReferenceMode::kConditionalGaussian: return impute_conditional(ref, s, x, count, stream);
    case ReferenceMode::kInterventionalDag:
      return impute_interventional_dag(ref, s, x, count, stream);
  }
  throw InvalidArgument("unknown reference mode");
}

}  // namespace coalition_attrib
