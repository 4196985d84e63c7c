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

// Multivariate normal helpers: PSD square roots and conditioning.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "coalition_attrib/errors.hpp"

namespace coalition_attrib {

struct GaussianBlock {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  // factor * factor^T == cov; valid for singular (PSD) covariances.
  Eigen::MatrixXd factor;
};

inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0) return cov;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd d = eig.eigenvalues();
  const double cutoff = 1e-14 * std::max(1.0, d.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = d[i] > cutoff ? std::sqrt(d[i]) : 0.0;
  return eig.eigenvectors() * d.asDiagonal();
}

inline void check_covariance(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw InvalidArgument("covariance must be square");
  const double scale = cov.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * std::max(1.0, scale)) {
        throw InvalidArgument("covariance must be symmetric");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, scale)) {
    throw InvalidArgument("covariance must be positive semidefinite");
  }
}

// Law of X_free given X_given = values, for X ~ N(mean, cov).
inline GaussianBlock condition_gaussian(const Eigen::VectorXd& mean,
                                        const Eigen::MatrixXd& cov,
                                        const std::vector<std::size_t>& free,
                                        const std::vector<std::size_t>& given,
                                        const std::vector<double>& given_values) {
  const auto nf = static_cast<Eigen::Index>(free.size());
  const auto ng = static_cast<Eigen::Index>(given.size());
  GaussianBlock out;
  out.mean.resize(nf);
  out.cov.resize(nf, nf);
  for (Eigen::Index a = 0; a < nf; ++a) {
    out.mean[a] = mean[static_cast<Eigen::Index>(free[a])];
    for (Eigen::Index b = 0; b < nf; ++b) {
      out.cov(a, b) = cov(static_cast<Eigen::Index>(free[a]),
                          static_cast<Eigen::Index>(free[b]));
    }
  }
  if (ng > 0 && nf > 0) {
    Eigen::MatrixXd s_gg(ng, ng);
    Eigen::MatrixXd s_fg(nf, ng);
    Eigen::VectorXd delta(ng);
    for (Eigen::Index a = 0; a < ng; ++a) {
      const auto ga = static_cast<Eigen::Index>(given[a]);
      delta[a] = given_values[static_cast<std::size_t>(a)] - mean[ga];
      for (Eigen::Index b = 0; b < ng; ++b) {
        s_gg(a, b) = cov(ga, static_cast<Eigen::Index>(given[b]));
      }
      for (Eigen::Index f = 0; f < nf; ++f) {
        s_fg(f, a) = cov(static_cast<Eigen::Index>(free[f]), ga);
      }
    }
    // Pseudo-inverse through the eigendecomposition handles singular S_gg.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s_gg);
    Eigen::VectorXd inv = eig.eigenvalues();
    const double cutoff = 1e-12 * std::max(1.0, inv.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > cutoff ? 1.0 / inv[i] : 0.0;
    const Eigen::MatrixXd pinv =
        eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::MatrixXd gain = s_fg * pinv;
    out.mean += gain * delta;
    out.cov -= gain * s_fg.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
  }
  out.factor = psd_factor(out.cov);
  return out;
}

}  // namespace coalition_attrib
