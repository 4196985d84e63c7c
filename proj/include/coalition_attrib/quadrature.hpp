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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/numeric.hpp"

namespace coalition_attrib {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule on [-1, 1] (weights sum to 2), by Newton iteration on
// the three-term recurrence.
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw InvalidArgument("quadrature order must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    // Recompute the derivative at the converged node.
    {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Gauss-Hermite rule for the standard normal density: nodes t_i, weights w_i
// with sum w_i g(t_i) ~= E g(Z), Z ~ N(0, 1). Weights sum to 1.
inline QuadratureRule gauss_hermite_normal(std::size_t n) {
  if (n == 0) throw InvalidArgument("quadrature order must be >= 1");
  // Physicists' rule (weight exp(-x^2)) via orthonormal recurrence.
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n, 0.0);
  std::vector<double> w(n, 0.0);
  const double nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nd + 1.0) - 1.85575 * std::pow(2.0 * nd + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nd, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * x[1];
    } else {
      z = 2.0 * z - x[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) {
        // One more evaluation so pp matches the final node.
        p1 = kPiM4;
        p2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          const double jj = static_cast<double>(j);
          p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
        }
        pp = std::sqrt(2.0 * nd) * p2;
        break;
      }
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w[i];
  // Ascending node order.
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = -x[i] * std::numbers::sqrt2;
    rule.weights[i] = w[i] / total;
  }
  return rule;
}

// Rule for E g(U), U ~ Uniform(a, b): Gauss-Legendre mapped affinely, with
// weights normalized to sum to 1.
inline QuadratureRule gauss_legendre_uniform(std::size_t n, double a, double b) {
  QuadratureRule base = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double total = 0.0;
  for (double w : base.weights) total += w;
  for (std::size_t i = 0; i < n; ++i) {
    base.nodes[i] = mid + half * base.nodes[i];
    base.weights[i] /= total;
  }
  return base;
}

// Gauss rule for the standard normal density restricted to (lo, hi):
// sum w_i g(z_i) == E[g(Z) 1{lo < Z < hi}] exactly for polynomials g of degree
// <= 2n - 1. Endpoints may be infinite. Built by Golub-Welsch from moments
// taken about the truncated mean, so it is only well conditioned for modest
// n (the engine uses n <= 12).
inline QuadratureRule truncated_normal_rule(double lo, double hi, std::size_t n) {
  if (n == 0) throw InvalidArgument("quadrature order must be >= 1");
  if (!(lo < hi)) throw InvalidArgument("truncated_normal_rule needs lo < hi");
  // Mass, computed on the side of the median that avoids cancellation.
  double mass;
  if (lo >= 0.0) {
    mass = normal_cdf(-lo) - normal_cdf(-hi);
  } else if (hi <= 0.0) {
    mass = normal_cdf(hi) - normal_cdf(lo);
  } else {
    mass = 1.0 - normal_cdf(lo) - normal_cdf(-hi);
  }
  QuadratureRule rule;
  if (!(mass > 0.0)) return rule;
  const double pdf_lo = std::isfinite(lo) ? normal_pdf(lo) : 0.0;
  const double pdf_hi = std::isfinite(hi) ? normal_pdf(hi) : 0.0;
  const double center = (pdf_lo - pdf_hi) / mass;

  // Moments N_k = int (z - c)^k phi(z) dz over (lo, hi), from integrating
  // (z - c)^(k-1) * z * phi(z) by parts.
  const std::size_t kmax = 2 * n;
  std::vector<double> raw(kmax + 1, 0.0);
  raw[0] = mass;
  auto edge = [&](std::size_t power) {
    double a = 0.0;
    double b = 0.0;
    if (std::isfinite(lo)) a = std::pow(lo - center, static_cast<double>(power)) * pdf_lo;
    if (std::isfinite(hi)) b = std::pow(hi - center, static_cast<double>(power)) * pdf_hi;
    return a - b;
  };
  for (std::size_t k = 1; k <= kmax; ++k) {
    double v = -center * raw[k - 1] + edge(k - 1);
    if (k >= 2) v += static_cast<double>(k - 1) * raw[k - 2];
    raw[k] = v;
  }
  if (n == 1) {
    rule.nodes = {center};
    rule.weights = {mass};
    return rule;
  }
  // Rescale to unit spread so the Hankel matrix is well conditioned.
  const double spread = std::sqrt(std::max(raw[2] / mass, 1e-300));
  std::vector<double> mom(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    mom[k] = raw[k] / (mass * std::pow(spread, static_cast<double>(k)));
  }
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd hankel(nn + 1, nn + 1);
  for (Eigen::Index i = 0; i <= nn; ++i) {
    for (Eigen::Index j = 0; j <= nn; ++j) hankel(i, j) = mom[static_cast<std::size_t>(i + j)];
  }
  Eigen::LLT<Eigen::MatrixXd> llt(hankel);
  if (llt.info() != Eigen::Success) {
    throw QuadratureUnavailable("truncated normal moment matrix is not positive definite");
  }
  const Eigen::MatrixXd r = llt.matrixU();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(nn, nn);
  for (Eigen::Index k = 0; k < nn; ++k) {
    double alpha = r(k, k + 1) / r(k, k);
    if (k > 0) alpha -= r(k - 1, k) / r(k - 1, k - 1);
    jacobi(k, k) = alpha;
    if (k + 1 < nn) {
      const double beta = r(k + 1, k + 1) / r(k, k);
      jacobi(k, k + 1) = beta;
      jacobi(k + 1, k) = beta;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = center + spread * eig.eigenvalues()[i];
    rule.weights[static_cast<std::size_t>(i)] = mass * v0 * v0;
  }
  return rule;
}

}  // namespace coalition_attrib
