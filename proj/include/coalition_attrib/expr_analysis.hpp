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

// Static analysis of model ASTs used by the quadrature backend: constant
// folding under a partial assignment, per-feature polynomial degree, and the
// breakpoints at which indicator and min/max factors switch branches.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "coalition_attrib/expr.hpp"

namespace coalition_attrib {

// Features with fixed[i] == true take the value values[i]; all others are
// free (integrated over).
struct PartialAssignment {
  std::span<const double> values;
  const std::vector<bool>& fixed;
};

namespace detail {

inline bool all_fixed(const Node& n, const PartialAssignment& pa) {
  if (const auto* f = std::get_if<FeatureRef>(&n.kind)) return pa.fixed[f->index];
  bool ok = true;
  for_each_child(n, [&](const Node& c) { ok = ok && all_fixed(c, pa); });
  return ok;
}

inline bool is_feature(const Node& n, std::size_t j) {
  const auto* f = std::get_if<FeatureRef>(&n.kind);
  return f != nullptr && f->index == j;
}

// Returns the threshold c when `lhs`/`rhs` is the pair (x_j, c) in either
// order and c folds to a constant.
inline std::optional<double> threshold_of(const Node& lhs, const Node& rhs,
                                          std::size_t j,
                                          const PartialAssignment& pa);

}  // namespace detail

inline std::optional<double> fold_constant(const Node& n, const PartialAssignment& pa) {
  if (!detail::all_fixed(n, pa)) return std::nullopt;
  try {
    return detail::eval_node(n, pa.values);
  } catch (const DivisionByZero&) {
    return std::nullopt;
  }
}

namespace detail {

inline std::optional<double> threshold_of(const Node& lhs, const Node& rhs,
                                          std::size_t j,
                                          const PartialAssignment& pa) {
  if (is_feature(lhs, j)) return fold_constant(rhs, pa);
  if (is_feature(rhs, j)) return fold_constant(lhs, pa);
  return std::nullopt;
}

inline void collect_breakpoints(const Node& n, std::size_t j,
                                const PartialAssignment& pa,
                                std::vector<double>& out) {
  if (const auto* c = std::get_if<Compare>(&n.kind)) {
    if (auto t = threshold_of(*c->lhs, *c->rhs, j, pa)) out.push_back(*t);
  } else if (const auto* e = std::get_if<Extremum>(&n.kind)) {
    if (auto t = threshold_of(*e->lhs, *e->rhs, j, pa)) out.push_back(*t);
  }
  for_each_child(n, [&](const Node& c) { collect_breakpoints(c, j, pa, out); });
}

inline bool mentions(const Node& n, std::size_t j) {
  if (is_feature(n, j)) return true;
  bool found = false;
  for_each_child(n, [&](const Node& c) { found = found || mentions(c, j); });
  return found;
}

}  // namespace detail

// Sorted, de-duplicated constants c at which a factor of the form
// indicator(x_j op c) or min/max(x_j, c) switches branch.
inline std::vector<double> breakpoints(const Node& n, std::size_t j,
                                       const PartialAssignment& pa) {
  std::vector<double> out;
  detail::collect_breakpoints(n, j, pa, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Polynomial degree of `n` in x_j, valid on every interval between the
// breakpoints returned above. Other free features are treated as constants.
// nullopt means "not piecewise polynomial in x_j" (division by x_j, a
// comparison whose threshold moves with another free feature, ...).
inline std::optional<int> piecewise_degree(const Node& n, std::size_t j,
                                           const PartialAssignment& pa) {
  using detail::Overloaded;
  return std::visit(
      Overloaded{
          [](const Constant&) -> std::optional<int> { return 0; },
          [&](const FeatureRef& f) -> std::optional<int> {
            return f.index == j ? 1 : 0;
          },
          [&](const Negate& u) { return piecewise_degree(*u.operand, j, pa); },
          [&](const Binary& b) -> std::optional<int> {
            auto l = piecewise_degree(*b.lhs, j, pa);
            auto r = piecewise_degree(*b.rhs, j, pa);
            if (!l || !r) return std::nullopt;
            switch (b.op) {
              case BinaryOp::kAdd:
              case BinaryOp::kSub: return std::max(*l, *r);
              case BinaryOp::kMul: return *l + *r;
              case BinaryOp::kDiv:
                if (*r == 0) return *l;
                return std::nullopt;
            }
            return std::nullopt;
          },
          [&](const Compare& c) -> std::optional<int> {
            if (!detail::mentions(*c.lhs, j) && !detail::mentions(*c.rhs, j)) return 0;
            if (detail::threshold_of(*c.lhs, *c.rhs, j, pa)) return 0;
            return std::nullopt;
          },
          [&](const Indicator& i) { return piecewise_degree(*i.condition, j, pa); },
          [&](const Extremum& e) -> std::optional<int> {
            if (!detail::mentions(*e.lhs, j) && !detail::mentions(*e.rhs, j)) return 0;
            if (detail::threshold_of(*e.lhs, *e.rhs, j, pa)) return 1;
            return std::nullopt;
          },
          [&](const Power& p) -> std::optional<int> {
            auto d = piecewise_degree(*p.base, j, pa);
            if (!d) return std::nullopt;
            if (p.exponent >= 0) return *d * p.exponent;
            if (*d == 0) return 0;
            return std::nullopt;
          },
      },
      n.kind);
}

// Joint polynomial degree in the free features listed in `vars`, with no
// piecewise splitting. Used when free features are mixed by a linear map
// (correlated Gaussian), where per-axis breakpoints do not survive.
inline std::optional<int> total_degree(const Node& n, const std::vector<bool>& vars) {
  using detail::Overloaded;
  auto mentions_any = [&](const Node& m) {
    std::vector<bool> used(vars.size(), false);
    detail::collect_indices(m, used);
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (used[i] && vars[i]) return true;
    }
    return false;
  };
  return std::visit(
      Overloaded{
          [](const Constant&) -> std::optional<int> { return 0; },
          [&](const FeatureRef& f) -> std::optional<int> { return vars[f.index] ? 1 : 0; },
          [&](const Negate& u) { return total_degree(*u.operand, vars); },
          [&](const Binary& b) -> std::optional<int> {
            auto l = total_degree(*b.lhs, vars);
            auto r = total_degree(*b.rhs, vars);
            if (!l || !r) return std::nullopt;
            switch (b.op) {
              case BinaryOp::kAdd:
              case BinaryOp::kSub: return std::max(*l, *r);
              case BinaryOp::kMul: return *l + *r;
              case BinaryOp::kDiv:
                if (*r == 0) return *l;
                return std::nullopt;
            }
            return std::nullopt;
          },
          [&](const Compare&) -> std::optional<int> {
            if (mentions_any(n)) return std::nullopt;
            return 0;
          },
          [&](const Indicator& i) { return total_degree(*i.condition, vars); },
          [&](const Extremum&) -> std::optional<int> {
            if (mentions_any(n)) return std::nullopt;
            return 0;
          },
          [&](const Power& p) -> std::optional<int> {
            auto d = total_degree(*p.base, vars);
            if (!d) return std::nullopt;
            if (p.exponent >= 0) return *d * p.exponent;
            if (*d == 0) return 0;
            return std::nullopt;
          },
      },
      n.kind);
}

}  // namespace coalition_attrib
