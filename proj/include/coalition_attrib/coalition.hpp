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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "coalition_attrib/errors.hpp"

namespace coalition_attrib {

inline constexpr std::size_t kMaxFeatures = 64;

// Set of "present" features as a bitmask; bit j set means feature j is in S.
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t bits) : bits_(bits) {}

  static Coalition full(std::size_t m) {
    return Coalition(m >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << m) - 1);
  }
  static Coalition of(std::initializer_list<std::size_t> features) {
    Coalition c;
    for (std::size_t j : features) c = c.with(j);
    return c;
  }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool contains(std::size_t j) const { return (bits_ >> j) & 1u; }
  constexpr Coalition with(std::size_t j) const { return Coalition(bits_ | (std::uint64_t{1} << j)); }
  constexpr Coalition without(std::size_t j) const {
    return Coalition(bits_ & ~(std::uint64_t{1} << j));
  }
  int size() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }
  Coalition complement(std::size_t m) const { return Coalition(full(m).bits_ & ~bits_); }

  std::vector<bool> mask(std::size_t m) const {
    std::vector<bool> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = contains(j);
    return out;
  }

  std::vector<std::size_t> members(std::size_t m) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < m; ++j) {
      if (contains(j)) out.push_back(j);
    }
    return out;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    std::string s = "{";
    bool first = true;
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (!contains(j)) continue;
      if (!first) s += ",";
      s += names[j];
      first = false;
    }
    return s + "}";
  }

  constexpr bool operator==(const Coalition&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

inline void check_feature_count(std::size_t m) {
  if (m > kMaxFeatures) {
    throw TooManyFeatures(m, kMaxFeatures, "coalitions are 64-bit masks");
  }
}

}  // namespace coalition_attrib
