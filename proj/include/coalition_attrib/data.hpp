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

// Reference populations: empirical datasets loaded from CSV and parametric
// feature laws, plus i.i.d. sampling and per-feature quadrature rules.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/gaussian.hpp"
#include "coalition_attrib/numeric.hpp"
#include "coalition_attrib/quadrature.hpp"
#include "coalition_attrib/random.hpp"
#include "coalition_attrib/schema.hpp"

namespace coalition_attrib {

// Dense row-major table of synthetic or observed rows.
class RowMatrix {
 public:
  RowMatrix() = default;
  RowMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

  double column_mean(std::size_t j) const {
    std::vector<double> col(rows_);
    for (std::size_t i = 0; i < rows_; ++i) col[i] = (*this)(i, j);
    return mean(col);
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// n x M table of complete observations with nonnegative row weights.
class Dataset {
 public:
  Dataset(FeatureSchema schema, RowMatrix values, std::vector<double> weights = {})
      : schema_(std::move(schema)), values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.rows() == 0) throw InvalidArgument("dataset has no rows");
    if (values_.cols() != schema_.size()) {
      throw InvalidArgument("dataset width does not match its schema");
    }
    if (weights_.empty()) weights_.assign(values_.rows(), 1.0);
    if (weights_.size() != values_.rows()) {
      throw InvalidArgument("one weight per row is required");
    }
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvalidArgument("row weights must be finite and nonnegative");
      }
    }
    total_weight_ = pairwise_sum(weights_);
    if (!(total_weight_ > 0.0)) throw InvalidArgument("row weights sum to zero");
    uniform_weights_ = std::all_of(weights_.begin(), weights_.end(),
                                   [&](double w) { return w == weights_[0]; });
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      acc += weights_[i];
      cumulative_[i] = acc;
    }
    for (std::size_t i = 0; i < values_.rows(); ++i) {
      for (std::size_t j = 0; j < values_.cols(); ++j) {
        validate_cell(j, values_(i, j));
      }
    }
  }

  static Dataset from_rows(FeatureSchema schema,
                           const std::vector<std::vector<double>>& rows,
                           std::vector<double> weights = {}) {
    RowMatrix m(rows.size(), schema.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != schema.size()) throw RaggedRow(i + 1, rows[i].size(), schema.size());
      for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return Dataset(std::move(schema), std::move(m), std::move(weights));
  }

  const FeatureSchema& schema() const { return schema_; }
  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const RowMatrix& values() const { return values_; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double total_weight() const { return total_weight_; }
  bool uniform_weights() const { return uniform_weights_; }

  Instance instance(std::size_t i) const {
    if (i >= rows()) throw InvalidArgument("row index " + std::to_string(i) + " out of range");
    auto r = row(i);
    return Instance{{r.begin(), r.end()}};
  }

  double column_mean(std::size_t j) const {
    std::vector<double> terms(rows());
    for (std::size_t i = 0; i < rows(); ++i) terms[i] = weights_[i] * values_(i, j);
    return pairwise_sum(terms) / total_weight_;
  }

  double column_sd(std::size_t j) const {
    const double m = column_mean(j);
    std::vector<double> terms(rows());
    for (std::size_t i = 0; i < rows(); ++i) {
      const double d = values_(i, j) - m;
      terms[i] = weights_[i] * d * d;
    }
    return std::sqrt(pairwise_sum(terms) / total_weight_);
  }

  // Weighted draw of a row index.
  std::size_t draw_row(RandomStream& stream) const {
    if (uniform_weights_) return static_cast<std::size_t>(stream.below(rows()));
    const double u = stream.uniform() * total_weight_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
    if (idx >= rows()) idx = rows() - 1;
    while (weights_[idx] == 0.0 && idx > 0) --idx;
    return idx;
  }

 private:
  void validate_cell(std::size_t j, double v) const {
    const Feature& f = schema_[j];
    if (!std::isfinite(v)) {
      throw InvalidArgument("non-finite value in column '" + f.name + "'");
    }
    if (f.kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
      throw InvalidArgument("binary column '" + f.name + "' holds a value other than 0/1");
    }
    if (f.kind == FeatureKind::kCategorical &&
        (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(f.levels.size()))) {
      throw InvalidArgument("categorical column '" + f.name + "' holds an invalid level index");
    }
  }

  FeatureSchema schema_;
  RowMatrix values_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double total_weight_ = 0.0;
  bool uniform_weights_ = true;
};

// ---------------------------------------------------------------------------
// CSV ingestion

enum class SchemaInference { kOff, kOn };

namespace detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> cells;
};

// RFC 4180 style: comma separated, optional double-quoted fields with ""
// escapes, LF or CRLF line endings. Blank lines are skipped.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> out;
  std::size_t i = 0;
  std::size_t line = 1;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;
  while (i < text.size()) {
    CsvRecord rec;
    rec.line = line;
    std::string cell;
    bool in_quotes = false;
    bool record_done = false;
    bool any_content = false;
    while (i < text.size() && !record_done) {
      const char c = text[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            cell += '"';
            i += 2;
          } else {
            in_quotes = false;
            ++i;
          }
        } else {
          if (c == '\n') ++line;
          cell += c;
          ++i;
        }
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          any_content = true;
          ++i;
          break;
        case ',':
          rec.cells.push_back(std::move(cell));
          cell.clear();
          any_content = true;
          ++i;
          break;
        case '\r':
          ++i;
          break;
        case '\n':
          ++i;
          ++line;
          record_done = true;
          break;
        default:
          cell += c;
          any_content = true;
          ++i;
      }
    }
    if (in_quotes) throw IoError("unterminated quoted field starting on line " + std::to_string(rec.line));
    if (!any_content && cell.empty()) continue;
    rec.cells.push_back(std::move(cell));
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Locale-independent decimal parse of the whole cell.
inline std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRecord> rows;
};

inline CsvTable read_csv_table(std::string_view text) {
  auto records = parse_csv(text);
  if (records.empty()) throw IoError("CSV input has no header row");
  CsvTable t;
  for (auto& h : records.front().cells) t.header.emplace_back(trim(h));
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i].empty()) throw IoError("empty column name in CSV header");
    for (std::size_t k = 0; k < i; ++k) {
      if (t.header[k] == t.header[i]) {
        throw IoError("duplicate column name '" + t.header[i] + "' in CSV header");
      }
    }
  }
  t.rows.assign(std::make_move_iterator(records.begin() + 1),
                std::make_move_iterator(records.end()));
  if (t.rows.empty()) throw InvalidArgument("CSV input has a header but no data rows");
  for (const auto& r : t.rows) {
    if (r.cells.size() != t.header.size()) {
      throw RaggedRow(r.line, r.cells.size(), t.header.size());
    }
  }
  return t;
}

}  // namespace detail

struct CsvOptions {
  SchemaInference inference = SchemaInference::kOn;
  // Column holding row weights; removed from the feature set when set.
  std::optional<std::string> weight_column;
};

// Parses CSV text. Every non-weight column becomes a feature; with inference
// on, columns whose values are all 0 or 1 are typed binary.
inline Dataset parse_csv_dataset(std::string_view text, const CsvOptions& options = {}) {
  auto table = detail::read_csv_table(text);
  const std::size_t width = table.header.size();
  std::optional<std::size_t> weight_col;
  if (options.weight_column) {
    for (std::size_t j = 0; j < width; ++j) {
      if (table.header[j] == *options.weight_column) weight_col = j;
    }
    if (!weight_col) {
      throw IoError("weight column '" + *options.weight_column + "' not found in header");
    }
  }
  const std::size_t n = table.rows.size();
  const std::size_t m = width - (weight_col ? 1 : 0);
  if (m == 0) throw IoError("CSV input has no feature columns");
  RowMatrix values(n, m);
  std::vector<double> weights;
  if (weight_col) weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = table.rows[i];
    std::size_t out_j = 0;
    for (std::size_t j = 0; j < width; ++j) {
      auto v = detail::parse_number(rec.cells[j]);
      if (!v) throw NonNumericCell(rec.line, j + 1, rec.cells[j]);
      if (weight_col && j == *weight_col) {
        weights[i] = *v;
      } else {
        values(i, out_j++) = *v;
      }
    }
  }
  std::vector<Feature> features;
  std::size_t out_j = 0;
  for (std::size_t j = 0; j < width; ++j) {
    if (weight_col && j == *weight_col) continue;
    FeatureKind kind = FeatureKind::kContinuous;
    if (options.inference == SchemaInference::kOn) {
      bool binary = true;
      for (std::size_t i = 0; i < n && binary; ++i) {
        const double v = values(i, out_j);
        binary = v == 0.0 || v == 1.0;
      }
      if (binary) kind = FeatureKind::kBinary;
    }
    features.push_back({table.header[j], kind, {}});
    ++out_j;
  }
  return Dataset(FeatureSchema(std::move(features)), std::move(values), std::move(weights));
}

// Parses CSV text against a declared schema. Columns are matched by name;
// categorical cells may hold a level name or a level index.
inline Dataset parse_csv_dataset(std::string_view text, const FeatureSchema& schema,
                                 std::optional<std::string> weight_column = std::nullopt) {
  auto table = detail::read_csv_table(text);
  const std::size_t width = table.header.size();
  std::vector<std::optional<std::size_t>> target(width);
  std::optional<std::size_t> weight_col;
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t j = 0; j < width; ++j) {
    if (weight_column && table.header[j] == *weight_column) {
      weight_col = j;
      continue;
    }
    auto idx = schema.find(table.header[j]);
    if (!idx) throw UnknownFeature(table.header[j]);
    target[j] = idx;
    seen[*idx] = true;
  }
  for (std::size_t k = 0; k < schema.size(); ++k) {
    if (!seen[k]) throw MissingFeature(schema[k].name);
  }
  if (weight_column && !weight_col) {
    throw IoError("weight column '" + *weight_column + "' not found in header");
  }
  const std::size_t n = table.rows.size();
  RowMatrix values(n, schema.size());
  std::vector<double> weights;
  if (weight_col) weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = table.rows[i];
    for (std::size_t j = 0; j < width; ++j) {
      const std::string_view raw = detail::trim(rec.cells[j]);
      std::optional<double> v;
      if (target[j] && schema[*target[j]].kind == FeatureKind::kCategorical) {
        const auto& levels = schema[*target[j]].levels;
        auto it = std::find(levels.begin(), levels.end(), raw);
        if (it != levels.end()) v = static_cast<double>(it - levels.begin());
      }
      if (!v) v = detail::parse_number(raw);
      if (!v) throw NonNumericCell(rec.line, j + 1, rec.cells[j]);
      if (weight_col && j == *weight_col) {
        weights[i] = *v;
      } else {
        values(i, *target[j]) = *v;
      }
    }
  }
  return Dataset(schema, std::move(values), std::move(weights));
}

inline Dataset load_csv(const std::string& path, const CsvOptions& options = {}) {
  return parse_csv_dataset(detail::read_file(path), options);
}

inline Dataset load_csv(const std::string& path, const FeatureSchema& schema,
                        std::optional<std::string> weight_column = std::nullopt) {
  return parse_csv_dataset(detail::read_file(path), schema, std::move(weight_column));
}

// ---------------------------------------------------------------------------
// Parametric laws

struct UniformLaw {
  double a = 0.0;
  double b = 1.0;
  bool operator==(const UniformLaw&) const = default;
};
struct NormalLaw {
  double mean = 0.0;
  double sd = 1.0;
  bool operator==(const NormalLaw&) const = default;
};
struct BernoulliLaw {
  double p = 0.5;
  bool operator==(const BernoulliLaw&) const = default;
};
using Law = std::variant<UniformLaw, NormalLaw, BernoulliLaw>;

inline double law_mean(const Law& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) return 0.5 * (u->a + u->b);
  if (const auto* n = std::get_if<NormalLaw>(&law)) return n->mean;
  return std::get<BernoulliLaw>(law).p;
}

inline double law_variance(const Law& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) return (u->b - u->a) * (u->b - u->a) / 12.0;
  if (const auto* n = std::get_if<NormalLaw>(&law)) return n->sd * n->sd;
  const double p = std::get<BernoulliLaw>(law).p;
  return p * (1.0 - p);
}

inline double draw(const Law& law, RandomStream& stream) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    return u->a + (u->b - u->a) * stream.uniform();
  }
  if (const auto* n = std::get_if<NormalLaw>(&law)) return n->mean + n->sd * stream.normal();
  return stream.uniform() < std::get<BernoulliLaw>(law).p ? 1.0 : 0.0;
}

inline void validate_law(const std::string& name, const Law& law) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    if (!(u->a < u->b) || !std::isfinite(u->a) || !std::isfinite(u->b)) {
      throw InvalidArgument("Uniform(a, b) for '" + name + "' needs finite a < b");
    }
  } else if (const auto* n = std::get_if<NormalLaw>(&law)) {
    if (!(n->sd > 0.0) || !std::isfinite(n->mean) || !std::isfinite(n->sd)) {
      throw InvalidArgument("Normal(mean, sd) for '" + name + "' needs finite mean and sd > 0");
    }
  } else {
    const double p = std::get<BernoulliLaw>(law).p;
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("Bernoulli(p) for '" + name + "' needs p in [0, 1]");
    }
  }
}

// Per-feature laws, independent unless a joint Gaussian covariance is given
// (then every law must be Normal and sd^2 must match the diagonal).
class ParametricSpec {
 public:
  ParametricSpec(std::vector<std::string> names, std::vector<Law> laws,
                 std::optional<Eigen::MatrixXd> covariance = std::nullopt)
      : laws_(std::move(laws)), covariance_(std::move(covariance)) {
    if (names.size() != laws_.size()) throw InvalidArgument("one law per feature is required");
    std::vector<Feature> features;
    for (std::size_t i = 0; i < names.size(); ++i) {
      validate_law(names[i], laws_[i]);
      const bool binary = std::holds_alternative<BernoulliLaw>(laws_[i]);
      features.push_back({names[i], binary ? FeatureKind::kBinary : FeatureKind::kContinuous, {}});
    }
    schema_ = FeatureSchema(std::move(features));
    mean_.resize(static_cast<Eigen::Index>(laws_.size()));
    for (std::size_t i = 0; i < laws_.size(); ++i) {
      mean_[static_cast<Eigen::Index>(i)] = law_mean(laws_[i]);
    }
    if (covariance_) {
      const auto m = static_cast<Eigen::Index>(laws_.size());
      if (covariance_->rows() != m || covariance_->cols() != m) {
        throw InvalidArgument("covariance must be M x M");
      }
      check_covariance(*covariance_);
      for (std::size_t i = 0; i < laws_.size(); ++i) {
        const auto* n = std::get_if<NormalLaw>(&laws_[i]);
        if (n == nullptr) {
          throw InvalidArgument("a joint covariance requires Normal laws for every feature");
        }
        const double diag = (*covariance_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (std::abs(diag - n->sd * n->sd) > 1e-9 * std::max(1.0, diag)) {
          throw InvalidArgument("covariance diagonal does not match sd^2 for '" + names[i] + "'");
        }
      }
      factor_ = psd_factor(*covariance_);
    }
  }

  const FeatureSchema& schema() const { return schema_; }
  std::size_t size() const { return laws_.size(); }
  const Law& law(std::size_t j) const { return laws_[j]; }
  const std::vector<Law>& laws() const { return laws_; }
  bool joint_gaussian() const { return covariance_.has_value(); }
  const Eigen::MatrixXd& covariance() const { return *covariance_; }
  const Eigen::VectorXd& mean() const { return mean_; }

  // One i.i.d. draw of the full feature vector.
  void draw_row(RandomStream& stream, std::span<double> out) const {
    if (covariance_) {
      const auto m = static_cast<Eigen::Index>(laws_.size());
      Eigen::VectorXd z(m);
      for (Eigen::Index i = 0; i < m; ++i) z[i] = stream.normal();
      const Eigen::VectorXd v = mean_ + factor_ * z;
      for (Eigen::Index i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = v[i];
      return;
    }
    for (std::size_t j = 0; j < laws_.size(); ++j) out[j] = draw(laws_[j], stream);
  }

 private:
  FeatureSchema schema_;
  std::vector<Law> laws_;
  std::optional<Eigen::MatrixXd> covariance_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

// i.i.d. rows: weighted resampling with replacement for datasets.
inline RowMatrix sample(const Dataset& data, std::size_t count, RandomStream& stream) {
  if (count == 0) throw InvalidArgument("sample count must be >= 1");
  RowMatrix out(count, data.cols());
  for (std::size_t i = 0; i < count; ++i) {
    auto src = data.row(data.draw_row(stream));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

inline RowMatrix sample(const ParametricSpec& spec, std::size_t count, RandomStream& stream) {
  if (count == 0) throw InvalidArgument("sample count must be >= 1");
  RowMatrix out(count, spec.size());
  for (std::size_t i = 0; i < count; ++i) spec.draw_row(stream, out.row(i));
  return out;
}

// (node, weight) pairs for E g(X_feature); weights sum to 1. Uniform laws
// use affinely mapped Gauss-Legendre, Normal laws scaled Gauss-Hermite.
inline std::vector<std::pair<double, double>> quadrature_nodes(const ParametricSpec& spec,
                                                               std::string_view feature,
                                                               std::size_t order) {
  const std::size_t j = spec.schema().index_of(feature);
  if (order == 0) throw InvalidArgument("quadrature order must be >= 1");
  const Law& law = spec.law(j);
  QuadratureRule rule;
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    rule = gauss_legendre_uniform(order, u->a, u->b);
  } else if (const auto* n = std::get_if<NormalLaw>(&law)) {
    rule = gauss_hermite_normal(order);
    for (double& t : rule.nodes) t = n->mean + n->sd * t;
  } else {
    throw UnsupportedLaw("Bernoulli feature '" + std::string(feature) +
                         "' has no quadrature rule; enumerate {0, 1} instead");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) out.emplace_back(rule.nodes[i], rule.weights[i]);
  return out;
}

}  // namespace coalition_attrib
