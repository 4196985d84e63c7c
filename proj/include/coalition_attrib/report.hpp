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

// Serialization of reports: a JSON document (canonical), a flat CSV table and
// a plain-text table. Field order and number formatting are fixed, so equal
// results serialize to equal bytes.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

#include "coalition_attrib/diagnostics.hpp"
#include "coalition_attrib/engine.hpp"

namespace coalition_attrib {

using Json = nlohmann::ordered_json;

// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace detail {

inline Json instance_json(const std::vector<std::string>& names, const Instance& x) {
  Json obj = Json::object();
  for (std::size_t j = 0; j < names.size(); ++j) obj[names[j]] = x.values[j];
  return obj;
}

inline Json coalition_json(const std::vector<std::string>& names, Coalition s) {
  Json arr = Json::array();
  for (std::size_t j : s.members(names.size())) arr.push_back(names[j]);
  return arr;
}

// Left-aligned columns separated by two spaces.
inline std::string text_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Attribution reports

inline Json to_json(const AttributionReport& r) {
  Json doc;
  doc["mode"] = r.mode;
  doc["estimator"] = r.estimator;
  doc["backend"] = r.backend;
  if (r.estimator == "sampled") {
    doc["permutations"] = r.permutations;
    doc["reference_draws"] = r.reference_draws;
    doc["seed"] = r.seed;
  } else if (r.backend == "monte-carlo") {
    doc["reference_draws"] = r.reference_draws;
    doc["seed"] = r.seed;
  } else if (r.backend == "quadrature") {
    doc["quadrature_order"] = r.quadrature_order;
  }
  doc["reference_note"] = r.reference_note;
  doc["instance"] = detail::instance_json(r.features, r.instance);
  doc["prediction"] = r.prediction;
  doc["base"] = r.base;
  Json attributions = Json::array();
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    Json a;
    a["feature"] = r.features[j];
    a["phi"] = r.phi[j];
    if (!r.standard_errors.empty()) a["se"] = r.standard_errors[j];
    attributions.push_back(a);
  }
  doc["attributions"] = attributions;
  doc["efficiency_residual"] = r.efficiency_residual();
  return doc;
}

inline std::string to_csv(const AttributionReport& r) {
  std::string out = "feature,phi,se,mode,backend\n";
  auto row = [&](const std::string& name, double phi, const std::string& se) {
    out += csv_field(name) + "," + format_double(phi) + "," + se + "," + r.mode + "," +
           r.backend + "\n";
  };
  row("(base)", r.base, "");
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    row(r.features[j], r.phi[j],
        r.standard_errors.empty() ? std::string() : format_double(r.standard_errors[j]));
  }
  return out;
}

inline std::string to_text(const AttributionReport& r) {
  std::vector<std::vector<std::string>> rows{{"feature", "phi", "se"}};
  rows.push_back({"(base)", format_double(r.base), ""});
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    rows.push_back({r.features[j], format_double(r.phi[j]),
                    r.standard_errors.empty() ? "" : format_double(r.standard_errors[j])});
  }
  return "mode: " + r.mode + "  estimator: " + r.estimator + "  backend: " + r.backend +
         "\nf(x) = " + format_double(r.prediction) + "\n" + detail::text_table(rows);
}

// --------------------------------------------------------------------------
// Coalition deltas

inline Json to_json(const CoalitionDeltaReport& r) {
  Json doc;
  doc["feature"] = r.feature;
  doc["mode"] = r.mode;
  doc["backend"] = r.backend;
  doc["phi"] = r.phi;
  doc["tau"] = r.tau;
  doc["max_abs_delta"] = r.max_abs_delta;
  doc["cancellation"] = r.cancellation;
  Json deltas = Json::array();
  for (const auto& d : r.deltas) {
    Json e;
    e["coalition"] = detail::coalition_json(r.features, d.coalition);
    e["delta"] = d.delta;
    e["weight"] = d.weight;
    deltas.push_back(e);
  }
  doc["deltas"] = deltas;
  return doc;
}

inline std::string to_csv(const CoalitionDeltaReport& r) {
  std::string out = "feature,coalition,delta,weight\n";
  for (const auto& d : r.deltas) {
    out += csv_field(r.feature) + "," + csv_field(d.coalition.to_string(r.features)) + "," +
           format_double(d.delta) + "," + format_double(d.weight) + "\n";
  }
  return out;
}

inline std::string to_text(const CoalitionDeltaReport& r) {
  std::vector<std::vector<std::string>> rows{{"coalition", "delta", "weight"}};
  for (const auto& d : r.deltas) {
    rows.push_back({d.coalition.to_string(r.features), format_double(d.delta),
                    format_double(d.weight)});
  }
  return "feature: " + r.feature + "  phi: " + format_double(r.phi) + "  tau: " +
         format_double(r.tau) + "  cancellation: " + (r.cancellation ? "yes" : "no") + "\n" +
         detail::text_table(rows);
}

// --------------------------------------------------------------------------
// Fairness screen

inline Json to_json(const FairnessScreenResult& r) {
  Json doc;
  doc["sensitive"] = r.sensitive;
  doc["verdict"] = r.verdict;
  doc["caveat"] = r.caveat;
  doc["tolerance"] = r.tolerance;
  doc["max_abs_phi"] = r.max_abs_phi;
  doc["subsampled"] = r.subsampled;
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    Json e;
    e["row"] = r.rows[i];
    e["phi"] = r.phi[i];
    rows.push_back(e);
  }
  doc["rows"] = rows;
  return doc;
}

inline std::string to_csv(const FairnessScreenResult& r) {
  std::string out = "row,phi\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    out += std::to_string(r.rows[i]) + "," + format_double(r.phi[i]) + "\n";
  }
  return out;
}

inline std::string to_text(const FairnessScreenResult& r) {
  return "sensitive feature: " + r.sensitive + "\nverdict: " + r.verdict +
         "\nmax |phi|: " + format_double(r.max_abs_phi) + " (tolerance " +
         format_double(r.tolerance) + ", " + std::to_string(r.rows.size()) +
         " row(s) screened)\ncaveat: " + r.caveat + "\n";
}

// --------------------------------------------------------------------------
// Mode comparison

inline Json to_json(const ModeComparisonReport& r) {
  Json doc;
  doc["threshold"] = r.threshold;
  doc["aggregate_max_gap"] = r.aggregate_max_gap;
  doc["flagged"] = r.flagged;
  doc["conditional_note"] = r.conditional_note;
  Json features = Json::array();
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    Json e;
    e["feature"] = r.features[j];
    e["max_gap"] = r.max_gap[j];
    features.push_back(e);
  }
  doc["features"] = features;
  Json instances = Json::array();
  for (const auto& c : r.instances) {
    Json e;
    e["instance"] = detail::instance_json(r.features, c.instance);
    Json rows = Json::array();
    for (std::size_t j = 0; j < r.features.size(); ++j) {
      Json f;
      f["feature"] = r.features[j];
      f["phi_marginal"] = c.phi_marginal[j];
      f["phi_conditional"] = c.phi_conditional[j];
      f["gap"] = c.gap[j];
      rows.push_back(f);
    }
    e["attributions"] = rows;
    instances.push_back(e);
  }
  doc["instances"] = instances;
  return doc;
}

inline std::string to_csv(const ModeComparisonReport& r) {
  std::string out = "instance,feature,phi_marginal,phi_conditional,gap,flagged\n";
  for (std::size_t i = 0; i < r.instances.size(); ++i) {
    const auto& c = r.instances[i];
    for (std::size_t j = 0; j < r.features.size(); ++j) {
      out += std::to_string(i) + "," + csv_field(r.features[j]) + "," +
             format_double(c.phi_marginal[j]) + "," + format_double(c.phi_conditional[j]) + "," +
             format_double(c.gap[j]) + "," + (c.gap[j] > r.threshold ? "true" : "false") + "\n";
    }
  }
  return out;
}

inline std::string to_text(const ModeComparisonReport& r) {
  std::vector<std::vector<std::string>> rows{{"feature", "max_gap", "flagged"}};
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    rows.push_back({r.features[j], format_double(r.max_gap[j]),
                    r.max_gap[j] > r.threshold ? "yes" : "no"});
  }
  return "threshold: " + format_double(r.threshold) + "\n" + detail::text_table(rows);
}

// --------------------------------------------------------------------------
// Property validation

inline Json to_json(const PropertyReport& r) {
  Json doc;
  doc["all_passed"] = r.all_passed();
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e;
    e["property"] = c.property;
    e["status"] = check_status_name(c.status);
    e["max_residual"] = c.max_residual;
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  doc["checks"] = checks;
  return doc;
}

inline std::string to_csv(const PropertyReport& r) {
  std::string out = "property,status,max_residual,detail\n";
  for (const auto& c : r.checks) {
    out += c.property + "," + csv_field(check_status_name(c.status)) + "," +
           format_double(c.max_residual) + "," + csv_field(c.detail) + "\n";
  }
  return out;
}

inline std::string to_text(const PropertyReport& r) {
  std::vector<std::vector<std::string>> rows{{"property", "status", "max_residual", "detail"}};
  for (const auto& c : r.checks) {
    rows.push_back({c.property, check_status_name(c.status), format_double(c.max_residual),
                    c.detail});
  }
  return detail::text_table(rows);
}

}  // namespace coalition_attrib
