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

// Run configuration: a JSON document that fully specifies one run (model,
// data source, reference distribution, instances and options). Unknown keys
// are rejected; relative paths resolve against the config file's directory.
//
//   {
//     "model": "x1 + x2",                       // or "model_file": "f.txt"
//     "schema": [{"name": "x1", "kind": "continuous"}, ...],       // optional
//     "data": {"csv": "cohort.csv", "weight_column": "w", "infer_schema": true}
//           | {"parametric": [{"name": "x1", "law": "uniform", "a": -1, "b": 2},
//                             {"name": "x2", "law": "normal", "mean": 0, "sd": 1},
//                             {"name": "x3", "law": "bernoulli", "p": 0.5}],
//              "covariance": [[...], ...]},                        // optional
//     "reference": {"mode": "marginal" | "conditional-empirical" |
//                           "conditional-gaussian" | "interventional-dag",
//                   "bandwidth": 0.5 | {"x1": 0.5}, "neighbors": 20,
//                   "graph": {"nodes": [...], "edges": [[parent, child], ...]}
//                            | "graph.json"},
//     "instance": {"values": {"x1": 0, "x2": 0}} | {"row": 0},
//     "instances": [ ...same forms... ],
//     "options": { see RunOptions }
//   }

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "coalition_attrib/causal_graph.hpp"
#include "coalition_attrib/data.hpp"
#include "coalition_attrib/engine.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/expr.hpp"
#include "coalition_attrib/refdist.hpp"
#include "coalition_attrib/schema.hpp"

namespace coalition_attrib {

enum class Attribution { kAuto, kShapley, kAsymmetric, kCausal };
enum class OutputFormat { kJson, kCsv, kText };

struct ReferenceConfig {
  ReferenceMode mode = ReferenceMode::kMarginal;
  KernelOptions kernel;
  std::optional<nlohmann::json> graph;  // parsed graph document
};

struct InstanceSpec {
  std::string path;  // config field, for error messages
  std::map<std::string, nlohmann::json> values;  // number, or level name
  std::optional<std::size_t> row;
};

struct ParametricEntry {
  std::string name;
  Law law;
};

struct DataConfig {
  std::optional<std::string> csv;  // resolved path
  std::optional<std::string> weight_column;
  bool infer_schema = true;
  std::vector<ParametricEntry> parametric;
  std::optional<Eigen::MatrixXd> covariance;
};

struct RunOptions {
  Attribution attribution = Attribution::kAuto;
  bool sampled = false;              // "estimator": "exact" | "sampled"
  Backend value_backend = Backend::kExact;  // "value_backend": "exact" | "monte-carlo"
  std::size_t quadrature_order = 32;
  std::size_t dense_order = 64;
  std::size_t draws = 1000;          // per v(S), monte-carlo value backend
  std::size_t permutations = 1000;
  std::size_t reference_draws = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool force = false;
  std::optional<std::string> feature;    // deltas
  std::optional<double> tau;             // deltas
  std::optional<std::string> sensitive;  // fairness-screen
  double tolerance = 1e-6;               // fairness-screen
  std::size_t max_rows = 200;            // fairness-screen
  double threshold = 1e-6;               // compare-modes
  double property_tolerance = 1e-9;      // validate
  std::optional<ReferenceConfig> compare_reference;  // compare-modes
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::kJson;
};

struct RunConfig {
  std::filesystem::path base_dir;
  std::string model_source;
  std::optional<std::vector<Feature>> schema;
  DataConfig data;
  ReferenceConfig reference;
  std::vector<InstanceSpec> instances;
  RunOptions options;
};

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void allow_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "(root)" : path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError(join_path(path, key), "unknown key");
  }
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline std::size_t get_count(const json& v, const std::string& path, std::size_t min = 0) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
    throw ConfigError(path, "expected an integer >= " + std::to_string(min));
  }
  return v.get<std::size_t>();
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

inline bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

inline std::string read_text(const std::filesystem::path& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (field.empty()) throw IoError("cannot open '" + path.string() + "'");
    throw ConfigError(field, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  std::size_t line = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(line_of(text, e.byte), msg);
  }
}

inline ReferenceMode parse_mode(const json& v, const std::string& path) {
  const std::string s = get_string(v, path);
  for (ReferenceMode m : {ReferenceMode::kMarginal, ReferenceMode::kConditionalEmpirical,
                          ReferenceMode::kConditionalGaussian, ReferenceMode::kInterventionalDag}) {
    if (s == reference_mode_name(m)) return m;
  }
  throw ConfigError(path,
                    "expected marginal, conditional-empirical, conditional-gaussian or "
                    "interventional-dag");
}

inline ReferenceConfig parse_reference(const json& obj, const std::string& path,
                                       const std::filesystem::path& base) {
  allow_keys(obj, path, {"mode", "bandwidth", "neighbors", "graph"});
  ReferenceConfig r;
  if (!obj.contains("mode")) throw ConfigError(join_path(path, "mode"), "required");
  r.mode = parse_mode(obj["mode"], join_path(path, "mode"));
  if (obj.contains("bandwidth")) {
    const std::string p = join_path(path, "bandwidth");
    const json& b = obj["bandwidth"];
    if (b.is_object()) {
      for (const auto& [name, h] : b.items()) r.kernel.bandwidths[name] = get_number(h, p + "." + name);
    } else {
      r.kernel.bandwidth = get_number(b, p);
    }
  }
  if (obj.contains("neighbors")) {
    r.kernel.neighbors = get_count(obj["neighbors"], join_path(path, "neighbors"), 1);
  }
  if (obj.contains("graph")) {
    const std::string p = join_path(path, "graph");
    const json& g = obj["graph"];
    if (g.is_string()) {
      const std::string text = read_text(base / g.get<std::string>(), p);
      try {
        r.graph = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError(p, e.what());
      }
    } else if (g.is_object()) {
      r.graph = g;
    } else {
      throw ConfigError(p, "expected a graph object or a path");
    }
  }
  return r;
}

inline Law parse_law(const json& obj, const std::string& path) {
  const std::string law = obj.contains("law") ? get_string(obj["law"], path + ".law") : "";
  auto need = [&](const char* key) {
    if (!obj.contains(key)) throw ConfigError(path + "." + key, "required for " + law);
    return get_number(obj[key], path + "." + key);
  };
  if (law == "uniform") {
    allow_keys(obj, path, {"name", "law", "a", "b"});
    return UniformLaw{need("a"), need("b")};
  }
  if (law == "normal") {
    allow_keys(obj, path, {"name", "law", "mean", "sd"});
    return NormalLaw{need("mean"), need("sd")};
  }
  if (law == "bernoulli") {
    allow_keys(obj, path, {"name", "law", "p"});
    return BernoulliLaw{need("p")};
  }
  throw ConfigError(path + ".law", "expected uniform, normal or bernoulli");
}

inline DataConfig parse_data(const json& obj, const std::filesystem::path& base) {
  allow_keys(obj, "data", {"csv", "weight_column", "infer_schema", "parametric", "covariance"});
  const bool has_csv = obj.contains("csv");
  const bool has_param = obj.contains("parametric");
  if (has_csv == has_param) {
    throw ConfigError("data", "exactly one of 'csv' and 'parametric' is required");
  }
  DataConfig d;
  if (has_csv) {
    if (obj.contains("covariance")) throw ConfigError("data.covariance", "only for parametric data");
    d.csv = (base / get_string(obj["csv"], "data.csv")).string();
    if (obj.contains("weight_column")) {
      d.weight_column = get_string(obj["weight_column"], "data.weight_column");
    }
    if (obj.contains("infer_schema")) {
      d.infer_schema = get_bool(obj["infer_schema"], "data.infer_schema");
    }
    return d;
  }
  for (const char* key : {"weight_column", "infer_schema"}) {
    if (obj.contains(key)) throw ConfigError(std::string("data.") + key, "only for csv data");
  }
  const json& laws = obj["parametric"];
  if (!laws.is_array() || laws.empty()) {
    throw ConfigError("data.parametric", "expected a non-empty array of laws");
  }
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const std::string p = "data.parametric[" + std::to_string(i) + "]";
    if (!laws[i].is_object()) throw ConfigError(p, "expected an object");
    if (!laws[i].contains("name")) throw ConfigError(p + ".name", "required");
    d.parametric.push_back({get_string(laws[i]["name"], p + ".name"), parse_law(laws[i], p)});
  }
  if (obj.contains("covariance")) {
    const json& c = obj["covariance"];
    const auto m = static_cast<Eigen::Index>(d.parametric.size());
    if (!c.is_array() || static_cast<Eigen::Index>(c.size()) != m) {
      throw ConfigError("data.covariance", "expected an M x M array");
    }
    Eigen::MatrixXd cov(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const json& row = c[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) {
        throw ConfigError("data.covariance", "expected an M x M array");
      }
      for (Eigen::Index k = 0; k < m; ++k) {
        cov(i, k) = get_number(row[static_cast<std::size_t>(k)], "data.covariance");
      }
    }
    d.covariance = cov;
  }
  return d;
}

inline std::vector<Feature> parse_schema(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw ConfigError("schema", "expected a non-empty array");
  std::vector<Feature> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = "schema[" + std::to_string(i) + "]";
    allow_keys(arr[i], p, {"name", "kind", "levels"});
    if (!arr[i].contains("name")) throw ConfigError(p + ".name", "required");
    Feature f;
    f.name = get_string(arr[i]["name"], p + ".name");
    const std::string kind = arr[i].contains("kind") ? get_string(arr[i]["kind"], p + ".kind")
                                                     : "continuous";
    if (kind == "continuous") {
      f.kind = FeatureKind::kContinuous;
    } else if (kind == "binary") {
      f.kind = FeatureKind::kBinary;
    } else if (kind == "categorical") {
      f.kind = FeatureKind::kCategorical;
    } else {
      throw ConfigError(p + ".kind", "expected continuous, binary or categorical");
    }
    if (arr[i].contains("levels")) {
      if (f.kind != FeatureKind::kCategorical) throw ConfigError(p + ".levels", "only for categorical");
      const json& lv = arr[i]["levels"];
      if (!lv.is_array() || lv.empty()) throw ConfigError(p + ".levels", "expected a non-empty array");
      for (const auto& l : lv) f.levels.push_back(get_string(l, p + ".levels"));
    } else if (f.kind == FeatureKind::kCategorical) {
      throw ConfigError(p + ".levels", "required for categorical features");
    }
    out.push_back(std::move(f));
  }
  return out;
}

inline InstanceSpec parse_instance(const json& obj, const std::string& path) {
  allow_keys(obj, path, {"values", "row"});
  if (obj.contains("values") == obj.contains("row")) {
    throw ConfigError(path, "exactly one of 'values' and 'row' is required");
  }
  InstanceSpec s;
  s.path = path;
  if (obj.contains("row")) {
    s.row = get_count(obj["row"], path + ".row");
    return s;
  }
  const json& v = obj["values"];
  if (!v.is_object()) throw ConfigError(path + ".values", "expected an object");
  for (const auto& [name, value] : v.items()) {
    if (!value.is_number() && !value.is_string()) {
      throw ConfigError(path + ".values." + name, "expected a number or a level name");
    }
    s.values[name] = value;
  }
  return s;
}

inline RunOptions parse_options(const json& obj, const std::filesystem::path& base) {
  allow_keys(obj, "options",
             {"attribution", "estimator", "value_backend", "quadrature_order", "dense_order",
              "draws", "permutations", "reference_draws", "seed", "workers", "force", "feature",
              "tau", "sensitive", "tolerance", "max_rows", "threshold", "property_tolerance",
              "compare_reference", "output", "format"});
  RunOptions o;
  auto p = [](const char* k) { return std::string("options.") + k; };
  if (obj.contains("attribution")) {
    const std::string a = get_string(obj["attribution"], p("attribution"));
    if (a == "auto") o.attribution = Attribution::kAuto;
    else if (a == "shapley") o.attribution = Attribution::kShapley;
    else if (a == "asymmetric") o.attribution = Attribution::kAsymmetric;
    else if (a == "causal") o.attribution = Attribution::kCausal;
    else throw ConfigError(p("attribution"), "expected auto, shapley, asymmetric or causal");
  }
  if (obj.contains("estimator")) {
    const std::string e = get_string(obj["estimator"], p("estimator"));
    if (e != "exact" && e != "sampled") throw ConfigError(p("estimator"), "expected exact or sampled");
    o.sampled = e == "sampled";
  }
  if (obj.contains("value_backend")) {
    const std::string b = get_string(obj["value_backend"], p("value_backend"));
    if (b == "exact") o.value_backend = Backend::kExact;
    else if (b == "monte-carlo") o.value_backend = Backend::kMonteCarlo;
    else throw ConfigError(p("value_backend"), "expected exact or monte-carlo");
  }
  if (obj.contains("quadrature_order")) o.quadrature_order = get_count(obj["quadrature_order"], p("quadrature_order"), 1);
  if (obj.contains("dense_order")) o.dense_order = get_count(obj["dense_order"], p("dense_order"), 1);
  if (obj.contains("draws")) o.draws = get_count(obj["draws"], p("draws"), 1);
  if (obj.contains("permutations")) o.permutations = get_count(obj["permutations"], p("permutations"), 1);
  if (obj.contains("reference_draws")) o.reference_draws = get_count(obj["reference_draws"], p("reference_draws"), 1);
  if (obj.contains("seed")) o.seed = get_count(obj["seed"], p("seed"));
  if (obj.contains("workers")) o.workers = get_count(obj["workers"], p("workers"), 1);
  if (obj.contains("force")) o.force = get_bool(obj["force"], p("force"));
  if (obj.contains("feature")) o.feature = get_string(obj["feature"], p("feature"));
  if (obj.contains("tau")) {
    o.tau = get_number(obj["tau"], p("tau"));
    if (*o.tau < 0.0) throw ConfigError(p("tau"), "must be >= 0");
  }
  if (obj.contains("sensitive")) o.sensitive = get_string(obj["sensitive"], p("sensitive"));
  if (obj.contains("tolerance")) {
    o.tolerance = get_number(obj["tolerance"], p("tolerance"));
    if (o.tolerance < 0.0) throw ConfigError(p("tolerance"), "must be >= 0");
  }
  if (obj.contains("max_rows")) o.max_rows = get_count(obj["max_rows"], p("max_rows"), 1);
  if (obj.contains("threshold")) {
    o.threshold = get_number(obj["threshold"], p("threshold"));
    if (o.threshold < 0.0) throw ConfigError(p("threshold"), "must be >= 0");
  }
  if (obj.contains("property_tolerance")) {
    o.property_tolerance = get_number(obj["property_tolerance"], p("property_tolerance"));
    if (o.property_tolerance < 0.0) throw ConfigError(p("property_tolerance"), "must be >= 0");
  }
  if (obj.contains("compare_reference")) {
    o.compare_reference = parse_reference(obj["compare_reference"], p("compare_reference"), base);
  }
  if (obj.contains("output")) o.output = (base / get_string(obj["output"], p("output"))).string();
  if (obj.contains("format")) {
    const std::string f = get_string(obj["format"], p("format"));
    if (f == "json") o.format = OutputFormat::kJson;
    else if (f == "csv") o.format = OutputFormat::kCsv;
    else if (f == "text") o.format = OutputFormat::kText;
    else throw ConfigError(p("format"), "expected json, csv or text");
  }
  return o;
}

}  // namespace detail

inline OutputFormat parse_output_format(const std::string& s) {
  if (s == "json") return OutputFormat::kJson;
  if (s == "csv") return OutputFormat::kCsv;
  if (s == "text") return OutputFormat::kText;
  throw ConfigError("format", "expected json, csv or text");
}

// Parses and validates a config document; `base_dir` anchors relative paths.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  using nlohmann::json;
  const json doc = detail::parse_json_text(text);
  detail::allow_keys(doc, "", {"model", "model_file", "schema", "data", "reference", "instance",
                               "instances", "options"});
  RunConfig c;
  c.base_dir = base_dir;
  if (doc.contains("model") == doc.contains("model_file")) {
    throw ConfigError("model", "exactly one of 'model' and 'model_file' is required");
  }
  if (doc.contains("model")) {
    c.model_source = detail::get_string(doc["model"], "model");
  } else {
    c.model_source = detail::read_text(
        base_dir / detail::get_string(doc["model_file"], "model_file"), "model_file");
  }
  if (doc.contains("schema")) c.schema = detail::parse_schema(doc["schema"]);
  if (!doc.contains("data")) throw ConfigError("data", "required");
  c.data = detail::parse_data(doc["data"], base_dir);
  if (!doc.contains("reference")) throw ConfigError("reference", "required");
  c.reference = detail::parse_reference(doc["reference"], "reference", base_dir);
  if (doc.contains("instance")) c.instances.push_back(detail::parse_instance(doc["instance"], "instance"));
  if (doc.contains("instances")) {
    const json& arr = doc["instances"];
    if (!arr.is_array()) throw ConfigError("instances", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.instances.push_back(detail::parse_instance(arr[i], "instances[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("options")) c.options = detail::parse_options(doc["options"], base_dir);

  // Cross-field consistency.
  const RunOptions& o = c.options;
  const bool causal_mode = c.reference.mode == ReferenceMode::kInterventionalDag;
  if ((causal_mode || o.attribution == Attribution::kAsymmetric) && !c.reference.graph) {
    throw ConfigError("reference.graph", "a causal graph is required for this attribution");
  }
  if (o.attribution == Attribution::kCausal && !causal_mode) {
    throw ConfigError("options.attribution", "causal attribution needs mode interventional-dag");
  }
  if (o.attribution == Attribution::kAsymmetric &&
      c.reference.mode != ReferenceMode::kConditionalEmpirical &&
      c.reference.mode != ReferenceMode::kConditionalGaussian) {
    throw ConfigError("options.attribution", "asymmetric attribution needs a conditional mode");
  }
  if (o.attribution == Attribution::kShapley && causal_mode) {
    throw ConfigError("options.attribution",
                      "an interventional reference yields causal attribution");
  }
  if (c.reference.mode == ReferenceMode::kConditionalEmpirical && !c.data.csv) {
    throw ConfigError("reference.mode", "conditional-empirical needs csv data");
  }
  if (c.data.csv == std::nullopt && !c.reference.kernel.bandwidths.empty()) {
    throw ConfigError("reference.bandwidth", "kernel settings apply to csv data only");
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  const std::filesystem::path p(path);
  const std::string text = detail::read_text(p, "");
  return parse_config(text, p.parent_path());
}

// Objects built from a config: everything a command needs.
struct RunInputs {
  FeatureSchema schema;
  ModelExpr model;
  Source source;
  std::shared_ptr<const Dataset> dataset;  // null for parametric data
  std::optional<CausalGraph> graph;
  std::vector<Instance> instances;
};

namespace detail {

inline ReferenceDistribution make_reference(const ReferenceConfig& rc, const RunInputs& in,
                                            const std::string& path) {
  try {
    switch (rc.mode) {
      case ReferenceMode::kMarginal: return ReferenceDistribution::marginal(in.source);
      case ReferenceMode::kConditionalEmpirical:
        if (!in.dataset) throw ConfigError(path + ".mode", "conditional-empirical needs csv data");
        return ReferenceDistribution::conditional_empirical(in.dataset, rc.kernel);
      case ReferenceMode::kConditionalGaussian:
        return ReferenceDistribution::conditional_gaussian(in.source);
      case ReferenceMode::kInterventionalDag: {
        if (!rc.graph) throw ConfigError(path + ".graph", "required for interventional-dag");
        CausalGraph g = CausalGraph::from_json(*rc.graph, in.schema);
        return ReferenceDistribution::interventional_dag(in.source, std::move(g), rc.kernel);
      }
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path + ".mode", "unsupported");
}

inline Instance resolve_instance(const InstanceSpec& spec, const RunInputs& in,
                                 const std::string& path) {
  if (spec.row) {
    if (!in.dataset) throw ConfigError(path + ".row", "row instances need csv data");
    if (*spec.row >= in.dataset->rows()) throw ConfigError(path + ".row", "row index out of range");
    return in.dataset->instance(*spec.row);
  }
  std::map<std::string, double> named;
  for (const auto& [name, value] : spec.values) {
    const auto idx = in.schema.find(name);
    if (!idx) throw ConfigError(path + ".values." + name, "unknown feature");
    if (value.is_number()) {
      named[name] = value.get<double>();
      continue;
    }
    const auto& levels = in.schema[*idx].levels;
    const auto it = std::find(levels.begin(), levels.end(), value.get<std::string>());
    if (it == levels.end()) throw ConfigError(path + ".values." + name, "unknown level");
    named[name] = static_cast<double>(it - levels.begin());
  }
  try {
    Instance x = make_instance(in.schema, named);
    check_instance(in.schema, x);
    return x;
  } catch (const Error& e) {
    throw ConfigError(path + ".values", e.what());
  }
}

}  // namespace detail

// Loads data, parses the model and resolves instances.
inline RunInputs build_inputs(const RunConfig& c) {
  RunInputs in{FeatureSchema::continuous({"_"}), ModelExpr(constant(0.0), 1), DatasetPtr{}, {}, {}, {}};
  if (c.data.csv) {
    Dataset data = [&] {
      if (c.schema) return load_csv(*c.data.csv, FeatureSchema(*c.schema), c.data.weight_column);
      CsvOptions opt;
      opt.inference = c.data.infer_schema ? SchemaInference::kOn : SchemaInference::kOff;
      opt.weight_column = c.data.weight_column;
      return load_csv(*c.data.csv, opt);
    }();
    in.dataset = std::make_shared<const Dataset>(std::move(data));
    in.source = in.dataset;
    in.schema = in.dataset->schema();
  } else {
    std::vector<std::string> names;
    std::vector<Law> laws;
    for (const auto& e : c.data.parametric) {
      names.push_back(e.name);
      laws.push_back(e.law);
    }
    std::shared_ptr<const ParametricSpec> spec;
    try {
      spec = std::make_shared<const ParametricSpec>(names, laws, c.data.covariance);
    } catch (const InvalidArgument& e) {
      throw ConfigError("data.parametric", e.what());
    }
    in.source = spec;
    in.schema = spec->schema();
    if (c.schema && !(FeatureSchema(*c.schema) == in.schema)) {
      throw ConfigError("schema", "does not match the parametric laws");
    }
  }
  in.model = parse_model(c.model_source, in.schema);
  if (c.reference.graph) in.graph = CausalGraph::from_json(*c.reference.graph, in.schema);
  for (std::size_t i = 0; i < c.instances.size(); ++i) {
    in.instances.push_back(detail::resolve_instance(c.instances[i], in, c.instances[i].path));
  }
  return in;
}

inline ReferenceDistribution build_reference(const ReferenceConfig& rc, const RunInputs& in,
                                             const std::string& path = "reference") {
  return detail::make_reference(rc, in, path);
}

}  // namespace coalition_attrib
