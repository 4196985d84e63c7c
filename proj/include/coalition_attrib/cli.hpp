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

// Command orchestration for the batch front end: explain, deltas,
// fairness-screen, compare-modes and validate.

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <utility>

#include "coalition_attrib/config.hpp"
#include "coalition_attrib/diagnostics.hpp"
#include "coalition_attrib/engine.hpp"
#include "coalition_attrib/errors.hpp"
#include "coalition_attrib/report.hpp"

namespace coalition_attrib {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ExitCode : int { kOk = 0, kValidation = 1, kComputation = 2 };

// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<OutputFormat> format;
  std::optional<std::size_t> workers;
};

inline bool is_command(const std::string& c) {
  return c == "explain" || c == "deltas" || c == "fairness-screen" || c == "compare-modes" ||
         c == "validate";
}

// One-line JSON error record for stderr.
inline std::string error_record(const std::exception& e) {
  Json rec;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    rec["error"] = error_code_name(err->code());
    if (const auto* ce = dynamic_cast<const ConfigError*>(err)) rec["field"] = ce->field();
    if (const auto* pe = dynamic_cast<const ParseError*>(err)) rec["line"] = pe->line();
  } else {
    rec["error"] = "InternalError";
  }
  rec["message"] = e.what();
  return rec.dump();
}

// Writes to a sibling temporary file, then renames it over `path`.
inline void write_atomically(const std::string& path, const std::string& body) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << body;
    out.flush();
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move report into place at '" + path + "'");
  }
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

// A computed report in every output format. `body` is deterministic; the
// JSON envelope adds run metadata (time, workers) beside it.
struct Rendered {
  Json body;
  std::string csv;
  std::string text;
};

template <typename R>
Rendered render(const R& r) {
  return {to_json(r), to_csv(r), to_text(r)};
}

inline BackendConfig backend_config(const RunOptions& o) {
  BackendConfig cfg;
  cfg.backend = o.value_backend;
  cfg.quadrature.order = o.quadrature_order;
  cfg.quadrature.dense_order = o.dense_order;
  cfg.draws = o.draws;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  return cfg;
}

inline SamplingOptions sampling_options(const RunOptions& o) {
  return {o.permutations, o.reference_draws, o.seed, o.workers};
}

inline const Instance& single_instance(const RunInputs& in) {
  if (in.instances.size() != 1) throw ConfigError("instance", "exactly one instance is required");
  return in.instances.front();
}

// Validates command-specific settings and builds the reference; throws
// validation errors only. Returns a closure performing the computation.
inline std::function<Rendered()> prepare(const std::string& command, const RunConfig& c,
                                         const RunInputs& in) {
  const RunOptions& o = c.options;
  auto ref = std::make_shared<const ReferenceDistribution>(build_reference(c.reference, in));
  const BackendConfig cfg = backend_config(o);

  if (command == "explain") {
    const Instance x = single_instance(in);
    Attribution a = o.attribution;
    if (a == Attribution::kAuto) {
      a = ref->mode() == ReferenceMode::kInterventionalDag ? Attribution::kCausal
                                                           : Attribution::kShapley;
    }
    OrderingOptions ord;
    ord.exact = !o.sampled;
    ord.backend = cfg;
    ord.sampling = sampling_options(o);
    ord.limits = EnumerationLimits{10, o.force};
    const auto& model = in.model;
    switch (a) {
      case Attribution::kAsymmetric: {
        const CausalGraph graph = *in.graph;
        return [=, &model] { return render(asymmetric_shapley(model, *ref, x, graph, ord)); };
      }
      case Attribution::kCausal:
        return [=, &model] { return render(causal_shapley(model, *ref, x, ord)); };
      default:
        if (o.sampled) {
          return [=, &model] { return render(sampled_shapley(model, *ref, x, sampling_options(o))); };
        }
        return [=, &model] {
          return render(exact_shapley(model, *ref, x, cfg, EnumerationLimits{25, o.force}));
        };
    }
  }

  if (command == "deltas") {
    const Instance x = single_instance(in);
    if (!o.feature) throw ConfigError("options.feature", "required for deltas");
    const auto j = in.schema.find(*o.feature);
    if (!j) throw ConfigError("options.feature", "unknown feature '" + *o.feature + "'");
    DeltaOptions dopt;
    dopt.tau = o.tau;
    dopt.limits.force = o.force;
    const auto& model = in.model;
    const std::size_t idx = *j;
    return [=, &model] { return render(coalition_deltas(model, *ref, x, idx, cfg, dopt)); };
  }

  if (command == "fairness-screen") {
    if (!in.dataset) throw ConfigError("data", "the fairness screen needs csv data");
    if (ref->mode() != ReferenceMode::kMarginal) {
      throw ConfigError("reference.mode", "the fairness screen uses marginal attributions");
    }
    if (o.sampled || o.value_backend != Backend::kExact) {
      throw ConfigError("options.estimator", "the fairness screen runs on the exact backend only");
    }
    if (!o.sensitive) throw ConfigError("options.sensitive", "required for fairness-screen");
    if (!in.schema.find(*o.sensitive)) {
      throw ConfigError("options.sensitive", "unknown feature '" + *o.sensitive + "'");
    }
    FairnessScreenOptions fopt;
    fopt.tolerance = o.tolerance;
    fopt.max_rows = o.max_rows;
    fopt.seed = o.seed;
    fopt.workers = o.workers;
    fopt.quadrature = cfg.quadrature;
    fopt.limits.force = o.force;
    const auto& model = in.model;
    auto data = in.dataset;
    const std::string sensitive = *o.sensitive;
    return [=, &model] {
      return render(counterfactual_fairness_screen(model, data, sensitive, fopt));
    };
  }

  if (command == "compare-modes") {
    if (ref->mode() != ReferenceMode::kMarginal) {
      throw ConfigError("reference.mode", "compare-modes expects the marginal reference here");
    }
    if (!o.compare_reference) {
      throw ConfigError("options.compare_reference", "required for compare-modes");
    }
    auto cond = std::make_shared<const ReferenceDistribution>(
        build_reference(*o.compare_reference, in, "options.compare_reference"));
    if (!cond->is_conditional()) {
      throw ConfigError("options.compare_reference.mode", "expected a conditional mode");
    }
    if (in.instances.empty()) throw ConfigError("instances", "at least one instance is required");
    ModeComparisonOptions mopt;
    mopt.threshold = o.threshold;
    mopt.backend = cfg;
    mopt.limits.force = o.force;
    const auto& model = in.model;
    const auto instances = in.instances;
    return [=, &model] { return render(compare_modes(model, *ref, *cond, instances, mopt)); };
  }

  if (command == "validate") {
    if (in.instances.empty()) throw ConfigError("instances", "at least one instance is required");
    ValidateOptions vopt;
    vopt.seed = o.seed;
    vopt.tolerance = o.property_tolerance;
    vopt.backend = cfg;
    vopt.limits.force = o.force;
    const auto& model = in.model;
    const auto instances = in.instances;
    return [=, &model] { return render(validate_properties(model, *ref, instances, vopt)); };
  }
  throw ConfigError("command", "unknown command '" + command + "'");
}

}  // namespace detail

// Runs one command. Reports go to the configured output path (written
// atomically) or to `out`; errors go to `err` as one JSON line each.
inline int run(const std::string& command, const std::string& config_path,
               const CliOverrides& overrides, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig config;
  RunInputs inputs{FeatureSchema::continuous({"_"}), ModelExpr(constant(0.0), 1), DatasetPtr{}, {}, {}, {}};
  std::function<detail::Rendered()> job;
  try {
    if (!is_command(command)) throw ConfigError("command", "unknown command '" + command + "'");
    config = load_config(config_path);
    RunOptions& o = config.options;
    if (overrides.seed) o.seed = *overrides.seed;
    if (overrides.output) o.output = *overrides.output;
    if (overrides.format) o.format = *overrides.format;
    if (overrides.workers) o.workers = *overrides.workers;
    if (o.workers == 0) throw ConfigError("workers", "must be >= 1");
    inputs = build_inputs(config);
    job = detail::prepare(command, config, inputs);
  } catch (const std::exception& e) {
    err << error_record(e) << "\n";
    return static_cast<int>(ExitCode::kValidation);
  }
  try {
    const detail::Rendered r = job();
    std::string text;
    switch (config.options.format) {
      case OutputFormat::kJson: {
        Json doc;
        doc["command"] = command;
        doc["report"] = r.body;
        Json meta;
        meta["tool"] = std::string("coalition-attrib ") + kToolVersion;
        meta["generated_at"] = utc_timestamp();
        meta["workers"] = config.options.workers;
        doc["metadata"] = meta;
        text = doc.dump(2) + "\n";
        break;
      }
      case OutputFormat::kCsv: text = r.csv; break;
      case OutputFormat::kText: text = r.text; break;
    }
    if (config.options.output) {
      write_atomically(*config.options.output, text);
    } else {
      out << text;
      out.flush();
    }
  } catch (const std::exception& e) {
    err << error_record(e) << "\n";
    return static_cast<int>(ExitCode::kComputation);
  }
  return static_cast<int>(ExitCode::kOk);
}

}  // namespace coalition_attrib
