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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion passes. Criteria run through the same entry point as
// the command-line tool, against the configs checked in under configs/.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coalition_attrib.hpp"
#include "fixtures.hpp"
#include "property_suite.hpp"

namespace ca = coalition_attrib;
namespace ct = coalition_attrib::testing;
using Json = nlohmann::ordered_json;

namespace {

const std::string kConfigs = std::string(CA_SOURCE_DIR) + "/configs/";

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// Runs a command in-process and returns the report body.
Json run_report(const std::string& command, const std::string& config, ca::CliOverrides o = {}) {
  std::ostringstream out, err;
  const int code = ca::run(command, config, o, out, err);
  if (code != 0) throw std::runtime_error(command + " " + config + " exited " + std::to_string(code) + ": " + err.str());
  return Json::parse(out.str())["report"];
}

std::string run_text(const std::string& command, const std::string& config, ca::OutputFormat format) {
  std::ostringstream out, err;
  ca::CliOverrides o;
  o.format = format;
  if (ca::run(command, config, o, out, err) != 0) throw std::runtime_error(err.str());
  return out.str();
}

double phi_of(const Json& report, std::size_t j) { return report["attributions"][j]["phi"].get<double>(); }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) { return ca::format_double(v); }

// -------------------------------------------------------------------- 1
void uniform_sum(Outcome& o) {
  const auto exact = run_report("explain", kConfigs + "uniform_sum.json");
  const auto sampled = run_report("explain", kConfigs + "uniform_sum_sampled.json");
  o.require(exact["backend"] == "quadrature", "exact run uses quadrature");
  o.require(near(phi_of(exact, 0), -0.5, 1e-9) && near(phi_of(exact, 1), -1.5, 1e-9), "exact phi");
  o.require(sampled["permutations"] == 20000 && sampled["reference_draws"] == 10 && sampled["seed"] == 0,
            "sampled settings P=20000 R=10 seed=0");
  o.require(near(phi_of(sampled, 0), -0.5, 0.03) && near(phi_of(sampled, 1), -1.5, 0.03), "sampled phi");
  o.detail << "exact=(" << fmt(phi_of(exact, 0)) << ", " << fmt(phi_of(exact, 1)) << ") sampled=("
           << fmt(phi_of(sampled, 0)) << ", " << fmt(phi_of(sampled, 1)) << ")";
}

// -------------------------------------------------------------------- 2
void gaussian_squares(Outcome& o) {
  const auto exact = run_report("explain", kConfigs + "gaussian_squares.json");
  const auto sampled = run_report("explain", kConfigs + "gaussian_squares_sampled.json");
  o.require(near(phi_of(exact, 0), -1.0, 1e-6) && near(phi_of(exact, 1), -100.0, 1e-4), "exact phi");
  o.require(sampled["permutations"] == 50000, "sampled P=50000");
  o.require(near(phi_of(sampled, 0), -1.0, 0.05) && near(phi_of(sampled, 1), -100.0, 3.0), "sampled phi");
  o.detail << "exact=(" << fmt(phi_of(exact, 0)) << ", " << fmt(phi_of(exact, 1)) << ") sampled=("
           << fmt(phi_of(sampled, 0)) << ", " << fmt(phi_of(sampled, 1)) << ")";
}

// -------------------------------------------------------------------- 3
void all_male_screens(Outcome& o) {
  for (const char* p : {"20", "50", "80"}) {
    const std::string config = kConfigs + "all_male_cohort_p" + p + ".json";
    const auto r = run_report("fairness-screen", config);
    double worst = 0.0;
    for (const auto& e : r["rows"]) worst = std::max(worst, std::abs(e["phi"].get<double>()));
    const std::string text = run_text("fairness-screen", config, ca::OutputFormat::kText);
    o.require(worst <= 1e-9, std::string("phi_male = 0 at p=0.") + p);
    o.require(r["verdict"] == ca::kVerdictPass, std::string("PASS at p=0.") + p);
    o.require(text.find(ca::kFairnessCaveat) != std::string::npos, std::string("caveat in text at p=0.") + p);
    o.detail << "p=0." << p << ": " << r["verdict"].get<std::string>() << " max|phi|=" << fmt(worst) << "; ";
  }
}

// -------------------------------------------------------------------- 4
void threshold_cancellation(Outcome& o) {
  const auto r = run_report("deltas", kConfigs + "threshold_switch.json");
  double d_empty = NAN, d_x1 = NAN;
  for (const auto& d : r["deltas"]) {
    if (d["coalition"].empty()) d_empty = d["delta"].get<double>();
    if (d["coalition"] == Json::array({"x1"})) d_x1 = d["delta"].get<double>();
  }
  const double phi = r["phi"].get<double>();
  o.require(r["feature"] == "x2", "feature x2");
  o.require(near(phi, 0.0, 1e-6), "phi_2 = 0");
  o.require(near(d_empty, -0.5, 1e-6), "delta(empty) = -0.5");
  o.require(near(d_x1, 0.5, 1e-6), "delta({x1}) = +0.5");
  o.require(r["cancellation"].get<bool>(), "cancellation flag");
  o.detail << "phi_2=" << fmt(phi) << " deltas=(" << fmt(d_empty) << ", " << fmt(d_x1)
           << ") cancellation=" << (r["cancellation"].get<bool>() ? "true" : "false");
}

// -------------------------------------------------------------------- 5
void property_suite(Outcome& o) {
  double eff = 0, lin = 0, form = 0, sym = 0;
  std::size_t dummy_checked = 0, dummy_failed = 0, marginal_dummy = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = ct::make_triple(seed);
    const auto c = ct::check_triple(t);
    eff = std::max(eff, c.efficiency);
    lin = std::max(lin, c.linearity);
    form = std::max(form, c.formulation);
    dummy_checked += c.dummy_checked;
    dummy_failed += c.dummy_failed;
    if (t.kind == ct::TripleKind::kDatasetMarginal || t.kind == ct::TripleKind::kParametricMarginal)
      marginal_dummy += c.dummy_checked;
    sym = std::max(sym, ct::symmetry_residual(ct::make_symmetric(seed)));
  }
  std::size_t oracle_ok = 0;
  for (std::size_t i = 0; i < 20; ++i) oracle_ok += ct::oracle_check(i).within() ? 1 : 0;
  o.require(eff <= 1e-9, "efficiency");
  o.require(sym <= 1e-9, "symmetry");
  o.require(lin <= 1e-9, "linearity");
  o.require(form <= 1e-9, "permutation/subset agreement");
  o.require(dummy_failed == 0 && marginal_dummy > 0, "dummy");
  o.require(oracle_ok == 20, "sampled within 4 SE");
  o.detail << "200 triples: efficiency " << fmt(eff) << ", symmetry " << fmt(sym) << ", linearity "
           << fmt(lin) << ", formulations " << fmt(form) << ", dummy " << dummy_checked - dummy_failed
           << "/" << dummy_checked << "; sampled-vs-exact " << oracle_ok << "/20 within 4 SE";
}

// -------------------------------------------------------------------- 6
void mode_divergence(Outcome& o) {
  const auto data = std::make_shared<const ca::Dataset>(ca::load_csv(kConfigs + "chain_copy.csv"));
  const auto& schema = data->schema();
  const auto marg = ca::ReferenceDistribution::marginal(data);
  const auto cond = ca::ReferenceDistribution::conditional_empirical(data);
  const auto fa = ca::parse_model("x1", schema);
  const auto fb = ca::parse_model("x2", schema);
  const double mean_x1 = data->column_mean(0);
  bool cond_agree = true, marg_gap = true;
  for (std::size_t r = 0; r < data->rows(); ++r) {
    const ca::Instance x = data->instance(r);
    const auto ca_ = ca::exact_shapley(fa, cond, x);
    const auto cb = ca::exact_shapley(fb, cond, x);
    const auto ma = ca::exact_shapley(fa, marg, x);
    const auto mb = ca::exact_shapley(fb, marg, x);
    const double expected = std::abs(x[0] - mean_x1);
    for (std::size_t j = 0; j < 2; ++j) {
      cond_agree = cond_agree && near(ca_.phi[j], cb.phi[j], 1e-9);
      marg_gap = marg_gap && near(std::abs(ma.phi[j] - mb.phi[j]), expected, 1e-9);
    }
  }
  const auto r = run_report("compare-modes", kConfigs + "mode_divergence.json");
  o.require(cond_agree, "conditional attributions of x1 and x2 agree");
  o.require(marg_gap, "marginal attributions differ by |x1 - E X1|");
  o.require(r["flagged"] == Json::array({"x1", "x2"}), "both features flagged");
  o.detail << "E X1=" << fmt(mean_x1) << ", conditional agree=" << (cond_agree ? "yes" : "no")
           << ", marginal gap=|x1-E X1|: " << (marg_gap ? "yes" : "no")
           << ", flagged=" << r["flagged"].dump();
}

// -------------------------------------------------------------------- 7
void causal_ordering(Outcome& o) {
  const auto r = run_report("explain", kConfigs + "asymmetric_chain.json");
  const double ef = r["base"].get<double>();
  o.require(near(phi_of(r, 0), 1.0 - ef, 1e-9) && near(phi_of(r, 1), 0.0, 1e-9), "chain (1 - E f, 0)");
  o.detail << "chain phi=(" << fmt(phi_of(r, 0)) << ", " << fmt(phi_of(r, 1)) << ") E f=" << fmt(ef);

  // Empty graph: asymmetric == conditional Shapley, causal == marginal Shapley.
  double asym_gap = 0.0, causal_gap = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ct::Gen g(500 + seed);
    const std::size_t m = 2 + g.index(3);
    const auto schema = ca::FeatureSchema::continuous(ct::feature_names(m));
    const auto data = ct::dataset(schema, ct::random_rows(g, 4 + g.index(4), m));
    ct::ExprGen gen(g, schema, {0, 1, m - 1}, ct::dataset_shape());
    const auto f = gen.model();
    const auto x = ct::random_instance(g, m);
    const auto empty = ca::CausalGraph::empty(schema);
    const auto cond = ca::ReferenceDistribution::conditional_empirical(data);
    const auto a = ca::asymmetric_shapley(f, cond, x, empty);
    const auto s = ca::exact_shapley(f, cond, x);
    const auto c = ca::causal_shapley(f, ca::ReferenceDistribution::interventional_dag(data, empty), x);
    const auto mg = ca::exact_shapley(f, ca::ReferenceDistribution::marginal(data), x);
    asym_gap = std::max(asym_gap, ct::max_gap(a.phi, s.phi));
    causal_gap = std::max(causal_gap, ct::max_gap(c.phi, mg.phi));
  }
  o.require(asym_gap <= 1e-9, "empty-graph asymmetric == conditional");
  o.require(causal_gap <= 1e-9, "empty-graph causal == marginal");
  o.detail << "; empty graph: |asym - cond| " << fmt(asym_gap) << ", |causal - marginal| " << fmt(causal_gap);
}

// -------------------------------------------------------------------- 8
std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("cannot run " + cmd);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  if (pclose(pipe) != 0) throw std::runtime_error(cmd + " failed");
  return out;
}

void determinism(Outcome& o) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"explain", "uniform_sum_sampled.json"},
      {"explain", "gaussian_squares_sampled.json"},
      {"explain", "threshold_switch_monte_carlo.json"},
      {"explain", "causal_chain_sampled.json"},
      {"fairness-screen", "fairness_mixed_cohort.json"}};
  std::size_t identical = 0;
  for (const auto& [command, config] : runs) {
    std::vector<std::string> bodies, csv;
    for (const char* workers : {"1", "2", "4"}) {
      const std::string base = std::string(CA_CLI_PATH) + " " + command + " --config " + kConfigs + config +
                               " --workers " + workers;
      bodies.push_back(Json::parse(capture(base))["report"].dump());
      csv.push_back(capture(base + " --format csv"));
    }
    const bool same = bodies[0] == bodies[1] && bodies[0] == bodies[2] && csv[0] == csv[1] && csv[0] == csv[2];
    o.require(same, config + " identical across --workers 1/2/4");
    identical += same ? 1 : 0;
  }
  o.detail << identical << "/" << runs.size() << " runs byte-identical across --workers 1, 2, 4";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> body;
    double time_limit_s;  // 0: no limit
  };
  const std::vector<Criterion> criteria{
      {1, "uniform-sum closed form", uniform_sum, 5.0},
      {2, "gaussian-squares closed form", gaussian_squares, 0.0},
      {3, "all-male cohort screens", all_male_screens, 0.0},
      {4, "threshold-switch cancellation", threshold_cancellation, 0.0},
      {5, "property suite", property_suite, 60.0},
      {6, "marginal/conditional mode divergence", mode_divergence, 0.0},
      {7, "causal-ordering sanity", causal_ordering, 0.0},
      {8, "determinism across worker counts", determinism, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail << " [over time limit " << c.time_limit_s << " s]";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " — "
              << o.detail.str() << " (" << timing << ")" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
