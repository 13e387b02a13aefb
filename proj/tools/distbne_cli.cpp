// Copyright 2026 The distbne Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: solve, evaluate, sweep, preset, probe-vs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "distbne/config.hpp"
#include "distbne/presets.hpp"
#include "distbne/runner.hpp"
#include "distbne/verify.hpp"

namespace {

using namespace distbne;

struct Common {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;  // key=value
  long long seed = -1;
  int runs = 0;
  long long samples = 0;
  std::string out;
  bool force = false;
};

void add_source(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "configuration file");
  app->add_option("--preset", c.preset, "shipped preset id");
  app->add_option("--set", c.overrides, "override key=value (repeatable)");
  app->add_option("--seed", c.seed, "master seed");
}

void add_batch(CLI::App* app, Common& c) {
  app->add_option("--runs", c.runs, "number of runs");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--n-samples", c.samples, "evaluation sample count");
  app->add_flag("--force", c.force, "write into a non-empty output directory");
}

RunConfig resolve(const Common& c, const std::string& fallback_preset = "") {
  ConfigMap m;
  if (!c.config_path.empty()) {
    m = load_config(c.config_path);
  } else if (!c.preset.empty()) {
    m = preset_config(c.preset);
  } else if (!fallback_preset.empty()) {
    m = preset_config(fallback_preset);
  } else {
    throw Error("pass --config PATH or --preset ID");
  }
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("--set expects key=value: " + kv);
    m[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (c.seed >= 0) m["seed"] = std::to_string(c.seed);
  if (c.runs > 0) m["runs"] = std::to_string(c.runs);
  if (c.samples > 0) m["eval.samples"] = std::to_string(c.samples);
  return to_run_config(m);
}

std::string default_out(const RunConfig& c, const std::string& out) {
  return out.empty() ? "runs/" + c.id : out;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

void print_summary(const BatchSummary& s) {
  std::cout << "metric,mean,std,count\n";
  for (const auto& a : s.aggregates) {
    std::cout << a.metric << ',' << num(a.mean) << ',' << num(a.std) << ','
              << a.count << '\n';
  }
  if (s.failed > 0) std::cout << "failed runs: " << s.failed << '\n';
}

int batch(const RunConfig& cfg, const Common& c) {
  BatchOptions bo;
  bo.out_dir = default_out(cfg, c.out);
  bo.force = c.force;
  bo.log = &std::cerr;
  if (!cfg.sweep_grid.empty()) {
    const auto rows = run_sweep(cfg, cfg.sweep_grid, bo);
    for (const auto& r : rows) {
      std::cout << "K=L=" << r.grid << '\n';
      print_summary(r.summary);
    }
    std::cout << "output: " << bo.out_dir << '\n';
    return 0;
  }
  const BatchSummary s = run_batch(cfg, bo);
  print_summary(s);
  std::cout << "output: " << bo.out_dir << '\n';
  return s.failed == cfg.runs ? 1 : 0;
}

std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(',', start);
    const std::string tok = s.substr(start, pos - start);
    try {
      std::size_t used = 0;
      const int k = std::stoi(tok, &used);
      if (used != tok.size() || k < 2) throw std::invalid_argument(tok);
      out.push_back(k);
    } catch (const std::exception&) {
      throw Error("--grid expects integers >= 2 separated by commas, got '" +
                  s + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional Bayes-Nash equilibrium solver"};
  app.require_subcommand(1);

  Common solve_opts;
  auto* solve = app.add_subcommand("solve", "learn equilibria for one config");
  add_source(solve, solve_opts);
  add_batch(solve, solve_opts);

  Common eval_opts;
  std::string strategy_dir;
  auto* eval = app.add_subcommand("evaluate",
                                  "evaluate stored strategies against the baseline");
  add_source(eval, eval_opts);
  eval->add_option("--strategies", strategy_dir,
                   "run directory with strategy_agent<i>.csv")
      ->required();
  eval->add_option("--n-samples", eval_opts.samples, "evaluation sample count");

  Common sweep_opts;
  std::string grid = "16,32,64,128";
  auto* sweep = app.add_subcommand("sweep", "discretization sweep over K = L");
  add_source(sweep, sweep_opts);
  add_batch(sweep, sweep_opts);
  sweep->add_option("--grid", grid, "comma-separated K = L values");

  auto* preset = app.add_subcommand("preset", "shipped experiment configs");
  preset->require_subcommand(1);
  auto* plist = preset->add_subcommand("list", "list preset ids");
  Common prun_opts;
  std::string prun_id;
  bool show_only = false;
  auto* prun = preset->add_subcommand("run", "run a preset");
  prun->add_option("id", prun_id, "preset id")->required();
  prun->add_option("--seed", prun_opts.seed, "master seed");
  prun->add_option("--set", prun_opts.overrides, "override key=value");
  prun->add_flag("--show", show_only, "print the config and exit");
  add_batch(prun, prun_opts);

  Common probe_opts;
  double factor = 0.5;
  auto* probe = app.add_subcommand(
      "probe-vs", "variational-stability probe at a collusive profile");
  add_source(probe, probe_opts);
  probe->add_option("--factor", factor, "probe bid as a fraction of the mean bid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      return batch(resolve(solve_opts), solve_opts);
    }
    if (*eval) {
      const RunConfig cfg = resolve(eval_opts);
      const Experiment exp = build_experiment(cfg);
      const auto profile = load_profile(exp, strategy_dir);
      std::vector<const Strategy*> ptrs;
      for (const auto& s : profile) ptrs.push_back(&s);
      const Metrics m = evaluate_profile(exp, ptrs, cfg.seed);
      std::cout << "metric,value\n";
      for (const auto& [k, v] : m) std::cout << k << ',' << num(v) << '\n';
      if (!exp.baseline) std::cout << "note: no analytic baseline\n";
      return 0;
    }
    if (*sweep) {
      RunConfig cfg = resolve(sweep_opts);
      cfg.sweep_grid = parse_grid(grid);
      return batch(cfg, sweep_opts);
    }
    if (*plist) {
      for (const auto& id : preset_ids()) {
        std::cout << id << '\t' << preset_config(id)["description"] << '\n';
      }
      return 0;
    }
    if (*prun) {
      prun_opts.preset = prun_id;
      const RunConfig cfg = resolve(prun_opts);
      if (show_only) {
        std::cout << config_text(cfg.source);
        return 0;
      }
      return batch(cfg, prun_opts);
    }
    if (*probe) {
      RunConfig cfg = resolve(probe_opts, "fpsb_2_uniform");
      const Experiment exp = build_experiment(cfg);
      const RunRecord rec = run_single(exp, 0, "");
      if (!rec.ok) throw Error(rec.error);
      std::vector<Strategy> probes;
      std::vector<const Strategy*> eq, pr;
      for (const auto& s : rec.strategies) probes.push_back(collusive_probe(s, factor));
      for (std::size_t i = 0; i < probes.size(); ++i) {
        eq.push_back(&rec.strategies[i]);
        pr.push_back(&probes[i]);
      }
      auto engine = exp.make_engine();
      const double v = vs_probe(*engine, eq, pr);
      std::cout << "equilibrium: " << rec.reason << " after " << rec.iterations
                << " iterations\n";
      std::cout << "vs_probe," << num(v) << '\n';
      std::cout << (v > 0.0 ? "variational stability fails at the probe\n"
                            : "no violation detected at the probe\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
