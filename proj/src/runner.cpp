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

#include "distbne/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include "json.hpp"

#include "distbne/verify.hpp"

namespace distbne {
namespace fs = std::filesystem;
namespace {

std::vector<std::pair<double, double>> bounds_of(const std::vector<AxisSpec>& a) {
  std::vector<std::pair<double, double>> out;
  for (const auto& x : a) out.emplace_back(x.lower, x.upper);
  return out;
}

Grid grid_of(const AxisSpec& a) { return Grid::uniform(a.lower, a.upper, a.count); }

std::string agent_key(const std::string& name, int agent) {
  return name + "_agent" + std::to_string(agent);
}

void prepare_dir(const std::string& dir, bool force) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      throw Error("output path exists and is not a directory: " + dir);
    }
    if (!fs::is_empty(dir) && !force) {
      throw Error("output directory exists and is not empty: " + dir +
                  " (pass --force to overwrite)");
    }
  }
  fs::create_directories(dir);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void write_metrics(const fs::path& p, const RunRecord& r) {
  auto out = open_out(p);
  out << "metric,value\n";
  for (const auto& [k, v] : r.metrics) out << k << ',' << format_double(v) << '\n';
}

nlohmann::json meta_json(const Experiment& exp, const RunRecord& r) {
  nlohmann::json j;
  j["config_id"] = exp.config.id;
  j["config_hash"] = exp.hash;
  j["config"] = config_text(exp.config.source);
  j["version"] = DISTBNE_VERSION;
  j["mechanism"] = exp.config.mech.id();
  j["run"] = r.run;
  j["seed"] = std::to_string(r.seed);
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["reason"] = r.reason;
  j["iterations"] = r.iterations;
  j["seconds"] = r.seconds;
  j["prior_samples"] = std::to_string(exp.config.prior_samples);
  j["prior_seed"] = std::to_string(exp.config.prior_seed);
  j["chosen"] = exp.config.chosen;
  j["baseline"] = exp.baseline ? exp.baseline->id : "";
  return j;
}

}  // namespace

ContinuousPrior make_continuous_prior(const RunConfig& c) {
  const int n = c.mech.agents;
  const auto b = bounds_of(c.obs);
  if (c.prior == "uniform") return uniform_prior(b);
  if (c.prior == "gaussian_trunc") {
    return truncated_gaussian_prior(c.prior_mean, c.prior_sigma, b);
  }
  if (c.prior == "custom_density") {
    return tabulated_density_prior(c.prior_density, b);
  }
  if (c.prior == "common_value") return common_value_prior(n);
  if (c.prior == "affiliated") {
    if (n != 2) throw Error("affiliated prior needs exactly two agents");
    return affiliated_prior();
  }
  if (c.prior == "bernoulli_llg") {
    if (n != 3) throw Error("bernoulli_llg prior needs exactly three agents");
    return bernoulli_llg_prior(c.prior_gamma);
  }
  throw Error("unknown prior '" + c.prior + "'");
}

Experiment build_experiment(const RunConfig& config) {
  Experiment e;
  e.config = config;
  e.hash = config_hash(config.source);
  e.continuous = make_continuous_prior(config);
  std::vector<Grid> obs, val;
  for (const auto& a : config.obs) obs.push_back(grid_of(a));
  for (const auto& a : config.val) val.push_back(grid_of(a));
  e.prior = std::make_shared<const DiscretePrior>(discretize_prior(
      e.continuous, obs, val, config.prior_samples, config.prior_seed));
  for (const auto& per : config.action) {
    std::vector<Grid> g;
    for (const auto& a : per) g.push_back(grid_of(a));
    e.action_grids.push_back(std::move(g));
  }
  if (config.eval_baseline) {
    e.baseline = lookup_analytic(config.mech, e.continuous.kind);
  }
  return e;
}

std::unique_ptr<GradientEngine> Experiment::make_engine() const {
  GradientOptions go;
  go.memory_budget = config.memory_budget;
  return std::make_unique<GradientEngine>(config.mech, prior, action_grids, go);
}

RunOptions Experiment::run_options(std::uint64_t seed) const {
  RunOptions o;
  o.learner = config.learner;
  o.max_iterations = config.max_iterations;
  o.tolerance = config.tolerance;
  o.check_interval = config.check_interval;
  o.init = config.init;
  o.seed = seed;
  o.groups = config.groups;
  return o;
}

Metrics evaluate_profile(const Experiment& exp,
                         const std::vector<const Strategy*>& profile,
                         std::uint64_t seed) {
  Metrics m;
  const RunConfig& c = exp.config;
  const std::uint64_t eval_seed = derive_seed(seed, 0x5eed);
  if (exp.baseline && c.mech.action_dims() == 1) {
    const EvalReport rep = evaluate(profile, *exp.baseline, exp.continuous,
                                    c.mech, c.eval_samples, eval_seed);
    for (std::size_t e = 0; e < rep.agents.size(); ++e) {
      m.emplace_back(agent_key("L", rep.agents[e]), rep.loss[e]);
      m.emplace_back(agent_key("L2", rep.agents[e]), rep.l2[e]);
    }
  }
  m.emplace_back("revenue", estimate_revenue(profile, exp.continuous, c.mech,
                                             c.eval_samples, eval_seed + 1));
  if (c.mech.kind == MechanismKind::kSplitAward) {
    const SplitAwardStats st =
        split_award_stats(profile, exp.continuous, c.mech, c.obs[0].lower,
                          c.obs[0].upper, c.eval_samples, eval_seed + 2);
    m.emplace_back("split_share", st.split_share);
    m.emplace_back("sole_share", st.sole_share);
    m.emplace_back("none_share", st.none_share);
    m.emplace_back("mean_bid50", st.mean_bid50);
    m.emplace_back("mean_bid100", st.mean_bid100);
    m.emplace_back("upper_pooling_share", st.upper_pooling_share);
  }
  return m;
}

std::uint64_t run_seed(std::uint64_t master, int run) {
  return derive_seed(master, static_cast<std::uint64_t>(run));
}

RunRecord run_single(const Experiment& exp, int run, const std::string& dir) {
  RunRecord r;
  r.run = run;
  r.seed = run_seed(exp.config.seed, run);
  std::ofstream progress;
  if (!dir.empty()) {
    fs::create_directories(dir);
    progress = open_out(fs::path(dir) / "progress.jsonl");
  }
  try {
    auto engine = exp.make_engine();
    RunOptions opt = exp.run_options(r.seed);
    if (progress.is_open()) opt.progress = &progress;
    const RunResult res = distbne::run(*engine, opt);
    r.reason = res.reason;
    r.iterations = res.iterations;
    r.seconds = res.seconds;
    const int n = exp.config.mech.agents;
    for (int a = 0; a < n; ++a) r.strategies.push_back(res.strategy_of(a));
    r.metrics.emplace_back("iterations", static_cast<double>(res.iterations));
    r.metrics.emplace_back("seconds", res.seconds);
    r.metrics.emplace_back("converged", res.reason == "converged" ? 1.0 : 0.0);
    r.metrics.emplace_back("ell_max", res.certificate.max_loss());
    for (int a = 0; a < n; ++a) {
      r.metrics.emplace_back(agent_key("ell", a), res.certificate.loss[a]);
    }
    const Metrics ev = evaluate_profile(exp, res.profile(), r.seed);
    r.metrics.insert(r.metrics.end(), ev.begin(), ev.end());
    r.ok = true;

    if (!dir.empty()) {
      for (int a = 0; a < n; ++a) {
        StrategyMeta meta;
        meta.mechanism_id = exp.config.mech.id();
        meta.agent = a;
        meta.iteration = res.iterations;
        meta.seed = r.seed;
        meta.config_hash = exp.hash;
        write_strategy((fs::path(dir) / ("strategy_agent" + std::to_string(a) +
                                         ".csv")).string(),
                       r.strategies[a], meta);
      }
      write_metrics(fs::path(dir) / "metrics.csv", r);
      auto plot = open_out(fs::path(dir) / "plotdata.csv");
      const auto prof = res.profile();
      const AnalyticBNE* beta = exp.baseline ? &*exp.baseline : nullptr;
      for (int a = 0; a < n; ++a) {
        emit_plot_data(plot, prof, exp.continuous, beta, a,
                       exp.config.plot_count, derive_seed(r.seed, 0x9107 + a),
                       a == 0);
      }
    }
  } catch (const std::exception& ex) {
    r.ok = false;
    r.error = ex.what();
  }
  if (!dir.empty()) {
    auto meta = open_out(fs::path(dir) / "meta.json");
    meta << meta_json(exp, r).dump(2) << '\n';
  }
  return r;
}

std::vector<Aggregate> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<Aggregate> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<double>> values;
  for (const auto& r : runs) {
    if (!r.ok) continue;
    for (const auto& [k, v] : r.metrics) {
      auto it = index.find(k);
      if (it == index.end()) {
        it = index.emplace(k, out.size()).first;
        out.push_back(Aggregate{k});
        values.emplace_back();
      }
      if (!std::isnan(v)) values[it->second].push_back(v);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = values[i];
    out[i].count = static_cast<int>(xs.size());
    if (xs.empty()) {
      out[i].mean = out[i].std = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    out[i].mean = mean;
    out[i].std = std::sqrt(var / xs.size());
  }
  return out;
}

const Aggregate* BatchSummary::find(const std::string& metric) const {
  for (const auto& a : aggregates) {
    if (a.metric == metric) return &a;
  }
  return nullptr;
}

BatchSummary run_batch(const RunConfig& config, const BatchOptions& options) {
  if (!options.out_dir.empty()) prepare_dir(options.out_dir, options.force);
  const Experiment exp = build_experiment(config);
  BatchSummary s;
  for (int r = 0; r < config.runs; ++r) {
    const std::string dir =
        options.out_dir.empty()
            ? ""
            : (fs::path(options.out_dir) / ("run_" + std::to_string(r))).string();
    s.runs.push_back(run_single(exp, r, dir));
    const RunRecord& rec = s.runs.back();
    if (!rec.ok) {
      ++s.failed;
      if (options.log) {
        *options.log << "warning: run " << r << " failed and is excluded: "
                     << rec.error << '\n';
      }
    } else if (options.log) {
      *options.log << config.id << " run " << r << ": " << rec.reason << " after "
                   << rec.iterations << " iterations, "
                   << format_double(rec.seconds) << " s\n";
    }
  }
  s.aggregates = aggregate(s.runs);
  if (!options.out_dir.empty()) {
    auto out = open_out(fs::path(options.out_dir) / "summary.csv");
    out << "metric,mean,std,count\n";
    for (const auto& a : s.aggregates) {
      out << a.metric << ',' << format_double(a.mean) << ','
          << format_double(a.std) << ',' << a.count << '\n';
    }
    auto meta = open_out(fs::path(options.out_dir) / "batch.json");
    nlohmann::json j;
    j["config_id"] = config.id;
    j["config_hash"] = exp.hash;
    j["version"] = DISTBNE_VERSION;
    j["runs"] = config.runs;
    j["failed"] = s.failed;
    j["master_seed"] = std::to_string(config.seed);
    std::vector<std::string> seeds;
    for (const auto& r : s.runs) seeds.push_back(std::to_string(r.seed));
    j["seeds"] = seeds;
    j["chosen"] = config.chosen;
    meta << j.dump(2) << '\n';
    auto cfg = open_out(fs::path(options.out_dir) / "config.cfg");
    cfg << config_text(config.source);
  }
  return s;
}

std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<int>& grid,
                                const BatchOptions& options) {
  if (grid.empty()) throw Error("sweep: empty grid list");
  if (!options.out_dir.empty()) prepare_dir(options.out_dir, options.force);
  std::vector<SweepRow> rows;
  for (int k : grid) {
    ConfigMap m = config.source;
    m["obs.K"] = std::to_string(k);
    m["action.L"] = std::to_string(k);
    m.erase("sweep.grid");
    RunConfig c = to_run_config(m);
    BatchOptions bo = options;
    if (!options.out_dir.empty()) {
      bo.out_dir = (fs::path(options.out_dir) / ("K" + std::to_string(k))).string();
    }
    rows.push_back({k, run_batch(c, bo)});
  }
  if (!options.out_dir.empty()) {
    auto out = open_out(fs::path(options.out_dir) / "sweep.csv");
    out << "K,metric,mean,std,count\n";
    for (const auto& r : rows) {
      for (const auto& a : r.summary.aggregates) {
        out << r.grid << ',' << a.metric << ',' << format_double(a.mean) << ','
            << format_double(a.std) << ',' << a.count << '\n';
      }
    }
  }
  return rows;
}

void check_stored_profile(const Experiment& exp,
                          const std::vector<Strategy>& profile,
                          const std::vector<StrategyMeta>& meta) {
  const int n = exp.config.mech.agents;
  if (static_cast<int>(profile.size()) != n) {
    throw Error("stored profile has " + std::to_string(profile.size()) +
                " strategies, mechanism needs " + std::to_string(n));
  }
  const std::string id = exp.config.mech.id();
  for (int a = 0; a < n; ++a) {
    if (a < static_cast<int>(meta.size()) && meta[a].mechanism_id != id) {
      throw Error("strategy for agent " + std::to_string(a) +
                  " was computed for mechanism '" + meta[a].mechanism_id +
                  "', not '" + id + "'");
    }
    if (!(profile[a].obs_grid == exp.prior->obs_grid(a))) {
      throw Error("strategy for agent " + std::to_string(a) +
                  " has an observation grid that does not match the prior");
    }
    if (profile[a].action_grids != exp.action_grids[a]) {
      throw Error("strategy for agent " + std::to_string(a) +
                  " has action grids that do not match the configuration");
    }
  }
}

std::vector<Strategy> load_profile(const Experiment& exp, const std::string& dir,
                                   std::vector<StrategyMeta>* meta) {
  std::vector<Strategy> out;
  std::vector<StrategyMeta> metas;
  for (int a = 0; a < exp.config.mech.agents; ++a) {
    const fs::path p = fs::path(dir) / ("strategy_agent" + std::to_string(a) + ".csv");
    if (!fs::exists(p)) throw Error("missing strategy file " + p.string());
    StrategyMeta m;
    out.push_back(read_strategy(p.string(), &m));
    metas.push_back(m);
  }
  check_stored_profile(exp, out, metas);
  if (meta) *meta = std::move(metas);
  return out;
}

}  // namespace distbne
