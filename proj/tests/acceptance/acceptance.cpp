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

// Acceptance suite: one PASS/FAIL line per criterion AC1..AC11, followed by
// indented detail lines with the measured numbers. Exit status is nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "distbne/config.hpp"
#include "distbne/gradient.hpp"
#include "distbne/learner.hpp"
#include "distbne/presets.hpp"
#include "distbne/runner.hpp"
#include "distbne/verify.hpp"
#include "oracles.hpp"

namespace {

using namespace distbne;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;
  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

double metric(const RunRecord& r, const std::string& name) {
  for (const auto& [k, v] : r.metrics) {
    if (k == name) return v;
  }
  return std::nan("");
}

struct Batch {
  BatchSummary summary;
  double wall_per_run = 0.0;
  double max_ell = 0.0;
  long max_iterations = 0;
  double mean(const std::string& m) const {
    const auto* a = summary.find(m);
    return a ? a->mean : std::nan("");
  }
  double sd(const std::string& m) const {
    const auto* a = summary.find(m);
    return a ? a->std : std::nan("");
  }
};

Batch run_preset(const std::string& id, int runs,
                 const std::map<std::string, std::string>& extra = {}) {
  ConfigMap m = preset_config(id);
  m["runs"] = std::to_string(runs);
  for (const auto& [k, v] : extra) m[k] = v;
  const auto t0 = Clock::now();
  Batch b;
  b.summary = run_batch(to_run_config(m), {});
  b.wall_per_run = since(t0) / runs;
  for (const auto& r : b.summary.runs) {
    if (!r.ok) {
      b.max_ell = std::numeric_limits<double>::infinity();
      continue;
    }
    b.max_ell = std::max(b.max_ell, metric(r, "ell_max"));
    b.max_iterations = std::max(b.max_iterations, r.iterations);
  }
  return b;
}

std::string ell_text(const Batch& b) {
  return "max ell " + fmt(b.max_ell) + " after <= " + std::to_string(b.max_iterations) +
         " iterations";
}

// FPSB, two bidders, uniform values, SODA1.
Verdict ac1() {
  Verdict v;
  const Batch b = run_preset("fpsb_2_uniform", 10);
  const auto cfg = preset_config("fpsb_2_uniform");
  v.note("preset fpsb_2_uniform, eta0=" + cfg.at("eta0") + " beta=" + cfg.at("beta") +
         ", 10 runs, 2^18 evaluation samples");
  v.need(b.summary.failed == 0 && b.max_ell < 1e-4 && b.max_iterations <= 1000,
         "ell < 1e-4 within 1000 iterations: " + ell_text(b));
  v.need(b.mean("L_agent0") <= 0.005,
         "L = " + fmt(b.mean("L_agent0")) + " (sd " + fmt(b.sd("L_agent0")) + ") <= 0.005");
  v.need(b.mean("L2_agent0") <= 0.02,
         "L2 = " + fmt(b.mean("L2_agent0")) + " (sd " + fmt(b.sd("L2_agent0")) + ") <= 0.02");
  v.need(b.wall_per_run < 30.0, "runtime " + fmt(b.wall_per_run) + " s per run < 30 s");
  return v;
}

// Discretization sweep K = L in {16, 32, 64, 128}.
Verdict ac2() {
  Verdict v;
  const std::vector<int> ks = {16, 32, 64, 128};
  const std::vector<double> table = {0.030, 0.008, 0.002, 0.001};
  ConfigMap m = preset_config("fpsb_2_uniform_sweep");
  m["runs"] = "10";
  v.note("preset fpsb_2_uniform_sweep: SODA1 eta0=" + m.at("eta0") +
         " beta=" + m.at("beta") + ", " + m.at("T") + " fixed iterations, 10 runs");
  const auto t0 = Clock::now();
  const auto rows = run_sweep(to_run_config(m), ks, {});
  const double total = since(t0);
  std::vector<double> L;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto* a = rows[i].summary.find("L_agent0");
    const auto* l2 = rows[i].summary.find("L2_agent0");
    L.push_back(a ? a->mean : std::nan(""));
    v.need(std::abs(L.back() - table[i]) <= 0.01,
           "K=L=" + std::to_string(ks[i]) + ": L = " + fmt(L.back()) + " (sd " +
               fmt(a ? a->std : std::nan("")) + "), reference " + fmt(table[i]) +
               " +- 0.01; L2 = " + fmt(l2 ? l2->mean : std::nan("")));
  }
  bool dec = true;
  for (std::size_t i = 1; i < L.size(); ++i) dec = dec && L[i] < L[i - 1];
  v.need(dec, "L strictly decreasing across the sweep");
  v.need(total < 300.0, "total runtime " + fmt(total) + " s < 300 s");
  return v;
}

// Common-value SPSB, three bidders, SOMA2.
Verdict ac3() {
  Verdict v;
  const Batch b = run_preset("common_value_spsb_soma2", 10);
  v.note("preset common_value_spsb_soma2, 10 runs");
  v.need(b.summary.failed == 0 && b.max_ell < 1e-4, "ell < 1e-4: " + ell_text(b));
  v.need(b.mean("L_agent0") <= 0.01,
         "L = " + fmt(b.mean("L_agent0")) + " (sd " + fmt(b.sd("L_agent0")) + ") <= 0.01");
  v.need(b.mean("L2_agent0") <= 0.05,
         "L2 = " + fmt(b.mean("L2_agent0")) + " (sd " + fmt(b.sd("L2_agent0")) + ") <= 0.05");
  v.need(b.wall_per_run <= 600.0, "runtime " + fmt(b.wall_per_run) + " s per run <= 600 s");
  return v;
}

// Affiliated-values FPSB, two bidders, every rule with a published step size.
Verdict ac4() {
  Verdict v;
  for (const std::string r : {"soda1", "soda2", "soma2"}) {
    const Batch b = run_preset("affiliated_fpsb_" + r, 10);
    v.need(b.mean("L_agent0") <= 0.01 && b.mean("L2_agent0") <= 0.03,
           r + ": L = " + fmt(b.mean("L_agent0")) + " <= 0.01, L2 = " +
               fmt(b.mean("L2_agent0")) + " <= 0.03 (10 runs; " + ell_text(b) + ")");
    v.need(b.wall_per_run < 60.0, r + ": runtime " + fmt(b.wall_per_run) + " s per run < 60 s");
  }
  return v;
}

// LLG with core-selecting rules.
Verdict ac5() {
  Verdict v;
  v.note("3 runs per setting; ties b1 + b2 = b3 go to the locals (preset llg_tie)");
  for (const std::string pr : {"nz", "nvcg", "nb"}) {
    for (const std::string g : {"01", "05", "09"}) {
      for (const std::string r : {"sofw", "soma2"}) {
        const std::string id = "llg_" + pr + "_g" + g + "_" + r;
        const Batch b = run_preset(id, 3);
        v.need(b.summary.failed == 0 && b.max_ell < 1e-4 && b.max_iterations <= 1000,
               id + ": " + ell_text(b));
        v.need(b.mean("L2_agent2") <= 0.03,
               id + ": global L2 vs truthful = " + fmt(b.mean("L2_agent2")) +
                   " <= 0.03 (" + fmt(b.wall_per_run) + " s per run)");
      }
    }
  }
  // Core invariants on random bid profiles.
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> loc(0, 1), glo(0, 2);
  double worst = 0.0;
  int violations = 0;
  for (auto rule : {PaymentRule::kNearestZero, PaymentRule::kNearestVcg,
                    PaymentRule::kNearestBid}) {
    Mechanism m;
    m.kind = MechanismKind::kLlg;
    m.agents = 3;
    m.payment_rule = rule;
    for (int t = 0; t < 10000; ++t) {
      const double b1 = loc(rng), b2 = loc(rng), b3 = glo(rng);
      const auto o = llg_outcome(m, std::vector<double>{b1, b2, b3});
      if (o.winner != LlgOutcome::kLocals) continue;
      const double p1 = o.payments[0], p2 = o.payments[1];
      if (p1 < -1e-12 || p2 < -1e-12 || p1 > b1 + 1e-12 || p2 > b2 + 1e-12 ||
          p1 + p2 < b3 - 1e-12) {
        ++violations;
      }
      std::array<double, 2> target{0.0, 0.0};
      if (rule == PaymentRule::kNearestVcg) {
        target = {std::max(0.0, b3 - b2), std::max(0.0, b3 - b1)};
      } else if (rule == PaymentRule::kNearestBid) {
        target = {b1, b2};
      }
      const auto q = oracle::qp_llg_core(target, b1, b2, b3);
      worst = std::max({worst, std::abs(p1 - q[0]), std::abs(p2 - q[1])});
    }
  }
  v.need(violations == 0, "core constraints hold on 3 x 10^4 random profiles (" +
                              std::to_string(violations) + " violations)");
  v.need(worst <= 1e-9, "payments within " + fmt(worst) + " of the projection oracle");
  return v;
}

// Split award, uniform prior: pooling equilibrium.
Verdict ac6() {
  Verdict v;
  const auto cfg = to_run_config(preset_config("split_award_uniform_soda1"));
  v.note(std::string("cost model: ") +
         (cfg.mech.split_cost == SplitCost::kMultiplicative ? "multiplicative" : "additive") +
         ", C = " + fmt(cfg.mech.split_c) + "; 3 runs per rule");
  for (const std::string r : {"soda1", "soda2"}) {
    const Batch b = run_preset("split_award_uniform_" + r, 3);
    v.need(b.summary.failed == 0 && b.max_ell < 1e-4, r + ": " + ell_text(b));
    v.need(b.mean("split_share") >= 0.95,
           r + ": split award in " + fmt(100 * b.mean("split_share")) + "% of auctions >= 95%");
    v.need(b.mean("upper_pooling_share") >= 0.9,
           r + ": " + fmt(100 * b.mean("upper_pooling_share")) +
               "% of 50% bids in the upper half of the pooling range "
               "[C o_max, (1-C) o_min] >= 90%");
    v.note(r + ": mean 50% bid " + fmt(b.mean("mean_bid50")) + ", mean 100% bid " +
           fmt(b.mean("mean_bid100")) + "; no closed-form baseline, L and L2 not reported");
  }
  return v;
}

// Risk-averse FPSB.
Verdict ac7() {
  Verdict v;
  const std::map<std::string, double> table_l2 = {{"05", 0.007}, {"07", 0.007}, {"09", 0.008}};
  std::vector<double> revenue;
  bool gate = true;
  std::vector<std::string> after_gate;
  struct Row {
    std::string rho, rule;
    double L, L2, t;
  };
  std::vector<Row> rows;
  for (const std::string rho : {"05", "07", "09"}) {
    for (const std::string r : {"soda1", "soda2", "soma2"}) {
      const Batch b = run_preset("risk_fpsb_rho" + rho + "_" + r, 10);
      rows.push_back({rho, r, b.mean("L_agent0"), b.mean("L2_agent0"), b.wall_per_run});
      // Gate: reported L = 0.001 and the reported L2 for this rho.
      const bool g = std::abs(b.mean("L_agent0") - 0.001) <= 0.002 &&
                     std::abs(b.mean("L2_agent0") - table_l2.at(rho)) <= 0.005;
      gate = gate && g;
      v.note("gate rho=0." + rho.substr(1) + " " + r + ": L = " + fmt(b.mean("L_agent0")) +
             " vs 0.001 +- 0.002, L2 = " + fmt(b.mean("L2_agent0")) + " vs " +
             fmt(table_l2.at(rho)) + " +- 0.005: " + (g ? "match" : "no match"));
      if (r == "soda1") revenue.push_back(b.mean("revenue"));
    }
  }
  v.need(gate, "closed form beta(o) = o/(1+rho) passes the gate against the reported losses");
  if (gate) {
    for (const auto& row : rows) {
      v.need(row.L <= 0.005 && row.L2 <= 0.02,
             "rho=0." + row.rho.substr(1) + " " + row.rule + ": L = " + fmt(row.L) +
                 " <= 0.005, L2 = " + fmt(row.L2) + " <= 0.02");
      v.need(row.t < 10.0, "rho=0." + row.rho.substr(1) + " " + row.rule + ": runtime " +
                               fmt(row.t) + " s per run < 10 s");
    }
  }
  const Batch neutral = run_preset("risk_fpsb_rho1_soda1", 10);
  revenue.push_back(neutral.mean("revenue"));
  bool dec = true;
  for (std::size_t i = 1; i < revenue.size(); ++i) dec = dec && revenue[i] < revenue[i - 1];
  std::string txt;
  for (double r : revenue) txt += (txt.empty() ? "" : " > ") + fmt(r);
  v.need(dec, "revenue strictly decreasing over rho = 0.5, 0.7, 0.9, 1 (SODA1): " + txt);
  return v;
}

// Tullock contests.
Verdict ac8() {
  Verdict v;
  v.note("3 runs per setting");
  for (const std::string rr : {"05", "1", "15"}) {
    for (const std::string kind : {"sym", "asym"}) {
      for (const std::string r : {"soda1", "soda2", "soma2"}) {
        const std::string id = "tullock_r" + rr + "_" + kind + "_" + r;
        const Batch b = run_preset(id, 3);
        const double limit = kind == "sym" ? 10.0 : 60.0;
        v.need(b.summary.failed == 0 && b.max_ell < 1e-4 && b.max_iterations <= 1000 &&
                   b.wall_per_run < limit,
               id + ": " + ell_text(b) + ", " + fmt(b.wall_per_run) + " s per run < " +
                   fmt(limit) + " s");
      }
    }
  }
  return v;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double d = 0.0;
  for (std::size_t x = 0; x < a.data.size(); ++x) d = std::max(d, std::abs(a.data[x] - b.data[x]));
  return d;
}

// Oracle equivalences.
Verdict ac9() {
  Verdict v;
  const auto t0 = Clock::now();
  Rng rng(31337);
  std::uniform_real_distribution<double> pos(0.1, 1.0);
  auto marginal = [&](int K) {
    std::vector<double> m(K);
    double s = 0.0;
    for (double& x : m) s += (x = pos(rng));
    for (double& x : m) x /= s;
    return m;
  };

  double naive = 0.0, linear = 0.0;
  {
    const Grid g = Grid::uniform(0, 1, 3);
    for (auto kind : {MechanismKind::kFpsb, MechanismKind::kSpsb, MechanismKind::kAllPay,
                      MechanismKind::kTullock}) {
      for (int rep = 0; rep < 5; ++rep) {
        Mechanism m;
        m.kind = kind;
        m.risk_rho = rep % 2 ? 0.7 : 1.0;
        const auto m0 = marginal(3), m1 = marginal(3);
        auto prior = std::make_shared<DiscretePrior>(DiscretePrior::independent({g, g}, {m0, m1}));
        const auto s0 = oracle::random_strategy(g, g, m0, rep);
        const auto s1 = oracle::random_strategy(g, g, m1, rep + 100);
        GradientOptions opt;
        opt.symmetric_fast_path = false;
        GradientEngine eng(m, prior, {{g}, {g}}, opt);
        const std::vector<const Strategy*> prof = {&s0, &s1};
        for (int i = 0; i < 2; ++i) {
          const Matrix c = eng.gradient(i, prof);
          naive = std::max(naive, max_abs_diff(c, oracle::naive_gradient(m, *prior, prof, i)));
          for (int t = 0; t < 5; ++t) {
            const auto s = oracle::random_strategy(g, g, i ? m1 : m0, 1000 + 10 * rep + t);
            auto p2 = prof;
            p2[i] = &s;
            linear = std::max(linear, std::abs(expected_utility(s, c) -
                                               oracle::naive_expected_utility(m, *prior, p2, i)));
          }
        }
      }
    }
  }
  v.need(naive <= 1e-12, "general gradient vs naive enumeration, K=L=3, n=2: max diff " + fmt(naive));
  v.need(linear <= 1e-12, "linearity <s, c> = u~: max diff " + fmt(linear));

  double sym = 0.0;
  for (auto kind : {MechanismKind::kFpsb, MechanismKind::kSpsb, MechanismKind::kAllPay}) {
    for (int n : {2, 3}) {
      for (int K : {4, 16}) {
        for (int L : {5, 16}) {
          Mechanism m;
          m.kind = kind;
          m.agents = n;
          const Grid o = Grid::uniform(0, 1, K), a = Grid::uniform(0, 1, L);
          const auto mg = marginal(K);
          auto prior = std::make_shared<DiscretePrior>(DiscretePrior::independent(
              std::vector<Grid>(n, o), std::vector<std::vector<double>>(n, mg)));
          const auto s = oracle::random_strategy(o, a, mg, K * 31 + L);
          const std::vector<const Strategy*> prof(n, &s);
          GradientOptions gen;
          gen.symmetric_fast_path = false;
          GradientEngine e1(m, prior, std::vector<std::vector<Grid>>(n, {a}), gen);
          GradientEngine e2(m, prior, std::vector<std::vector<Grid>>(n, {a}));
          sym = std::max(sym, max_abs_diff(e1.gradient(0, prof), e2.gradient(0, prof)));
        }
      }
    }
  }
  v.need(sym <= 1e-10, "symmetric vs general path, K,L <= 16, n <= 3: max diff " + fmt(sym));

  int br_mismatch = 0;
  std::uniform_int_distribution<int> small(0, 3);
  for (int t = 0; t < 500; ++t) {
    const int K = 2 + t % 5, L = 2 + t % 9;
    Matrix c(K, L);
    for (double& x : c.data) x = small(rng);
    const auto mg = marginal(K);
    const Matrix br = best_response(c, mg);
    for (int k = 0; k < K; ++k) {
      int best = 0;
      for (int l = 1; l < L; ++l) {
        Matrix e1(K, L), e2(K, L);
        e1(k, l) = mg[k];
        e2(k, best) = mg[k];
        if (frobenius_dot(e1, c) > frobenius_dot(e2, c)) best = l;
      }
      if (br(k, best) != mg[k]) ++br_mismatch;
    }
  }
  v.need(br_mismatch == 0, "best response vs row-vertex enumeration: " +
                               std::to_string(br_mismatch) + " mismatches in 500 instances");

  double proj = 0.0;
  std::uniform_int_distribution<int> len(1, 8);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> y(len(rng));
    for (double& x : y) x = nd(rng);
    const double mass = pos(rng);
    const auto ref = oracle::qp_simplex(y, mass);
    project_scaled_simplex(y, mass);
    for (std::size_t l = 0; l < y.size(); ++l) proj = std::max(proj, std::abs(y[l] - ref[l]));
  }
  v.need(proj <= 1e-9, "simplex projection vs support-enumeration QP on 10^3 rows: max diff " +
                           fmt(proj));
  const double t = since(t0);
  v.need(t < 60.0, "suite runtime " + fmt(t) + " s < 60 s");
  return v;
}

// Feasibility fuzzing.
Verdict ac10() {
  Verdict v;
  Rng rng(1618);
  std::uniform_int_distribution<int> rule_pick(0, 4), dim(2, 16);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> eta(1e-4, 100.0), scale(1e-3, 1e3), u(0, 1);
  double worst_row = 0.0, most_negative = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int K = dim(rng), L = dim(rng);
    std::vector<double> mg(K);
    double s = 0.0;
    for (double& x : mg) s += (x = u(rng) < 0.1 ? 0.0 : u(rng));
    if (s == 0.0) mg[0] = s = 1.0;
    for (double& x : mg) x /= s;
    const auto s0 = oracle::random_strategy(Grid::uniform(0, 1, K), Grid::uniform(0, 1, L), mg, t);
    LearnerState st({static_cast<Rule>(rule_pick(rng)), eta(rng), u(rng)}, s0);
    st.t = static_cast<long>(u(rng) * 500);
    Matrix c(K, L);
    const double sc = scale(rng);
    for (double& x : c.data) x = sc * nd(rng);
    st.step(c);
    for (int k = 0; k < K; ++k) {
      double row = 0.0;
      for (double x : st.iterate.matrix.row(k)) {
        row += x;
        most_negative = std::min(most_negative, x);
      }
      worst_row = std::max(worst_row, std::abs(row - mg[k]));
    }
  }
  v.need(worst_row <= 1e-10, "10^3 random (rule, gradient, step): max row-sum error " + fmt(worst_row));
  v.need(most_negative >= 0.0, "no negative entries (min " + fmt(most_negative) + ")");
  return v;
}

// Variational-stability probe.
Verdict ac11() {
  Verdict v;
  const Experiment exp = build_experiment(to_run_config(preset_config("fpsb_2_uniform")));
  const RunRecord rec = run_single(exp, 0, "");
  v.need(rec.ok && rec.reason == "converged",
         "equilibrium " + rec.reason + " after " + std::to_string(rec.iterations) + " iterations");
  if (!rec.ok) return v;
  std::vector<Strategy> probe;
  std::vector<const Strategy*> eq, pr;
  for (const auto& s : rec.strategies) probe.push_back(collusive_probe(s, 0.5));
  for (std::size_t i = 0; i < probe.size(); ++i) {
    eq.push_back(&rec.strategies[i]);
    pr.push_back(&probe[i]);
  }
  auto engine = exp.make_engine();
  const double val = vs_probe(*engine, eq, pr);
  v.need(val > 1e-6, "vs_probe at the collusive profile (bids halved) = " + fmt(val) + " > 1e-6");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> all = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},  {"AC5", ac5},  {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};
  std::vector<std::string> only(argv + 1, argv + argc);
  int failed = 0;
  for (const auto& [name, fn] : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.need(false, std::string("exception: ") + e.what());
    }
    if (!v.pass) ++failed;
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << " (" << fmt(since(t0)) << " s)\n";
    for (const auto& d : v.details) std::cout << "    " << d << '\n';
    std::cout << std::flush;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed")
            << '\n';
  return failed ? 1 : 0;
}
