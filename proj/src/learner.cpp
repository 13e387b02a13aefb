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

#include "distbne/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "distbne/strategy_io.hpp"

namespace distbne {

Rule parse_rule(const std::string& s) {
  if (s == "soda1" || s == "soda1_entropic") return Rule::kSoda1;
  if (s == "soda2" || s == "soda2_euclidean") return Rule::kSoda2;
  if (s == "soma2" || s == "soma2_projected") return Rule::kSoma2;
  if (s == "sofw" || s == "sofw_frank_wolfe") return Rule::kSofw;
  if (s == "fp" || s == "fictitious_play") return Rule::kFictitiousPlay;
  throw Error("unknown learning rule '" + s + "'");
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::kSoda1: return "soda1";
    case Rule::kSoda2: return "soda2";
    case Rule::kSoma2: return "soma2";
    case Rule::kSofw: return "sofw";
    case Rule::kFictitiousPlay: return "fp";
  }
  return "?";
}

double LearnerSpec::step_size(long t) const {
  if (t < 1) throw Error("step_size: iterations count from 1");
  if (rule == Rule::kSofw) return 2.0 / (1.0 + static_cast<double>(t));
  return eta0 * std::pow(static_cast<double>(t), -beta);
}

void project_scaled_simplex(std::span<double> row, double mass) {
  if (mass <= 0.0) {
    std::fill(row.begin(), row.end(), 0.0);
    return;
  }
  std::vector<double> u(row.begin(), row.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - mass) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  double total = 0.0;
  for (double& x : row) {
    x = std::max(x - theta, 0.0);
    total += x;
  }
  if (total > 0.0 && total != mass) {
    const double f = mass / total;
    for (double& x : row) x *= f;
  }
}

Strategy step_soda1(const Strategy& s, const Matrix& c, double eta) {
  if (!c.same_shape(s.matrix)) throw Error("step_soda1: shape mismatch");
  Strategy out = s;
  const int L = s.action_count();
  std::vector<double> w(L);
  for (int k = 0; k < s.obs_count(); ++k) {
    auto row = out.matrix.row(k);
    const double m = s.marginal[k];
    if (!(m > 0.0)) {
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    const auto srow = s.matrix.row(k);
    if (std::none_of(srow.begin(), srow.end(), [](double x) { return x > 0.0; })) {
      throw Error("step_soda1: strategy row " + std::to_string(k) +
                  " has no mass");
    }
    const auto crow = c.row(k);
    const double cmax = *std::max_element(crow.begin(), crow.end());
    double total = 0.0;
    for (int l = 0; l < L; ++l) {
      w[l] = std::max(srow[l], 1e-300) * std::exp(eta * (crow[l] - cmax));
      total += w[l];
    }
    for (int l = 0; l < L; ++l) row[l] = m * w[l] / total;
  }
  return out;
}

Strategy step_soda2(Matrix& dual, const Strategy& s, const Matrix& c,
                    double eta) {
  if (!c.same_shape(s.matrix) || !dual.same_shape(s.matrix)) {
    throw Error("step_soda2: shape mismatch");
  }
  for (std::size_t i = 0; i < dual.data.size(); ++i) dual.data[i] += eta * c.data[i];
  Strategy out = s;
  out.matrix = dual;
  for (int k = 0; k < s.obs_count(); ++k) {
    project_scaled_simplex(out.matrix.row(k), s.marginal[k]);
  }
  return out;
}

Strategy step_soma2(const Strategy& s, const Matrix& c, double eta) {
  if (!c.same_shape(s.matrix)) throw Error("step_soma2: shape mismatch");
  Strategy out = s;
  for (std::size_t i = 0; i < out.matrix.data.size(); ++i) {
    out.matrix.data[i] += eta * c.data[i];
  }
  for (int k = 0; k < s.obs_count(); ++k) {
    project_scaled_simplex(out.matrix.row(k), s.marginal[k]);
  }
  return out;
}

Strategy step_sofw(const Strategy& s, const Matrix& c, double eta) {
  if (!c.same_shape(s.matrix)) throw Error("step_sofw: shape mismatch");
  const Matrix br = best_response(c, s.marginal);
  Strategy out = s;
  if (eta == 1.0) {
    out.matrix = br;
    return out;
  }
  for (std::size_t i = 0; i < out.matrix.data.size(); ++i) {
    out.matrix.data[i] = (1.0 - eta) * s.matrix.data[i] + eta * br.data[i];
  }
  return out;
}

Strategy step_fictitious_play(const Strategy& average, const Strategy& br,
                              long t) {
  if (!average.matrix.same_shape(br.matrix)) {
    throw Error("step_fictitious_play: shape mismatch");
  }
  if (t == 0) return br;
  Strategy out = average;
  const double w = static_cast<double>(t);
  for (std::size_t i = 0; i < out.matrix.data.size(); ++i) {
    out.matrix.data[i] = (w * average.matrix.data[i] + br.matrix.data[i]) / (w + 1.0);
  }
  return out;
}

LearnerState::LearnerState(LearnerSpec s, Strategy init)
    : spec(s), iterate(std::move(init)) {
  if (spec.rule == Rule::kSoda2) dual = iterate.matrix;
}

void LearnerState::step(const Matrix& c) {
  const long next = t + 1;
  switch (spec.rule) {
    case Rule::kSoda1:
      iterate = step_soda1(iterate, c, spec.step_size(next));
      break;
    case Rule::kSoda2:
      iterate = step_soda2(dual, iterate, c, spec.step_size(next));
      break;
    case Rule::kSoma2:
      iterate = step_soma2(iterate, c, spec.step_size(next));
      break;
    case Rule::kSofw:
      iterate = step_sofw(iterate, c, spec.step_size(next));
      break;
    case Rule::kFictitiousPlay:
      iterate = step_fictitious_play(iterate, best_response(c, iterate), t);
      break;
  }
  enforce_feasibility(iterate);
  t = next;
}

std::vector<const Strategy*> RunResult::profile() const {
  std::vector<const Strategy*> p;
  for (int g : groups) p.push_back(&strategies[g]);
  return p;
}

namespace {

std::vector<int> normalize_groups(const GradientEngine& engine,
                                  std::vector<int> groups) {
  const int n = engine.agents();
  if (groups.empty()) {
    groups.resize(n);
    std::iota(groups.begin(), groups.end(), 0);
  }
  if (static_cast<int>(groups.size()) != n) {
    throw Error("groups: one entry per agent required");
  }
  const int G = *std::max_element(groups.begin(), groups.end()) + 1;
  for (int g = 0; g < G; ++g) {
    int rep = -1;
    for (int a = 0; a < n; ++a) {
      if (groups[a] < 0) throw Error("groups: negative index");
      if (groups[a] != g) continue;
      if (rep < 0) {
        rep = a;
        continue;
      }
      const DiscretePrior& pr = engine.prior();
      if (!(pr.obs_grid(a) == pr.obs_grid(rep)) ||
          engine.action_grids(a) != engine.action_grids(rep) ||
          !std::equal(pr.marginal(a).begin(), pr.marginal(a).end(),
                      pr.marginal(rep).begin(), pr.marginal(rep).end())) {
        throw Error("groups: agents sharing a strategy need identical grids "
                    "and marginals");
      }
    }
    if (rep < 0) throw Error("groups: indices must be contiguous from 0");
  }
  return groups;
}

int representative(const std::vector<int>& groups, int g) {
  return static_cast<int>(std::find(groups.begin(), groups.end(), g) -
                          groups.begin());
}

void check_finite(const Matrix& c, int agent, long t) {
  for (int k = 0; k < c.rows; ++k) {
    for (int l = 0; l < c.cols; ++l) {
      if (!std::isfinite(c(k, l))) {
        std::ostringstream os;
        os << "non-finite gradient entry for agent " << agent << " at ("
           << k << ", " << l << ") in iteration " << t;
        throw Error(os.str());
      }
    }
  }
}

}  // namespace

std::vector<Strategy> initial_profile(const GradientEngine& engine,
                                      const std::vector<int>& groups_in,
                                      InitMode mode, std::uint64_t seed) {
  const std::vector<int> groups = normalize_groups(engine, groups_in);
  const int G = *std::max_element(groups.begin(), groups.end()) + 1;
  std::vector<Strategy> out;
  for (int g = 0; g < G; ++g) {
    const int a = representative(groups, g);
    const auto m = engine.prior().marginal(a);
    out.push_back(init_strategy(mode, engine.prior().obs_grid(a),
                                engine.action_grids(a),
                                std::vector<double>(m.begin(), m.end()),
                                derive_seed(seed, g)));
  }
  return out;
}

RunResult run(GradientEngine& engine, const RunOptions& opt) {
  if (opt.max_iterations < 0) throw Error("max_iterations must be >= 0");
  if (opt.check_interval < 1) throw Error("check_interval must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const int n = engine.agents();

  RunResult res;
  res.groups = normalize_groups(engine, opt.groups);
  const int G = *std::max_element(res.groups.begin(), res.groups.end()) + 1;
  std::vector<LearnerState> states;
  {
    auto init = initial_profile(engine, res.groups, opt.init, opt.seed);
    for (auto& s : init) states.emplace_back(opt.learner, std::move(s));
  }
  std::vector<int> reps(G);
  for (int g = 0; g < G; ++g) reps[g] = representative(res.groups, g);

  std::vector<Matrix> grads(G);
  for (long t = 0;; ++t) {
    std::vector<const Strategy*> prof(n);
    for (int a = 0; a < n; ++a) prof[a] = &states[res.groups[a]].iterate;

    for (int g = 0; g < G; ++g) {
      if (opt.observer) opt.observer("gradient", g, t);
      grads[g] = engine.gradient(reps[g], prof);
      check_finite(grads[g], reps[g], t);
    }

    const bool last = t == opt.max_iterations;
    if (last || t % opt.check_interval == 0) {
      std::vector<Matrix> agent_grads(n);
      for (int a = 0; a < n; ++a) {
        agent_grads[a] = a == reps[res.groups[a]] ? grads[res.groups[a]]
                                                  : engine.gradient(a, prof);
      }
      Certificate cert = certify(prof, agent_grads, opt.tolerance);
      cert.iteration = t;
      CheckRecord rec{t, cert.loss, res.distances.empty() ? 0.0 : res.distances.back()};
      res.history.push_back(rec);
      if (opt.progress) {
        std::ostringstream os;
        os << "{\"iteration\":" << t << ",\"loss\":[";
        for (std::size_t i = 0; i < rec.loss.size(); ++i) {
          os << (i ? "," : "") << format_double(rec.loss[i]);
        }
        os << "],\"iterate_distance\":" << format_double(rec.iterate_distance)
           << "}";
        *opt.progress << os.str() << "\n" << std::flush;
      }
      if (cert.converged || last) {
        res.reason = cert.converged ? "converged" : "max_iterations";
        res.certificate = std::move(cert);
        res.iterations = t;
        break;
      }
    }

    double dist = 0.0;
    for (int g = 0; g < G; ++g) {
      if (opt.observer) opt.observer("update", g, t);
      const Matrix before = states[g].iterate.matrix;
      states[g].step(grads[g]);
      double acc = 0.0;
      for (std::size_t i = 0; i < before.data.size(); ++i) {
        const double d = before.data[i] - states[g].iterate.matrix.data[i];
        acc += d * d;
      }
      dist = std::max(dist, std::sqrt(acc));
    }
    res.distances.push_back(dist);
  }

  for (auto& s : states) res.strategies.push_back(std::move(s.iterate));
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start).count();
  return res;
}

}  // namespace distbne
