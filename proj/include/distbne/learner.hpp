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

#ifndef DISTBNE_LEARNER_HPP_
#define DISTBNE_LEARNER_HPP_

#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "distbne/gradient.hpp"
#include "distbne/strategy.hpp"
#include "distbne/verify.hpp"

namespace distbne {

enum class Rule { kSoda1, kSoda2, kSoma2, kSofw, kFictitiousPlay };
Rule parse_rule(const std::string& s);
std::string to_string(Rule r);

struct LearnerSpec {
  Rule rule = Rule::kSoda1;
  double eta0 = 1.0;
  double beta = 0.5;

  // Step size of the t-th update (t >= 1).
  double step_size(long t) const;
};

// Euclidean projection of `row` onto {x >= 0, sum x = mass}, in place.
void project_scaled_simplex(std::span<double> row, double mass);

Strategy step_soda1(const Strategy& s, const Matrix& c, double eta);
// Updates the dual accumulator in place and returns its projection.
Strategy step_soda2(Matrix& dual, const Strategy& s, const Matrix& c,
                    double eta);
Strategy step_soma2(const Strategy& s, const Matrix& c, double eta);
Strategy step_sofw(const Strategy& s, const Matrix& c, double eta);
// average+ = (t * average + br) / (t + 1).
Strategy step_fictitious_play(const Strategy& average, const Strategy& br,
                              long t);

struct LearnerState {
  LearnerSpec spec;
  Strategy iterate;
  Matrix dual;  // soda2
  long t = 0;   // completed updates

  LearnerState(LearnerSpec s, Strategy init);
  // Applies one update with gradient c against the current profile.
  void step(const Matrix& c);
};

struct CheckRecord {
  long iteration = 0;
  std::vector<double> loss;  // per agent
  double iterate_distance = 0.0;
};

struct RunOptions {
  LearnerSpec learner;
  long max_iterations = 1000;
  double tolerance = 1e-4;
  long check_interval = 10;
  InitMode init = InitMode::kRandom;
  std::uint64_t seed = 0;
  // groups[agent] = index of the strategy the agent plays. Agents sharing a
  // strategy learn it together from the first member's gradient. Empty means
  // every agent has its own strategy.
  std::vector<int> groups;
  // Line-delimited JSON progress records, one per check.
  std::ostream* progress = nullptr;
  // Event hook: ("gradient" | "update", group, iteration).
  std::function<void(const std::string&, int, long)> observer;
};

struct RunResult {
  std::vector<Strategy> strategies;  // one per group
  std::vector<int> groups;
  std::vector<CheckRecord> history;
  std::vector<double> distances;  // per iteration, max over groups
  Certificate certificate;        // of the returned profile
  long iterations = 0;
  double seconds = 0.0;
  std::string reason;  // "converged" or "max_iterations"

  std::vector<const Strategy*> profile() const;
  const Strategy& strategy_of(int agent) const {
    return strategies[groups[agent]];
  }
};

// Simultaneous learning: every iteration computes all gradients against the
// current profile before any strategy moves.
RunResult run(GradientEngine& engine, const RunOptions& options);

// Initial strategies for every group, as run() builds them.
std::vector<Strategy> initial_profile(const GradientEngine& engine,
                                      const std::vector<int>& groups,
                                      InitMode mode, std::uint64_t seed);

}  // namespace distbne

#endif  // DISTBNE_LEARNER_HPP_
