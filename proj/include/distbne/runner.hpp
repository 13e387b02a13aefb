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

#ifndef DISTBNE_RUNNER_HPP_
#define DISTBNE_RUNNER_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "distbne/config.hpp"
#include "distbne/evaluate.hpp"
#include "distbne/gradient.hpp"
#include "distbne/learner.hpp"
#include "distbne/prior.hpp"
#include "distbne/strategy_io.hpp"

namespace distbne {

// Everything a run needs, built once per batch.
struct Experiment {
  RunConfig config;
  std::string hash;
  ContinuousPrior continuous;
  std::shared_ptr<const DiscretePrior> prior;
  std::vector<std::vector<Grid>> action_grids;
  std::optional<AnalyticBNE> baseline;

  std::unique_ptr<GradientEngine> make_engine() const;
  RunOptions run_options(std::uint64_t seed) const;
};

ContinuousPrior make_continuous_prior(const RunConfig& config);
Experiment build_experiment(const RunConfig& config);

// Named scalar metrics, in output order.
using Metrics = std::vector<std::pair<std::string, double>>;

// Continuous-game metrics of a profile: L and L2 per agent with a baseline,
// revenue, and split-award allocation shares where applicable.
Metrics evaluate_profile(const Experiment& exp,
                         const std::vector<const Strategy*>& profile,
                         std::uint64_t seed);

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string reason;
  long iterations = 0;
  double seconds = 0.0;
  Metrics metrics;  // includes in-game loss per agent
  std::vector<Strategy> strategies;  // per agent
};

struct Aggregate {
  std::string metric;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  int count = 0;
};

struct BatchSummary {
  std::vector<RunRecord> runs;
  std::vector<Aggregate> aggregates;
  int failed = 0;

  const Aggregate* find(const std::string& metric) const;
};

struct BatchOptions {
  std::string out_dir;  // empty: nothing is written
  bool force = false;   // allow writing into an existing, non-empty directory
  std::ostream* log = nullptr;
};

// Seed of run r: derived from the master seed.
std::uint64_t run_seed(std::uint64_t master, int run);

RunRecord run_single(const Experiment& exp, int run, const std::string& dir);
BatchSummary run_batch(const RunConfig& config, const BatchOptions& options);
// Mean and population std of every metric over successful runs; NaN entries
// are skipped.
std::vector<Aggregate> aggregate(const std::vector<RunRecord>& runs);

struct SweepRow {
  int grid = 0;
  BatchSummary summary;
};
// Runs the config once per K = L value (observation and action counts).
std::vector<SweepRow> run_sweep(const RunConfig& config,
                                const std::vector<int>& grid,
                                const BatchOptions& options);

// Refuses a stored profile whose layout does not match the experiment.
void check_stored_profile(const Experiment& exp,
                          const std::vector<Strategy>& profile,
                          const std::vector<StrategyMeta>& meta);

// Reads strategy_agent<i>.csv for every agent from `dir`.
std::vector<Strategy> load_profile(const Experiment& exp, const std::string& dir,
                                   std::vector<StrategyMeta>* meta = nullptr);

}  // namespace distbne

#endif  // DISTBNE_RUNNER_HPP_
