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

#ifndef DISTBNE_CONFIG_HPP_
#define DISTBNE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "distbne/learner.hpp"
#include "distbne/mechanism.hpp"

namespace distbne {

// Flat key/value configuration. Text format, one entry per line:
//
//   # comment
//   include = preset:fpsb_2_uniform     (or a path relative to the file)
//   action.L = 128
//
// Later lines override earlier ones, including included entries.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(std::string_view text, const std::string& base_dir = ".");
// Throws Error("config not found: <path>") if the file cannot be opened.
ConfigMap load_config(const std::string& path);
std::string config_text(const ConfigMap& map);
// FNV-1a over config_text, 16 hex digits.
std::string config_hash(const ConfigMap& map);

// One discretized axis.
struct AxisSpec {
  int count = 64;
  double lower = 0.0;
  double upper = 1.0;
};

struct RunConfig {
  std::string id;
  std::string description;
  Mechanism mech;

  std::string prior = "uniform";
  double prior_mean = 0.0;
  double prior_sigma = 1.0;
  double prior_gamma = 0.5;
  std::vector<double> prior_density;
  std::uint64_t prior_samples = 1000000;
  std::uint64_t prior_seed = 0;

  std::vector<AxisSpec> obs;                  // per agent
  std::vector<AxisSpec> val;                  // per agent, interdependent only
  std::vector<std::vector<AxisSpec>> action;  // per agent, per dimension

  LearnerSpec learner;
  long max_iterations = 1000;
  double tolerance = 1e-4;
  long check_interval = 10;
  int runs = 10;
  std::uint64_t seed = 0;
  std::vector<int> groups;
  InitMode init = InitMode::kRandom;

  std::uint64_t eval_samples = std::uint64_t{1} << 18;
  bool eval_baseline = true;
  std::size_t memory_budget = std::size_t{2} << 30;
  int plot_count = 150;
  std::vector<int> sweep_grid;  // K = L values for a discretization sweep
  // Keys whose values were picked locally instead of transcribed.
  std::vector<std::string> chosen;

  ConfigMap source;
};

// Validates keys and values; unknown keys are errors.
RunConfig to_run_config(const ConfigMap& map);

// Keys understood by to_run_config.
const std::vector<std::string>& known_config_keys();

}  // namespace distbne

#endif  // DISTBNE_CONFIG_HPP_
