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

#ifndef DISTBNE_GRADIENT_HPP_
#define DISTBNE_GRADIENT_HPP_

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "distbne/common.hpp"
#include "distbne/mechanism.hpp"
#include "distbne/prior.hpp"
#include "distbne/strategy.hpp"

namespace distbne {

constexpr std::size_t kDefaultMemoryBudget = std::size_t{2} << 30;

// Ex-post utilities of one agent over (own value, own action, opponent
// action profile). Opponent profiles r are flattened row-major over the other
// agents in index order.
//
// When the mechanism is affine in the value, only coef and offset are stored
// (u = coef * v + offset) and there is no value axis.
struct UtilityTensor {
  int agent = 0;
  bool affine = false;
  int value_count = 0;           // M (or K under private values)
  int own_actions = 0;           // L_i
  std::size_t opp_profiles = 0;  // R
  std::vector<double> values;    // own value grid points
  std::vector<double> coef, offset;
  std::vector<double> full;  // value_count x own_actions x opp_profiles

  double at(int m, int l, std::size_t r) const {
    const std::size_t lr = static_cast<std::size_t>(l) * opp_profiles + r;
    if (affine) return coef[lr] * values[m] + offset[lr];
    return full[static_cast<std::size_t>(m) * own_actions * opp_profiles + lr];
  }
  std::size_t bytes() const {
    return (coef.size() + offset.size() + full.size()) * sizeof(double);
  }
};

// Per agent, the list of action value vectors (action_dims entries each),
// indexed by flattened action.
using ActionTable = std::vector<std::vector<double>>;
ActionTable action_table(const std::vector<Grid>& action_grids);

// Bytes a utility tensor would need.
std::size_t utility_tensor_bytes(const Mechanism& mech, int agent,
                                 const std::vector<ActionTable>& actions,
                                 int value_count, bool affine);

// Tabulates expost_utility. With `affine` the mechanism must be affine in
// the value. Throws when the tensor would exceed `budget` bytes.
UtilityTensor build_utility_tensor(const Mechanism& mech, int agent,
                                   const std::vector<ActionTable>& actions,
                                   std::vector<double> own_values, bool affine,
                                   std::size_t budget = kDefaultMemoryBudget,
                                   bool parallel = true);

// Symmetric single-object auction with i.i.d. private values; all opponents
// play `opponent`. c[k, l] from the opponents' action CDF raised to the
// (n - 1)th power, under the no-winner tie rule.
Matrix gradient_symmetric_iid(const Mechanism& mech, const Grid& obs_grid,
                              const Grid& action_grid,
                              std::span<const double> marginal,
                              const Strategy& opponent, int n);

// <s, c>.
double expected_utility(const Strategy& s, const Matrix& c);

struct GradientOptions {
  std::size_t memory_budget = kDefaultMemoryBudget;
  bool parallel = true;
  // Use the order-statistic formula when the game and profile allow it.
  bool symmetric_fast_path = true;
};

// Computes c_i for every agent against a profile snapshot. Utility tensors
// and reduced prior tables are built on first use and cached.
class GradientEngine {
 public:
  GradientEngine(Mechanism mech, std::shared_ptr<const DiscretePrior> prior,
                 std::vector<std::vector<Grid>> action_grids,
                 GradientOptions options = {});
  ~GradientEngine();
  GradientEngine(const GradientEngine&) = delete;
  GradientEngine& operator=(const GradientEngine&) = delete;

  // profile[j] is agent j's strategy.
  Matrix gradient(int agent, const std::vector<const Strategy*>& profile);

  const Mechanism& mechanism() const { return mech_; }
  const DiscretePrior& prior() const { return *prior_; }
  const std::vector<Grid>& action_grids(int agent) const {
    return action_grids_[agent];
  }
  int agents() const { return mech_.agents; }

  // Whether the order-statistic path applies to this game (it is used only
  // when all opponents also share one strategy).
  bool symmetric_iid_game() const { return symmetric_game_; }
  // "symmetric_iid", "independent", "correlated" or "streaming": the path
  // used by the last gradient call for the agent.
  std::string last_path(int agent) const;

 private:
  struct AgentCache;
  AgentCache& cache(int agent);
  Matrix general(int agent, const std::vector<const Strategy*>& profile);

  Mechanism mech_;
  std::shared_ptr<const DiscretePrior> prior_;
  std::vector<std::vector<Grid>> action_grids_;
  std::vector<ActionTable> actions_;
  GradientOptions options_;
  bool symmetric_game_ = false;
  std::vector<std::unique_ptr<AgentCache>> caches_;
  std::vector<std::string> last_path_;
};

}  // namespace distbne

#endif  // DISTBNE_GRADIENT_HPP_
