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

#ifndef DISTBNE_STRATEGY_HPP_
#define DISTBNE_STRATEGY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "distbne/common.hpp"
#include "distbne/grid.hpp"

namespace distbne {

// Discrete distributional strategy: a K x L matrix whose row k carries the
// probability of observing o_k and playing action l. Multi-dimensional
// actions are flattened row-major over action_grids (last axis fastest).
struct Strategy {
  Matrix matrix;
  Grid obs_grid;
  std::vector<Grid> action_grids;
  std::vector<double> marginal;

  int obs_count() const { return matrix.rows; }
  int action_count() const { return matrix.cols; }
  int action_dims() const { return static_cast<int>(action_grids.size()); }
  // Per-axis indices of flattened action l.
  std::vector<int> action_indices(int l) const;
  // Action values of flattened action l.
  std::vector<double> action_values(int l) const;
  // Single-axis shortcut.
  double action_value(int l) const { return action_grids[0][l]; }

  bool same_layout(const Strategy& other) const;
};

enum class InitMode { kRandom, kUniform, kTruthful };
InitMode parse_init_mode(const std::string& s);

Strategy init_strategy(InitMode mode, const Grid& obs_grid,
                       std::vector<Grid> action_grids,
                       std::vector<double> marginal, std::uint64_t seed);

// Strategy with the given matrix and layout; checks feasibility.
Strategy make_strategy(Matrix matrix, const Grid& obs_grid,
                       std::vector<Grid> action_grids,
                       std::vector<double> marginal);

// s(.|o_k) = row k / marginal_k. Throws for zero-mass observations.
std::vector<double> conditional(const Strategy& s, int obs_index);

// Mean action value per observation row under the conditional (first axis
// unless `axis` is given). Zero-mass rows return 0.
std::vector<double> mean_action(const Strategy& s, int axis = 0);

// Frobenius norm of the entrywise difference.
double iterate_distance(const Strategy& a, const Strategy& b);

// Clamps entries in [-1e-14, 0) to zero and rescales each row to its
// marginal. Larger violations throw.
void enforce_feasibility(Strategy& s);

// Throws unless row sums match the marginal within tol and entries are >= 0.
void check_feasible(const Strategy& s, double tol = 1e-10);

// Samples actions from the induced continuous strategy: an observation is
// mapped to its nearest grid point, then an action is drawn from that row's
// conditional. Row CDFs are precomputed, so the sampler is cheap per draw.
class BidSampler {
 public:
  explicit BidSampler(const Strategy& s);

  // Flattened action index for a continuous observation.
  int sample_index(double observation, Rng& rng) const;
  // Action values; writes action_dims() entries into out.
  void sample(double observation, Rng& rng, std::span<double> out) const;
  double sample(double observation, Rng& rng) const;

 private:
  const Strategy* s_;
  std::vector<double> cdf_;  // K x L, row-wise cumulative conditional
};

// Convenience wrapper around BidSampler for single draws.
std::vector<double> sample_bid(const Strategy& s, double observation, Rng& rng);

}  // namespace distbne

#endif  // DISTBNE_STRATEGY_HPP_
