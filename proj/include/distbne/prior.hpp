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

#ifndef DISTBNE_PRIOR_HPP_
#define DISTBNE_PRIOR_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "distbne/common.hpp"
#include "distbne/grid.hpp"

namespace distbne {

// Draws one realization of the valuation and observation profiles.
using JointSampler = std::function<void(Rng& rng, std::span<double> values,
                                        std::span<double> observations)>;

// The continuous prior of the original game. Evaluation draws from this
// directly; it never touches the discretized prior.
struct ContinuousPrior {
  std::string kind;
  int agents = 0;
  bool values_equal_observations = true;
  JointSampler sample;
  // Per-agent marginal densities (unnormalized); set only when observations
  // are independent across agents.
  std::vector<std::function<double(double)>> density;
  // Agents whose joint law is invariant under permutation.
  std::vector<int> exchangeable;
};

ContinuousPrior uniform_prior(std::vector<std::pair<double, double>> bounds);
ContinuousPrior truncated_gaussian_prior(
    double mean, double sigma, std::vector<std::pair<double, double>> bounds);
// Density given by values on an equidistant grid over each agent's bounds,
// linearly interpolated.
ContinuousPrior tabulated_density_prior(
    std::vector<double> density_points,
    std::vector<std::pair<double, double>> bounds);
// Common value v ~ U(0,1); o_i = 2 * w_i * v with w_i ~ U(0,1).
ContinuousPrior common_value_prior(int agents);
// Two bidders, o_i = w_i + w_3, common v = (w_1 + w_2) / 2 + w_3.
ContinuousPrior affiliated_prior();
// LLG locals v_j = w*w_4 + (1-w)*w_j with w = [w_5 < gamma]; global
// v_3 = 2*w_3. Private values.
ContinuousPrior bernoulli_llg_prior(double gamma);

// Probability mass over the discretized valuation x observation space.
//
// Independent priors are stored as per-agent marginals only (the joint is
// their product). Correlated priors keep a sorted list of weighted atoms,
// each carrying one observation index and one valuation index per agent.
// For private values the valuation index equals the observation index.
class DiscretePrior {
 public:
  DiscretePrior() = default;

  static DiscretePrior independent(std::vector<Grid> obs_grids,
                                   std::vector<std::vector<double>> marginals);

  int agents() const { return static_cast<int>(obs_grids_.size()); }
  bool independent() const { return independent_; }
  bool values_equal_observations() const { return private_values_; }

  const Grid& obs_grid(int agent) const { return obs_grids_[agent]; }
  // Valuation grid; the observation grid for private values.
  const Grid& val_grid(int agent) const {
    return private_values_ ? obs_grids_[agent] : val_grids_[agent];
  }
  std::span<const double> marginal(int agent) const {
    return marginals_[agent];
  }

  std::size_t atom_count() const { return atom_mass_.size(); }
  std::span<const int> atom_obs(std::size_t a) const {
    return {atom_obs_.data() + a * agents(), static_cast<std::size_t>(agents())};
  }
  std::span<const int> atom_val(std::size_t a) const {
    const auto& src = private_values_ ? atom_obs_ : atom_val_;
    return {src.data() + a * agents(), static_cast<std::size_t>(agents())};
  }
  double atom_mass(std::size_t a) const { return atom_mass_[a]; }

  double total_mass() const;
  std::uint64_t sample_count() const { return sample_count_; }
  std::uint64_t seed() const { return seed_; }

  // Throws if marginals or joint violate their normalization invariants.
  void validate() const;

 private:
  friend DiscretePrior joint_from_latent(const JointSampler&,
                                         std::vector<Grid>, std::vector<Grid>,
                                         bool, std::uint64_t, std::uint64_t,
                                         bool, const std::vector<int>&);

  std::vector<Grid> obs_grids_;
  std::vector<Grid> val_grids_;
  std::vector<std::vector<double>> marginals_;
  bool independent_ = true;
  bool private_values_ = true;

  std::vector<int> atom_obs_;
  std::vector<int> atom_val_;
  std::vector<double> atom_mass_;
  std::uint64_t sample_count_ = 0;
  std::uint64_t seed_ = 0;
};

// Monte-Carlo discretization of a latent-variable prior. Every sample is
// snapped to the nearest point on each axis and the counts are normalized.
// Marginals are recomputed from the binned joint. val_grids is ignored when
// private_values is set. With require_support, throws when an observation
// point receives no mass.
//
// `exchangeable` lists agents whose (observation, value) pairs are
// exchangeable under the sampler; each sample is then binned once per
// permutation of those agents, which makes the discrete joint exactly
// symmetric. Their grids must coincide.
DiscretePrior joint_from_latent(const JointSampler& sampler,
                                std::vector<Grid> obs_grids,
                                std::vector<Grid> val_grids,
                                bool private_values,
                                std::uint64_t sample_count,
                                std::uint64_t seed,
                                bool require_support = true,
                                const std::vector<int>& exchangeable = {});

// LLG prior with local correlation gamma, discretized by joint_from_latent.
DiscretePrior bernoulli_weights_prior(double gamma, std::vector<Grid> obs_grids,
                                      std::uint64_t sample_count,
                                      std::uint64_t seed);

// Approximation-game prior for `cp`: density evaluation at grid points for
// independent priors, Monte-Carlo binning of the latent sampler otherwise.
// `val_grids` is ignored for private values.
DiscretePrior discretize_prior(const ContinuousPrior& cp,
                               std::vector<Grid> obs_grids,
                               std::vector<Grid> val_grids,
                               std::uint64_t sample_count, std::uint64_t seed);

}  // namespace distbne

#endif  // DISTBNE_PRIOR_HPP_
