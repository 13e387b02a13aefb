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

#include "distbne/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace distbne {
namespace {

constexpr int kShards = 64;

void check_bounds(const std::vector<std::pair<double, double>>& bounds) {
  if (bounds.empty()) throw Error("prior needs at least one agent");
  for (const auto& [lo, hi] : bounds) {
    if (!(lo < hi)) throw Error("prior bounds must satisfy lower < upper");
  }
}

// Rejection sampling from a bounded density with a uniform proposal.
double sample_bounded(Rng& rng, double lo, double hi, double peak,
                      const std::function<double(double)>& density) {
  std::uniform_real_distribution<double> ux(lo, hi);
  std::uniform_real_distribution<double> uy(0.0, peak);
  for (;;) {
    const double x = ux(rng);
    if (uy(rng) <= density(x)) return x;
  }
}

}  // namespace

ContinuousPrior uniform_prior(std::vector<std::pair<double, double>> bounds) {
  check_bounds(bounds);
  ContinuousPrior p;
  p.kind = "uniform";
  p.agents = static_cast<int>(bounds.size());
  p.sample = [bounds](Rng& rng, std::span<double> v, std::span<double> o) {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      std::uniform_real_distribution<double> u(bounds[i].first,
                                               bounds[i].second);
      o[i] = u(rng);
      v[i] = o[i];
    }
  };
  for (const auto& [lo, hi] : bounds) {
    p.density.push_back(
        [lo, hi](double x) { return x >= lo && x <= hi ? 1.0 : 0.0; });
  }
  return p;
}

ContinuousPrior truncated_gaussian_prior(
    double mean, double sigma, std::vector<std::pair<double, double>> bounds) {
  check_bounds(bounds);
  if (!(sigma > 0.0)) throw Error("gaussian_trunc: sigma must be positive");
  ContinuousPrior p;
  p.kind = "gaussian_trunc";
  p.agents = static_cast<int>(bounds.size());
  p.sample = [mean, sigma, bounds](Rng& rng, std::span<double> v,
                                   std::span<double> o) {
    auto pdf = [&](double x) {
      const double z = (x - mean) / sigma;
      return std::exp(-0.5 * z * z);
    };
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto [lo, hi] = bounds[i];
      const double peak = pdf(std::clamp(mean, lo, hi));
      o[i] = sample_bounded(rng, lo, hi, peak, pdf);
      v[i] = o[i];
    }
  };
  for (const auto& [lo, hi] : bounds) {
    p.density.push_back([mean, sigma, lo, hi](double x) {
      if (x < lo || x > hi) return 0.0;
      const double z = (x - mean) / sigma;
      return std::exp(-0.5 * z * z);
    });
  }
  return p;
}

ContinuousPrior tabulated_density_prior(
    std::vector<double> density_points,
    std::vector<std::pair<double, double>> bounds) {
  check_bounds(bounds);
  if (density_points.size() < 2) {
    throw Error("custom_density needs at least two density values");
  }
  double peak = 0.0;
  for (double d : density_points) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw Error("custom_density values must be finite and >= 0");
    }
    peak = std::max(peak, d);
  }
  if (peak <= 0.0) throw Error("custom_density vanishes everywhere");
  ContinuousPrior p;
  p.kind = "custom_density";
  p.agents = static_cast<int>(bounds.size());
  for (const auto& [lo, hi] : bounds) {
    p.density.push_back([density_points, lo, hi](double x) {
      if (x < lo || x > hi) return 0.0;
      const int n = static_cast<int>(density_points.size());
      const double pos = (x - lo) / (hi - lo) * (n - 1);
      const int j = std::clamp(static_cast<int>(pos), 0, n - 2);
      const double w = pos - j;
      return (1.0 - w) * density_points[j] + w * density_points[j + 1];
    });
  }
  p.sample = [density = p.density, bounds, peak](Rng& rng, std::span<double> v,
                                                 std::span<double> o) {
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      o[i] = sample_bounded(rng, bounds[i].first, bounds[i].second, peak,
                            density[i]);
      v[i] = o[i];
    }
  };
  return p;
}

ContinuousPrior common_value_prior(int agents) {
  if (agents < 2) throw Error("common_value needs at least two agents");
  if (agents > 64) throw Error("common_value supports at most 64 agents");
  ContinuousPrior p;
  p.kind = "common_value";
  p.agents = agents;
  p.values_equal_observations = false;
  p.exchangeable.resize(agents);
  std::iota(p.exchangeable.begin(), p.exchangeable.end(), 0);
  p.sample = [agents](Rng& rng, std::span<double> v, std::span<double> o) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double w[64];
    for (int i = 0; i < agents; ++i) w[i] = u(rng);
    const double common = u(rng);
    for (int i = 0; i < agents; ++i) {
      v[i] = common;
      o[i] = 2.0 * w[i] * common;
    }
  };
  return p;
}

ContinuousPrior affiliated_prior() {
  ContinuousPrior p;
  p.kind = "affiliated";
  p.agents = 2;
  p.values_equal_observations = false;
  p.exchangeable = {0, 1};
  p.sample = [](Rng& rng, std::span<double> v, std::span<double> o) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double w1 = u(rng), w2 = u(rng), w3 = u(rng);
    o[0] = w1 + w3;
    o[1] = w2 + w3;
    v[0] = v[1] = 0.5 * (w1 + w2) + w3;
  };
  return p;
}

ContinuousPrior bernoulli_llg_prior(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error("bernoulli_llg: gamma must lie in [0, 1]");
  }
  ContinuousPrior p;
  p.kind = "bernoulli_llg";
  p.agents = 3;
  p.exchangeable = {0, 1};
  p.sample = [gamma](Rng& rng, std::span<double> v, std::span<double> o) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double w1 = u(rng), w2 = u(rng), w3 = u(rng), w4 = u(rng);
    const bool w = u(rng) < gamma;
    o[0] = w ? w4 : w1;
    o[1] = w ? w4 : w2;
    o[2] = 2.0 * w3;
    for (int i = 0; i < 3; ++i) v[i] = o[i];
  };
  return p;
}

DiscretePrior DiscretePrior::independent(
    std::vector<Grid> obs_grids, std::vector<std::vector<double>> marginals) {
  if (obs_grids.empty() || obs_grids.size() != marginals.size()) {
    throw Error("independent prior: one marginal per observation grid");
  }
  DiscretePrior p;
  for (std::size_t i = 0; i < obs_grids.size(); ++i) {
    if (static_cast<int>(marginals[i].size()) != obs_grids[i].size()) {
      throw Error("independent prior: marginal length != grid size");
    }
  }
  p.obs_grids_ = std::move(obs_grids);
  p.marginals_ = std::move(marginals);
  p.independent_ = true;
  p.private_values_ = true;
  p.validate();
  return p;
}

double DiscretePrior::total_mass() const {
  if (independent_) {
    double prod = 1.0;
    for (const auto& m : marginals_) {
      prod *= std::accumulate(m.begin(), m.end(), 0.0);
    }
    return prod;
  }
  return std::accumulate(atom_mass_.begin(), atom_mass_.end(), 0.0);
}

void DiscretePrior::validate() const {
  for (int i = 0; i < agents(); ++i) {
    double s = 0.0;
    for (double m : marginals_[i]) {
      if (m < 0.0) throw Error("prior marginal has a negative entry");
      s += m;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "prior marginal of agent " << i << " sums to " << s;
      throw Error(os.str());
    }
  }
  if (independent_) return;
  if (std::abs(total_mass() - 1.0) > 1e-10) {
    throw Error("prior joint does not sum to one");
  }
  for (int i = 0; i < agents(); ++i) {
    std::vector<double> re(obs_grids_[i].size(), 0.0);
    for (std::size_t a = 0; a < atom_count(); ++a) {
      re[atom_obs(a)[i]] += atom_mass_[a];
    }
    for (std::size_t k = 0; k < re.size(); ++k) {
      if (std::abs(re[k] - marginals_[i][k]) > 1e-8) {
        throw Error("prior marginal inconsistent with joint");
      }
    }
  }
}

DiscretePrior joint_from_latent(const JointSampler& sampler,
                                std::vector<Grid> obs_grids,
                                std::vector<Grid> val_grids,
                                bool private_values,
                                std::uint64_t sample_count,
                                std::uint64_t seed, bool require_support,
                                const std::vector<int>& exchangeable) {
  const int n = static_cast<int>(obs_grids.size());
  if (n == 0) throw Error("joint_from_latent: no agents");
  if (!private_values && static_cast<int>(val_grids.size()) != n) {
    throw Error("joint_from_latent: one valuation grid per agent required");
  }
  if (sample_count == 0) throw Error("joint_from_latent: sample_count is 0");

  // Mixed-radix key over observation axes followed by valuation axes.
  std::vector<std::uint64_t> radix;
  for (const auto& g : obs_grids) radix.push_back(g.size());
  if (!private_values) {
    for (const auto& g : val_grids) radix.push_back(g.size());
  }
  long double span = 1.0L;
  for (auto r : radix) span *= r;
  if (span > 9.0e18L) throw Error("joint_from_latent: grid product too large");
  const int axes = static_cast<int>(radix.size());

  for (std::size_t e = 1; e < exchangeable.size(); ++e) {
    const int a = exchangeable[0], b = exchangeable[e];
    if (a < 0 || b < 0 || a >= n || b >= n || !(obs_grids[a] == obs_grids[b]) ||
        (!private_values && !(val_grids[a] == val_grids[b]))) {
      throw Error("joint_from_latent: exchangeable agents need equal grids");
    }
  }
  // All orderings of the exchangeable agents, as full agent permutations.
  std::vector<std::vector<int>> perms;
  {
    std::vector<int> order = exchangeable;
    std::sort(order.begin(), order.end());
    std::vector<int> slots = order;
    do {
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t e = 0; e < slots.size(); ++e) perm[slots[e]] = order[e];
      perms.push_back(perm);
    } while (std::next_permutation(order.begin(), order.end()));
  }
  const std::uint64_t copies = perms.size();

  std::vector<std::vector<std::uint64_t>> shard_keys(kShards);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < kShards; ++s) {
    const std::uint64_t count =
        sample_count / kShards + (static_cast<std::uint64_t>(s) <
                                  sample_count % kShards ? 1 : 0);
    Rng rng(derive_seed(seed, s));
    std::vector<double> v(n), o(n);
    std::vector<int> oi(n), vi(n);
    auto& keys = shard_keys[s];
    keys.reserve(count * copies);
    for (std::uint64_t t = 0; t < count; ++t) {
      sampler(rng, v, o);
      for (int i = 0; i < n; ++i) {
        oi[i] = obs_grids[i].nearest(o[i]).index;
        if (!private_values) vi[i] = val_grids[i].nearest(v[i]).index;
      }
      for (const auto& perm : perms) {
        std::uint64_t key = 0;
        for (int i = 0; i < n; ++i) key = key * radix[i] + oi[perm[i]];
        if (!private_values) {
          for (int i = 0; i < n; ++i) key = key * radix[n + i] + vi[perm[i]];
        }
        keys.push_back(key);
      }
    }
    std::sort(keys.begin(), keys.end());
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(sample_count * copies);
  for (auto& sk : shard_keys) {
    keys.insert(keys.end(), sk.begin(), sk.end());
    std::vector<std::uint64_t>().swap(sk);
  }
  std::sort(keys.begin(), keys.end());

  DiscretePrior p;
  p.independent_ = false;
  p.private_values_ = private_values;
  p.obs_grids_ = std::move(obs_grids);
  if (!private_values) p.val_grids_ = std::move(val_grids);
  p.sample_count_ = sample_count;
  p.seed_ = seed;

  const double inv = 1.0 / static_cast<double>(sample_count * copies);
  std::vector<int> digits(axes);
  std::vector<std::vector<std::uint64_t>> counts(n);
  for (int i = 0; i < n; ++i) counts[i].assign(p.obs_grids_[i].size(), 0);
  for (std::size_t a = 0; a < keys.size();) {
    std::size_t b = a;
    while (b < keys.size() && keys[b] == keys[a]) ++b;
    std::uint64_t key = keys[a];
    for (int ax = axes - 1; ax >= 0; --ax) {
      digits[ax] = static_cast<int>(key % radix[ax]);
      key /= radix[ax];
    }
    for (int i = 0; i < n; ++i) {
      p.atom_obs_.push_back(digits[i]);
      counts[i][digits[i]] += b - a;
    }
    if (!private_values) {
      for (int i = 0; i < n; ++i) p.atom_val_.push_back(digits[n + i]);
    }
    p.atom_mass_.push_back(static_cast<double>(b - a) * inv);
    a = b;
  }

  // Marginals from integer counts so that re-marginalizing the joint agrees.
  p.marginals_.resize(n);
  for (int i = 0; i < n; ++i) {
    p.marginals_[i].resize(counts[i].size());
    for (std::size_t k = 0; k < counts[i].size(); ++k) {
      if (require_support && counts[i][k] == 0) {
        std::ostringstream os;
        os << "joint_from_latent: observation point " << k << " of agent " << i
           << " received no mass; use a coarser grid or more samples";
        throw Error(os.str());
      }
      p.marginals_[i][k] = static_cast<double>(counts[i][k]) * inv;
    }
  }
  p.validate();
  return p;
}

DiscretePrior bernoulli_weights_prior(double gamma, std::vector<Grid> obs_grids,
                                      std::uint64_t sample_count,
                                      std::uint64_t seed) {
  if (obs_grids.size() != 3) throw Error("bernoulli_weights_prior: n must be 3");
  return discretize_prior(bernoulli_llg_prior(gamma), std::move(obs_grids), {},
                          sample_count, seed);
}

DiscretePrior discretize_prior(const ContinuousPrior& cp,
                               std::vector<Grid> obs_grids,
                               std::vector<Grid> val_grids,
                               std::uint64_t sample_count, std::uint64_t seed) {
  if (static_cast<int>(obs_grids.size()) != cp.agents) {
    throw Error("discretize_prior: one observation grid per agent");
  }
  if (!cp.density.empty()) {
    std::vector<std::vector<double>> marginals;
    for (int i = 0; i < cp.agents; ++i) {
      marginals.push_back(discretize_density(obs_grids[i], cp.density[i]));
    }
    return DiscretePrior::independent(std::move(obs_grids),
                                      std::move(marginals));
  }
  if (!cp.values_equal_observations &&
      static_cast<int>(val_grids.size()) != cp.agents) {
    throw Error("discretize_prior: one valuation grid per agent");
  }
  // Symmetrize only over agents that really share a layout.
  std::vector<int> exch;
  for (int i : cp.exchangeable) {
    if (exch.empty() ||
        (obs_grids[i] == obs_grids[exch[0]] &&
         (cp.values_equal_observations || val_grids[i] == val_grids[exch[0]]))) {
      exch.push_back(i);
    }
  }
  if (exch.size() < 2) exch.clear();
  return joint_from_latent(cp.sample, std::move(obs_grids),
                           std::move(val_grids), cp.values_equal_observations,
                           sample_count, seed, true, exch);
}

}  // namespace distbne
