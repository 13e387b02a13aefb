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

// Independent reference computations for the unit tests. Deliberately
// naive: plain loops over every profile, brute-force QPs, no shared code
// with the library beyond expost_utility and the data types.

#ifndef DISTBNE_TESTS_ORACLES_HPP_
#define DISTBNE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "distbne/common.hpp"
#include "distbne/mechanism.hpp"
#include "distbne/prior.hpp"
#include "distbne/strategy.hpp"

namespace oracle {

using distbne::Matrix;

// Random feasible strategy with strictly positive entries.
inline distbne::Strategy random_strategy(const distbne::Grid& obs,
                                         const distbne::Grid& act,
                                         std::vector<double> marginal,
                                         std::uint64_t seed) {
  return distbne::init_strategy(distbne::InitMode::kRandom, obs, {act},
                                std::move(marginal), seed);
}

// c_i[k, l] = E[u_i | own obs k, own action l] by enumerating every atom of
// the discrete prior and every opponent action profile. One action axis.
inline Matrix naive_gradient(const distbne::Mechanism& mech,
                             const distbne::DiscretePrior& prior,
                             const std::vector<const distbne::Strategy*>& prof,
                             int agent) {
  const int n = prior.agents();
  const auto& own = *prof[agent];
  Matrix c(own.obs_count(), own.action_count());
  std::vector<double> bids(n);

  // Atoms: (observation profile, value profile, mass).
  struct Atom {
    std::vector<int> k, m;
    double mass;
  };
  std::vector<Atom> atoms;
  if (prior.independent()) {
    std::vector<int> k(n, 0);
    for (;;) {
      double mass = 1.0;
      for (int j = 0; j < n; ++j) mass *= prior.marginal(j)[k[j]];
      if (mass > 0.0) atoms.push_back({k, k, mass});
      int j = 0;
      while (j < n && ++k[j] == prior.obs_grid(j).size()) k[j++] = 0;
      if (j == n) break;
    }
  } else {
    for (std::size_t a = 0; a < prior.atom_count(); ++a) {
      auto ko = prior.atom_obs(a);
      auto kv = prior.atom_val(a);
      atoms.push_back({{ko.begin(), ko.end()}, {kv.begin(), kv.end()},
                       prior.atom_mass(a)});
    }
  }

  for (const auto& at : atoms) {
    const int ki = at.k[agent];
    const double fi = prior.marginal(agent)[ki];
    const double v = prior.val_grid(agent)[at.m[agent]];
    for (int l = 0; l < own.action_count(); ++l) {
      bids[agent] = own.action_value(l);
      // Odometer over opponent actions.
      std::vector<int> lo(n, 0);
      for (;;) {
        double w = at.mass / fi;
        for (int j = 0; j < n; ++j) {
          if (j == agent) continue;
          const auto& s = *prof[j];
          w *= s.matrix(at.k[j], lo[j]) / s.marginal[at.k[j]];
          bids[j] = s.action_value(lo[j]);
        }
        if (w != 0.0) {
          c(ki, l) += w * distbne::expost_utility(mech, agent, bids, v);
        }
        int j = 0;
        for (; j < n; ++j) {
          if (j == agent) continue;
          if (++lo[j] < prof[j]->action_count()) break;
          lo[j] = 0;
        }
        if (j == n) break;
      }
    }
  }
  return c;
}

// Expected utility of agent i by direct enumeration, without forming c.
inline double naive_expected_utility(
    const distbne::Mechanism& mech, const distbne::DiscretePrior& prior,
    const std::vector<const distbne::Strategy*>& prof, int agent) {
  const Matrix c = naive_gradient(mech, prior, prof, agent);
  double u = 0.0;
  for (std::size_t x = 0; x < c.data.size(); ++x) {
    u += c.data[x] * prof[agent]->matrix.data[x];
  }
  return u;
}

// Projection onto {x >= 0, sum x = mass} by enumerating every support set
// and solving the equality-constrained QP on it. Exponential in the length.
inline std::vector<double> qp_simplex(const std::vector<double>& y,
                                      double mass) {
  const int L = static_cast<int>(y.size());
  std::vector<double> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << L); ++mask) {
    double sum = 0.0;
    int cnt = 0;
    for (int l = 0; l < L; ++l) {
      if (mask >> l & 1u) {
        sum += y[l];
        ++cnt;
      }
    }
    const double shift = (sum - mass) / cnt;
    std::vector<double> x(L, 0.0);
    bool ok = true;
    for (int l = 0; l < L; ++l) {
      if (mask >> l & 1u) {
        x[l] = y[l] - shift;
        if (x[l] < -1e-15) ok = false;
      }
    }
    if (!ok) continue;
    double d = 0.0;
    for (int l = 0; l < L; ++l) d += (x[l] - y[l]) * (x[l] - y[l]);
    if (d < best_d) {
      best_d = d;
      best = x;
    }
  }
  return best;
}

// Euclidean projection of `t` onto the bidder-optimal face of the LLG core,
// {p_1 + p_2 = b3, 0 <= p_i <= b_i}: the unconstrained line projection or
// one of the segment's endpoints.
inline std::array<double, 2> qp_llg_core(std::array<double, 2> t, double b1,
                                         double b2, double b3) {
  auto feasible = [&](const std::array<double, 2>& p) {
    const double e = 1e-12;
    return p[0] >= -e && p[1] >= -e && p[0] <= b1 + e && p[1] <= b2 + e &&
           std::abs(p[0] + p[1] - b3) <= e;
  };
  const double s = (b3 - t[0] - t[1]) / 2.0;
  const std::vector<std::array<double, 2>> cand = {
      {t[0] + s, t[1] + s}, {0.0, b3}, {b1, b3 - b1}, {b3, 0.0}, {b3 - b2, b2}};
  std::array<double, 2> best{};
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : cand) {
    if (!feasible(p)) continue;
    const double d = std::hypot(p[0] - t[0], p[1] - t[1]);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  }
  return best;
}

}  // namespace oracle

#endif  // DISTBNE_TESTS_ORACLES_HPP_
