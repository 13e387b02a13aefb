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

#include "distbne/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace distbne {
namespace {

int flat_count(const std::vector<Grid>& grids) {
  if (grids.empty()) throw Error("strategy needs at least one action grid");
  int c = 1;
  for (const auto& g : grids) c *= g.size();
  return c;
}

}  // namespace

std::vector<int> Strategy::action_indices(int l) const {
  std::vector<int> idx(action_grids.size());
  for (int d = action_dims() - 1; d >= 0; --d) {
    idx[d] = l % action_grids[d].size();
    l /= action_grids[d].size();
  }
  return idx;
}

std::vector<double> Strategy::action_values(int l) const {
  std::vector<double> v(action_grids.size());
  for (int d = action_dims() - 1; d >= 0; --d) {
    v[d] = action_grids[d][l % action_grids[d].size()];
    l /= action_grids[d].size();
  }
  return v;
}

bool Strategy::same_layout(const Strategy& o) const {
  return matrix.same_shape(o.matrix) && obs_grid == o.obs_grid &&
         action_grids == o.action_grids;
}

InitMode parse_init_mode(const std::string& s) {
  if (s == "random") return InitMode::kRandom;
  if (s == "uniform") return InitMode::kUniform;
  if (s == "truthful") return InitMode::kTruthful;
  throw Error("unknown init mode '" + s + "'");
}

Strategy init_strategy(InitMode mode, const Grid& obs_grid,
                       std::vector<Grid> action_grids,
                       std::vector<double> marginal, std::uint64_t seed) {
  const int K = obs_grid.size();
  const int L = flat_count(action_grids);
  if (static_cast<int>(marginal.size()) != K) {
    throw Error("init_strategy: marginal length != observation grid size");
  }
  Strategy s;
  s.obs_grid = obs_grid;
  s.action_grids = std::move(action_grids);
  s.marginal = std::move(marginal);
  s.matrix = Matrix(K, L);
  switch (mode) {
    case InitMode::kUniform:
      for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) s.matrix(k, l) = s.marginal[k] / L;
      }
      break;
    case InitMode::kRandom: {
      Rng rng(seed);
      std::exponential_distribution<double> ex(1.0);
      std::vector<double> w(L);
      for (int k = 0; k < K; ++k) {
        double total = 0.0;
        for (int l = 0; l < L; ++l) total += (w[l] = ex(rng));
        for (int l = 0; l < L; ++l) s.matrix(k, l) = s.marginal[k] * w[l] / total;
      }
      break;
    }
    case InitMode::kTruthful:
      for (int k = 0; k < K; ++k) {
        int l = 0;
        for (const auto& g : s.action_grids) {
          l = l * g.size() + g.nearest(obs_grid[k]).index;
        }
        s.matrix(k, l) = s.marginal[k];
      }
      break;
  }
  enforce_feasibility(s);
  return s;
}

Strategy make_strategy(Matrix matrix, const Grid& obs_grid,
                       std::vector<Grid> action_grids,
                       std::vector<double> marginal) {
  if (matrix.rows != obs_grid.size() ||
      matrix.cols != flat_count(action_grids) ||
      static_cast<int>(marginal.size()) != matrix.rows) {
    throw Error("make_strategy: matrix shape does not match grids");
  }
  Strategy s{std::move(matrix), obs_grid, std::move(action_grids),
             std::move(marginal)};
  check_feasible(s);
  return s;
}

std::vector<double> conditional(const Strategy& s, int k) {
  if (k < 0 || k >= s.obs_count()) throw Error("conditional: bad row index");
  const double m = s.marginal[k];
  if (!(m > 0.0)) {
    throw Error("conditional: observation " + std::to_string(k) +
                " has zero probability");
  }
  std::vector<double> p(s.matrix.row(k).begin(), s.matrix.row(k).end());
  for (double& x : p) x /= m;
  return p;
}

std::vector<double> mean_action(const Strategy& s, int axis) {
  std::vector<double> out(s.obs_count(), 0.0);
  for (int k = 0; k < s.obs_count(); ++k) {
    if (!(s.marginal[k] > 0.0)) continue;
    double acc = 0.0;
    for (int l = 0; l < s.action_count(); ++l) {
      const double m = s.matrix(k, l);
      if (m != 0.0) acc += m * s.action_values(l)[axis];
    }
    out[k] = acc / s.marginal[k];
  }
  return out;
}

double iterate_distance(const Strategy& a, const Strategy& b) {
  if (!a.matrix.same_shape(b.matrix)) {
    throw Error("iterate_distance: shape mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.matrix.data.size(); ++i) {
    const double d = a.matrix.data[i] - b.matrix.data[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void enforce_feasibility(Strategy& s) {
  for (int k = 0; k < s.obs_count(); ++k) {
    auto row = s.matrix.row(k);
    double total = 0.0;
    for (double& x : row) {
      if (x < 0.0) {
        if (x < -1e-14) throw Error("strategy entry below -1e-14");
        x = 0.0;
      }
      total += x;
    }
    const double m = s.marginal[k];
    if (m == 0.0) {
      std::fill(row.begin(), row.end(), 0.0);
    } else if (total > 0.0 && total != m) {
      const double f = m / total;
      for (double& x : row) x *= f;
    } else if (total <= 0.0) {
      throw Error("strategy row has no mass for a positive marginal");
    }
  }
}

void check_feasible(const Strategy& s, double tol) {
  for (int k = 0; k < s.obs_count(); ++k) {
    double total = 0.0;
    for (double x : s.matrix.row(k)) {
      if (x < 0.0 || !std::isfinite(x)) {
        throw Error("strategy has a negative or non-finite entry");
      }
      total += x;
    }
    if (std::abs(total - s.marginal[k]) > tol) {
      std::ostringstream os;
      os << "strategy row " << k << " sums to " << total << ", marginal "
         << s.marginal[k];
      throw Error(os.str());
    }
  }
}

BidSampler::BidSampler(const Strategy& s)
    : s_(&s), cdf_(s.matrix.data.size(), 0.0) {
  const int L = s.action_count();
  for (int k = 0; k < s.obs_count(); ++k) {
    if (!(s.marginal[k] > 0.0)) continue;
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      acc += s.matrix(k, l);
      cdf_[static_cast<std::size_t>(k) * L + l] = acc;
    }
    for (int l = 0; l < L; ++l) cdf_[static_cast<std::size_t>(k) * L + l] /= acc;
    cdf_[static_cast<std::size_t>(k) * L + L - 1] = 1.0;
  }
}

int BidSampler::sample_index(double observation, Rng& rng) const {
  const int k = s_->obs_grid.nearest(observation).index;
  if (!(s_->marginal[k] > 0.0)) {
    throw Error("sample_bid: observation maps to an unsupported grid point");
  }
  const int L = s_->action_count();
  const double* row = cdf_.data() + static_cast<std::size_t>(k) * L;
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  // first l with cdf > u; skips zero-probability actions
  return static_cast<int>(std::upper_bound(row, row + L, u) - row);
}

void BidSampler::sample(double observation, Rng& rng,
                        std::span<double> out) const {
  int l = sample_index(observation, rng);
  for (int d = s_->action_dims() - 1; d >= 0; --d) {
    const Grid& g = s_->action_grids[d];
    out[d] = g[l % g.size()];
    l /= g.size();
  }
}

double BidSampler::sample(double observation, Rng& rng) const {
  return s_->action_grids[0][sample_index(observation, rng)];
}

std::vector<double> sample_bid(const Strategy& s, double observation,
                               Rng& rng) {
  std::vector<double> out(s.action_dims());
  BidSampler(s).sample(observation, rng, out);
  return out;
}

}  // namespace distbne
