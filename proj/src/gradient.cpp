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

#include "distbne/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "distbne/kernels.hpp"

namespace distbne {
namespace {

std::vector<int> opponents_of(int agent, int n) {
  std::vector<int> opp;
  for (int j = 0; j < n; ++j) {
    if (j != agent) opp.push_back(j);
  }
  return opp;
}

std::size_t opp_profile_count(const std::vector<ActionTable>& actions,
                              const std::vector<int>& opp) {
  long double r = 1.0L;
  for (int j : opp) r *= actions[j].size();
  if (r > 4.0e18L) throw Error("opponent action profile count overflows");
  return static_cast<std::size_t>(r);
}

std::string budget_message(std::size_t need, std::size_t budget) {
  std::ostringstream os;
  os << "utility tensor needs " << need << " bytes, above the memory budget of "
     << budget << "; use coarser grids or the symmetric path";
  return os.str();
}

// Ex-post utilities for one own action l over every opponent profile r. For
// the affine form writes coef/offset (R each), otherwise full (M x R).
void fill_slab(const Mechanism& mech, int agent,
               const std::vector<ActionTable>& actions,
               const std::vector<int>& opp, std::span<const double> own_values,
               bool affine, int l, std::size_t R, double* coef, double* offset,
               double* full) {
  const int n = mech.agents;
  const int dims = mech.action_dims();
  std::vector<double> bids(static_cast<std::size_t>(n) * dims);
  const auto& own = actions[agent][l];
  std::copy(own.begin(), own.end(), bids.begin() + agent * dims);
  std::vector<int> idx(opp.size(), 0);
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t p = 0; p < opp.size(); ++p) {
      const auto& a = actions[opp[p]][idx[p]];
      std::copy(a.begin(), a.end(), bids.begin() + opp[p] * dims);
    }
    if (affine) {
      const double u0 = expost_utility(mech, agent, bids, 0.0);
      const double u1 = expost_utility(mech, agent, bids, 1.0);
      coef[r] = u1 - u0;
      offset[r] = u0;
    } else {
      for (std::size_t m = 0; m < own_values.size(); ++m) {
        full[m * R + r] = expost_utility(mech, agent, bids, own_values[m]);
      }
    }
    // odometer over opponents, last opponent fastest
    for (int p = static_cast<int>(opp.size()) - 1; p >= 0; --p) {
      if (++idx[p] < static_cast<int>(actions[opp[p]].size())) break;
      idx[p] = 0;
    }
  }
}

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

ActionTable action_table(const std::vector<Grid>& grids) {
  if (grids.empty()) throw Error("action_table: no action grids");
  std::size_t L = 1;
  for (const auto& g : grids) L *= g.size();
  ActionTable t(L, std::vector<double>(grids.size()));
  for (std::size_t l = 0; l < L; ++l) {
    std::size_t rest = l;
    for (int d = static_cast<int>(grids.size()) - 1; d >= 0; --d) {
      t[l][d] = grids[d][static_cast<int>(rest % grids[d].size())];
      rest /= grids[d].size();
    }
  }
  return t;
}

std::size_t utility_tensor_bytes(const Mechanism& mech, int agent,
                                 const std::vector<ActionTable>& actions,
                                 int value_count, bool affine) {
  const auto opp = opponents_of(agent, mech.agents);
  const long double R = opp_profile_count(actions, opp);
  const long double per = static_cast<long double>(actions[agent].size()) * R *
                          sizeof(double);
  const long double total = affine ? 2.0L * per : per * value_count;
  return total > 1.8e19L ? static_cast<std::size_t>(-1)
                         : static_cast<std::size_t>(total);
}

UtilityTensor build_utility_tensor(const Mechanism& mech, int agent,
                                   const std::vector<ActionTable>& actions,
                                   std::vector<double> own_values, bool affine,
                                   std::size_t budget, bool parallel) {
  mech.validate();
  if (static_cast<int>(actions.size()) != mech.agents) {
    throw Error("build_utility_tensor: one action table per agent required");
  }
  if (affine && !mech.affine_in_value()) {
    throw Error("build_utility_tensor: mechanism is not affine in the value");
  }
  const std::size_t need = utility_tensor_bytes(
      mech, agent, actions, static_cast<int>(own_values.size()), affine);
  if (need > budget) throw Error(budget_message(need, budget));

  const auto opp = opponents_of(agent, mech.agents);
  UtilityTensor t;
  t.agent = agent;
  t.affine = affine;
  t.value_count = static_cast<int>(own_values.size());
  t.own_actions = static_cast<int>(actions[agent].size());
  t.opp_profiles = opp_profile_count(actions, opp);
  t.values = std::move(own_values);
  const std::size_t R = t.opp_profiles;
  const int L = t.own_actions;
  if (affine) {
    t.coef.resize(static_cast<std::size_t>(L) * R);
    t.offset.resize(static_cast<std::size_t>(L) * R);
  } else {
    t.full.resize(static_cast<std::size_t>(t.value_count) * L * R);
  }
  const int M = t.value_count;
#pragma omp parallel if (parallel)
  {
    std::vector<double> slab(affine ? 0 : static_cast<std::size_t>(M) * R);
#pragma omp for schedule(dynamic)
    for (int l = 0; l < L; ++l) {
      if (affine) {
        fill_slab(mech, agent, actions, opp, t.values, true, l, R,
                  t.coef.data() + l * R, t.offset.data() + l * R, nullptr);
      } else {
        fill_slab(mech, agent, actions, opp, t.values, false, l, R, nullptr,
                  nullptr, slab.data());
        for (int m = 0; m < M; ++m) {
          std::copy(slab.begin() + m * R, slab.begin() + (m + 1) * R,
                    t.full.begin() + (static_cast<std::size_t>(m) * L + l) * R);
        }
      }
    }
  }
  return t;
}

Matrix gradient_symmetric_iid(const Mechanism& mech, const Grid& obs_grid,
                              const Grid& action_grid,
                              std::span<const double> marginal,
                              const Strategy& opponent, int n) {
  if (mech.kind != MechanismKind::kFpsb && mech.kind != MechanismKind::kSpsb &&
      mech.kind != MechanismKind::kAllPay) {
    throw Error("gradient_symmetric_iid: needs fpsb, spsb or all_pay");
  }
  const int K = obs_grid.size();
  const int L = action_grid.size();
  if (opponent.action_count() != L || opponent.action_dims() != 1) {
    throw Error("gradient_symmetric_iid: opponent action grid mismatch");
  }
  if (static_cast<int>(marginal.size()) != K) {
    throw Error("gradient_symmetric_iid: marginal length mismatch");
  }
  // Opponent action marginal and its CDF raised to n - 1.
  std::vector<double> a(L, 0.0);
  for (int k = 0; k < opponent.obs_count(); ++k) {
    for (int l = 0; l < L; ++l) a[l] += opponent.matrix(k, l);
  }
  std::vector<double> Fn(L);  // P(all n-1 opponents bid <= b_l)
  double F = 0.0;
  for (int l = 0; l < L; ++l) {
    F = std::min(1.0, F + a[l]);
    Fn[l] = std::pow(F, n - 1);
  }
  auto below = [&](int l) { return l == 0 ? 0.0 : Fn[l - 1]; };
  const double rho = mech.risk_rho;

  Matrix c(K, L);
  for (int k = 0; k < K; ++k) {
    if (!(marginal[k] > 0.0)) continue;
    const double o = obs_grid[k];
    switch (mech.kind) {
      case MechanismKind::kFpsb:
        for (int l = 0; l < L; ++l) {
          c(k, l) = crra(o - action_grid[l], rho) * below(l);
        }
        break;
      case MechanismKind::kAllPay:
        for (int l = 0; l < L; ++l) {
          const double w = below(l);
          c(k, l) = crra(o - action_grid[l], rho) * w +
                    crra(-action_grid[l], rho) * (1.0 - w);
        }
        break;
      case MechanismKind::kSpsb: {
        // Winning with b_l pays the highest opponent bid b_l' < b_l.
        double acc = 0.0;
        for (int l = 0; l < L; ++l) {
          c(k, l) = acc;
          acc += crra(o - action_grid[l], rho) * (Fn[l] - below(l));
        }
        break;
      }
      default:
        break;
    }
  }
  return c;
}

double expected_utility(const Strategy& s, const Matrix& c) {
  return frobenius_dot(s.matrix, c);
}

struct GradientEngine::AgentCache {
  enum Path { kSymmetric, kIndependent, kCorrelated };
  Path path = kIndependent;
  bool affine = true;
  bool private_values = true;
  bool streaming = false;
  std::vector<int> opp;
  std::size_t R = 0;
  std::vector<double> own_values;  // obs points (private) or value points
  std::vector<double> scale;       // per-row multiplier for the affine form
  std::vector<unsigned char> active;
  UtilityTensor tensor;
  // Reduced prior for correlated priors: lead x prod_j K_j with lead = K_i
  // or K_i * M_i for non-affine interdependent values.
  std::vector<double> w1, wv;
  int lead = 0;
};

GradientEngine::GradientEngine(Mechanism mech,
                               std::shared_ptr<const DiscretePrior> prior,
                               std::vector<std::vector<Grid>> action_grids,
                               GradientOptions options)
    : mech_(std::move(mech)),
      prior_(std::move(prior)),
      action_grids_(std::move(action_grids)),
      options_(options) {
  mech_.validate();
  if (!prior_ || prior_->agents() != mech_.agents) {
    throw Error("GradientEngine: prior agent count != mechanism agent count");
  }
  if (static_cast<int>(action_grids_.size()) != mech_.agents) {
    throw Error("GradientEngine: one action grid list per agent required");
  }
  for (const auto& g : action_grids_) {
    if (static_cast<int>(g.size()) != mech_.action_dims()) {
      throw Error("GradientEngine: action dimension mismatch");
    }
    actions_.push_back(action_table(g));
  }
  symmetric_game_ =
      (mech_.kind == MechanismKind::kFpsb || mech_.kind == MechanismKind::kSpsb ||
       mech_.kind == MechanismKind::kAllPay) &&
      prior_->independent();
  for (int j = 1; j < mech_.agents && symmetric_game_; ++j) {
    symmetric_game_ = prior_->obs_grid(j) == prior_->obs_grid(0) &&
                      action_grids_[j] == action_grids_[0] &&
                      std::equal(prior_->marginal(j).begin(),
                                 prior_->marginal(j).end(),
                                 prior_->marginal(0).begin(),
                                 prior_->marginal(0).end());
  }
  caches_.resize(mech_.agents);
  last_path_.assign(mech_.agents, "");
}

GradientEngine::~GradientEngine() = default;

std::string GradientEngine::last_path(int agent) const {
  return last_path_.at(agent);
}

GradientEngine::AgentCache& GradientEngine::cache(int agent) {
  if (caches_[agent]) return *caches_[agent];
  auto c = std::make_unique<AgentCache>();
  const DiscretePrior& pr = *prior_;
  const int K = pr.obs_grid(agent).size();
  c->opp = opponents_of(agent, mech_.agents);
  c->R = opp_profile_count(actions_, c->opp);
  c->affine = mech_.affine_in_value();
  c->private_values = pr.values_equal_observations();
  c->path = pr.independent() ? AgentCache::kIndependent : AgentCache::kCorrelated;
  const auto vals = pr.val_grid(agent).points();
  c->own_values.assign(vals.begin(), vals.end());
  c->active.resize(K);
  for (int k = 0; k < K; ++k) c->active[k] = pr.marginal(agent)[k] > 0.0;
  if (c->private_values) {
    c->scale = c->own_values;
  } else {
    c->scale.assign(K, 1.0);
  }

  const std::size_t need = utility_tensor_bytes(
      mech_, agent, actions_, static_cast<int>(c->own_values.size()), c->affine);
  if (need > options_.memory_budget) {
    c->streaming = true;
  } else {
    c->tensor = build_utility_tensor(mech_, agent, actions_, c->own_values,
                                     c->affine, options_.memory_budget,
                                     options_.parallel);
  }

  if (c->path == AgentCache::kCorrelated) {
    long double kopp = 1.0L;
    for (int j : c->opp) kopp *= pr.obs_grid(j).size();
    const int M = static_cast<int>(c->own_values.size());
    const bool with_m = !c->private_values && !c->affine;
    c->lead = with_m ? K * M : K;
    long double bytes = kopp * c->lead * sizeof(double) *
                        (!c->private_values && c->affine ? 2 : 1);
    if (bytes > options_.memory_budget) {
      throw Error("reduced prior table exceeds the memory budget; use coarser "
                  "observation grids");
    }
    const std::size_t Kopp = static_cast<std::size_t>(kopp);
    c->w1.assign(static_cast<std::size_t>(c->lead) * Kopp, 0.0);
    if (!c->private_values && c->affine) c->wv.assign(c->w1.size(), 0.0);
    for (std::size_t a = 0; a < pr.atom_count(); ++a) {
      const auto obs = pr.atom_obs(a);
      std::size_t r = 0;
      for (int j : c->opp) r = r * pr.obs_grid(j).size() + obs[j];
      const double mass = pr.atom_mass(a);
      const int mi = pr.atom_val(a)[agent];
      std::size_t row = with_m ? static_cast<std::size_t>(obs[agent]) * M + mi
                               : static_cast<std::size_t>(obs[agent]);
      c->w1[row * Kopp + r] += mass;
      if (!c->wv.empty()) c->wv[row * Kopp + r] += mass * c->own_values[mi];
    }
  }
  caches_[agent] = std::move(c);
  return *caches_[agent];
}

Matrix GradientEngine::gradient(int agent,
                                const std::vector<const Strategy*>& profile) {
  if (agent < 0 || agent >= mech_.agents) throw Error("gradient: bad agent");
  if (static_cast<int>(profile.size()) != mech_.agents) {
    throw Error("gradient: profile size != agent count");
  }
  if (symmetric_game_ && options_.symmetric_fast_path) {
    const Strategy* first = nullptr;
    bool shared = true;
    for (int j = 0; j < mech_.agents && shared; ++j) {
      if (j == agent) continue;
      if (!first) {
        first = profile[j];
      } else if (profile[j] != first && profile[j]->matrix.data != first->matrix.data) {
        shared = false;
      }
    }
    if (shared) {
      last_path_[agent] = "symmetric_iid";
      return gradient_symmetric_iid(mech_, prior_->obs_grid(agent),
                                    action_grids_[agent][0],
                                    prior_->marginal(agent), *first,
                                    mech_.agents);
    }
  }
  return general(agent, profile);
}

Matrix GradientEngine::general(int agent,
                               const std::vector<const Strategy*>& profile) {
  AgentCache& c = cache(agent);
  const DiscretePrior& pr = *prior_;
  const int K = pr.obs_grid(agent).size();
  const int L = static_cast<int>(actions_[agent].size());
  const std::size_t R = c.R;
  const bool par = options_.parallel;
  for (int j : c.opp) {
    if (profile[j]->obs_count() != pr.obs_grid(j).size() ||
        profile[j]->action_count() != static_cast<int>(actions_[j].size())) {
      throw Error("gradient: opponent strategy shape mismatch");
    }
  }
  Matrix out(K, L);

  // Opponent weights X: for independent priors one R-vector q shared by all
  // rows; otherwise lead x R tables.
  std::vector<double> x1, xv;
  if (c.path == AgentCache::kIndependent) {
    x1.assign(1, 1.0);
    for (int j : c.opp) {
      const Strategy& s = *profile[j];
      const int Lj = s.action_count();
      std::vector<double> a(Lj, 0.0);
      for (int k = 0; k < s.obs_count(); ++k) {
        for (int l = 0; l < Lj; ++l) a[l] += s.matrix(k, l);
      }
      std::vector<double> next(x1.size() * Lj);
      for (std::size_t r = 0; r < x1.size(); ++r) {
        for (int l = 0; l < Lj; ++l) next[r * Lj + l] = x1[r] * a[l];
      }
      x1.swap(next);
    }
  } else {
    auto contract = [&](const std::vector<double>& w) {
      std::vector<double> cur = w;
      // axes: lead, K_j1 .. K_jm; contract the last remaining K axis each pass
      std::size_t C = 1;
      for (int p = static_cast<int>(c.opp.size()) - 1; p >= 0; --p) {
        const int j = c.opp[p];
        const Strategy& s = *profile[j];
        const int Kj = s.obs_count(), Lj = s.action_count();
        std::vector<double> cond(static_cast<std::size_t>(Kj) * Lj, 0.0);
        const auto fj = pr.marginal(j);
        for (int k = 0; k < Kj; ++k) {
          if (!(fj[k] > 0.0)) continue;
          for (int l = 0; l < Lj; ++l) cond[k * Lj + l] = s.matrix(k, l) / fj[k];
        }
        std::size_t A = c.lead;
        for (int q = 0; q < p; ++q) A *= pr.obs_grid(c.opp[q]).size();
        std::vector<double> next(A * Lj * C);
        if (par) {
          kernels::omp::contract_axis(cur.data(), A, Kj, C, cond.data(), Lj,
                                      next.data());
        } else {
          kernels::serial::contract_axis(cur.data(), A, Kj, C, cond.data(), Lj,
                                         next.data());
        }
        cur.swap(next);
        C *= Lj;
      }
      // condition on the own observation
      const auto fi = pr.marginal(agent);
      const int per_k = c.lead / K;
      for (int row = 0; row < c.lead; ++row) {
        const double f = fi[row / per_k];
        double* p = cur.data() + static_cast<std::size_t>(row) * R;
        if (f > 0.0) {
          for (std::size_t r = 0; r < R; ++r) p[r] /= f;
        } else {
          std::fill(p, p + R, 0.0);
        }
      }
      return cur;
    };
    x1 = contract(c.w1);
    if (!c.wv.empty()) xv = contract(c.wv);
  }

  const bool indep = c.path == AgentCache::kIndependent;
  const int M = static_cast<int>(c.own_values.size());

  if (!c.streaming) {
    const UtilityTensor& t = c.tensor;
    if (indep) {
      if (c.affine) {
        std::vector<double> y1(L), y2(L);
        if (par) {
          kernels::omp::matvec(t.coef.data(), L, R, x1.data(), y1.data());
          kernels::omp::matvec(t.offset.data(), L, R, x1.data(), y2.data());
        } else {
          kernels::serial::matvec(t.coef.data(), L, R, x1.data(), y1.data());
          kernels::serial::matvec(t.offset.data(), L, R, x1.data(), y2.data());
        }
        for (int k = 0; k < K; ++k) {
          if (!c.active[k]) continue;
          for (int l = 0; l < L; ++l) out(k, l) = c.scale[k] * y1[l] + y2[l];
        }
      } else {
        // private values: the value axis is the observation axis
        std::vector<double> y(L);
        for (int k = 0; k < K; ++k) {
          if (!c.active[k]) continue;
          const double* U = t.full.data() + static_cast<std::size_t>(k) * L * R;
          if (par) {
            kernels::omp::matvec(U, L, R, x1.data(), y.data());
          } else {
            kernels::serial::matvec(U, L, R, x1.data(), y.data());
          }
          for (int l = 0; l < L; ++l) out(k, l) = y[l];
        }
      }
    } else if (c.affine) {
      const double* X = c.private_values ? x1.data() : xv.data();
      if (par) {
        kernels::omp::affine_rows(t.coef.data(), t.offset.data(), L, R, X,
                                  x1.data(), c.scale.data(), c.active.data(), K,
                                  out.data.data());
      } else {
        kernels::serial::affine_rows(t.coef.data(), t.offset.data(), L, R, X,
                                     x1.data(), c.scale.data(), c.active.data(),
                                     K, out.data.data());
      }
    } else {
      const bool per_row = c.private_values;
      const int MM = per_row ? 1 : M;
      if (par) {
        kernels::omp::full_rows(t.full.data(), MM, L, R, x1.data(),
                                c.active.data(), K, per_row, out.data.data());
      } else {
        kernels::serial::full_rows(t.full.data(), MM, L, R, x1.data(),
                                   c.active.data(), K, per_row,
                                   out.data.data());
      }
    }
    last_path_[agent] = indep ? "independent" : "correlated";
    return out;
  }

  // Streaming: rebuild each own action's utility slab on the fly.
#pragma omp parallel if (par)
  {
    std::vector<double> coef(c.affine ? R : 0), off(c.affine ? R : 0);
    std::vector<double> full(c.affine ? 0 : static_cast<std::size_t>(M) * R);
#pragma omp for schedule(dynamic)
    for (int l = 0; l < L; ++l) {
      fill_slab(mech_, agent, actions_, c.opp, c.own_values, c.affine, l, R,
                coef.data(), off.data(), full.data());
      for (int k = 0; k < K; ++k) {
        if (!c.active[k]) continue;
        const double* X1 = indep ? x1.data() : x1.data() + static_cast<std::size_t>(k) * R;
        double v = 0.0;
        if (c.affine) {
          const double* XV =
              c.private_values ? X1 : xv.data() + static_cast<std::size_t>(k) * R;
          v = c.scale[k] * dot(coef.data(), XV, R) + dot(off.data(), X1, R);
        } else if (c.private_values) {
          v = dot(full.data() + static_cast<std::size_t>(k) * R, X1, R);
        } else {
          for (int m = 0; m < M; ++m) {
            v += dot(full.data() + static_cast<std::size_t>(m) * R,
                     x1.data() + (static_cast<std::size_t>(k) * M + m) * R, R);
          }
        }
        out(k, l) = v;
      }
    }
  }
  last_path_[agent] = "streaming";
  return out;
}

}  // namespace distbne
