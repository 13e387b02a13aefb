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

#include "distbne/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "distbne/strategy_io.hpp"

namespace distbne {
namespace {

constexpr std::uint64_t kBatch = 4096;

std::uint64_t batch_count(std::uint64_t samples) {
  return (samples + kBatch - 1) / kBatch;
}

std::uint64_t batch_size(std::uint64_t samples, std::uint64_t b) {
  return std::min(kBatch, samples - b * kBatch);
}

std::vector<BidSampler> samplers(const std::vector<const Strategy*>& profile) {
  std::vector<BidSampler> out;
  for (const Strategy* s : profile) out.emplace_back(*s);
  return out;
}

}  // namespace

bool AnalyticBNE::complete() const {
  return !bid.empty() &&
         std::all_of(bid.begin(), bid.end(),
                     [](const BidFunction& f) { return static_cast<bool>(f); });
}

std::optional<AnalyticBNE> lookup_analytic(const Mechanism& mech,
                                           const std::string& prior_kind) {
  const int n = mech.agents;
  const double rho = mech.risk_rho;
  AnalyticBNE b;
  auto all = [&](BidFunction f) { b.bid.assign(n, f); };
  switch (mech.kind) {
    case MechanismKind::kFpsb:
      if (prior_kind == "uniform") {
        b.id = "fpsb_uniform";
        const double f = (n - 1) / (n - 1 + rho);
        all([f](double o) { return f * o; });
        b.gated = rho != 1.0;
        return b;
      }
      if (prior_kind == "affiliated" && n == 2 && rho == 1.0) {
        b.id = "fpsb_affiliated";
        all([](double o) { return 2.0 * o / 3.0; });
        return b;
      }
      break;
    case MechanismKind::kSpsb:
      if (rho != 1.0) break;
      if (prior_kind == "uniform" || prior_kind == "gaussian_trunc" ||
          prior_kind == "custom_density") {
        b.id = "spsb_private_truthful";
        all([](double o) { return o; });
        return b;
      }
      if (prior_kind == "affiliated" && n == 2) {
        b.id = "spsb_affiliated";
        all([](double o) { return o; });
        return b;
      }
      if (prior_kind == "common_value" && n == 3) {
        b.id = "spsb_common_value";
        all([](double o) { return 2.0 * o / (2.0 + o); });
        return b;
      }
      break;
    case MechanismKind::kAllPay:
      if (prior_kind == "uniform" && rho == 1.0) {
        b.id = "all_pay_uniform";
        all([n](double o) { return (n - 1.0) / n * std::pow(o, n); });
        return b;
      }
      break;
    case MechanismKind::kLlg:
      if (mech.payment_rule != PaymentRule::kFirstPrice && rho == 1.0) {
        b.id = "llg_global_truthful";
        b.bid.assign(n, BidFunction());
        b.bid[2] = [](double o) { return o; };
        return b;
      }
      break;
    default:
      break;
  }
  return std::nullopt;
}

EvalReport evaluate(const std::vector<const Strategy*>& profile,
                    const AnalyticBNE& beta, const ContinuousPrior& prior,
                    const Mechanism& mech, std::uint64_t samples,
                    std::uint64_t seed) {
  const int n = mech.agents;
  if (static_cast<int>(profile.size()) != n || prior.agents != n) {
    throw Error("evaluate: profile, prior and mechanism disagree on n");
  }
  if (mech.action_dims() != 1) {
    throw Error("evaluate: analytic baselines are single-dimensional");
  }
  if (samples == 0) throw Error("evaluate: zero samples");
  EvalReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.baseline = beta.id;
  for (int i = 0; i < n; ++i) {
    if (beta.has(i)) rep.agents.push_back(i);
  }
  if (rep.agents.empty()) throw Error("evaluate: no analytic baseline");

  const auto bs = samplers(profile);
  const int E = static_cast<int>(rep.agents.size());
  const std::uint64_t nb = batch_count(samples);
  // per batch and evaluated agent: sum u_learned, sum u_beta, sum sq err
  std::vector<double> acc(nb * E * 3, 0.0);
  const bool opp_complete = beta.complete();

#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < static_cast<long long>(nb); ++b) {
    Rng rng(derive_seed(seed, b));
    std::vector<double> v(n), o(n), eq(n), bids(n);
    double* a = acc.data() + b * E * 3;
    for (std::uint64_t t = 0; t < batch_size(samples, b); ++t) {
      prior.sample(rng, v, o);
      for (int j = 0; j < n; ++j) eq[j] = beta.has(j) ? beta.bid[j](o[j]) : 0.0;
      for (int e = 0; e < E; ++e) {
        const int i = rep.agents[e];
        const double learned = bs[i].sample(o[i], rng);
        const double d = learned - eq[i];
        a[e * 3 + 2] += d * d;
        if (!opp_complete) continue;
        bids = eq;
        bids[i] = learned;
        a[e * 3 + 0] += expost_utility(mech, i, bids, v[i]);
        a[e * 3 + 1] += expost_utility(mech, i, eq, v[i]);
      }
    }
  }

  for (int e = 0; e < E; ++e) {
    double ul = 0.0, ub = 0.0, sq = 0.0;
    for (std::uint64_t b = 0; b < nb; ++b) {
      ul += acc[(b * E + e) * 3 + 0];
      ub += acc[(b * E + e) * 3 + 1];
      sq += acc[(b * E + e) * 3 + 2];
    }
    ul /= samples;
    ub /= samples;
    rep.utility_learned.push_back(ul);
    rep.utility_analytic.push_back(ub);
    rep.l2.push_back(std::sqrt(sq / samples));
    if (!opp_complete) {
      rep.loss.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.note.push_back("no analytic baseline for every opponent");
    } else if (!(ub > 0.0)) {
      rep.loss.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.note.push_back("baseline utility is not positive");
    } else {
      rep.loss.push_back(1.0 - ul / ub);
      rep.note.push_back("");
    }
  }
  return rep;
}

double estimate_revenue(const std::vector<const Strategy*>& profile,
                        const ContinuousPrior& prior, const Mechanism& mech,
                        std::uint64_t samples, std::uint64_t seed) {
  const int n = mech.agents;
  if (static_cast<int>(profile.size()) != n || prior.agents != n) {
    throw Error("estimate_revenue: profile, prior and mechanism disagree on n");
  }
  if (samples == 0) throw Error("estimate_revenue: zero samples");
  const auto bs = samplers(profile);
  const int dims = mech.action_dims();
  const std::uint64_t nb = batch_count(samples);
  std::vector<double> acc(nb, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < static_cast<long long>(nb); ++b) {
    Rng rng(derive_seed(seed, b));
    std::vector<double> v(n), o(n), bids(static_cast<std::size_t>(n) * dims);
    for (std::uint64_t t = 0; t < batch_size(samples, b); ++t) {
      prior.sample(rng, v, o);
      for (int j = 0; j < n; ++j) {
        bs[j].sample(o[j], rng, std::span<double>(bids).subspan(j * dims, dims));
      }
      acc[b] += revenue(mech, bids);
    }
  }
  double total = 0.0;
  for (double x : acc) total += x;
  return total / samples;
}

SplitAwardStats split_award_stats(const std::vector<const Strategy*>& profile,
                                  const ContinuousPrior& prior,
                                  const Mechanism& mech, double obs_lower,
                                  double obs_upper, std::uint64_t samples,
                                  std::uint64_t seed) {
  if (mech.kind != MechanismKind::kSplitAward) {
    throw Error("split_award_stats: not a split-award mechanism");
  }
  if (profile.size() != 2 || prior.agents != 2 || samples == 0) {
    throw Error("split_award_stats: needs two agents and samples > 0");
  }
  SplitAwardStats st;
  const double lo = mech.split_cost == SplitCost::kMultiplicative
                        ? mech.split_c * obs_upper
                        : mech.split_c;
  const double hi = obs_lower - (mech.split_cost == SplitCost::kMultiplicative
                                     ? mech.split_c * obs_lower
                                     : mech.split_c);
  st.pooling_midpoint = 0.5 * (lo + hi);
  const auto bs = samplers(profile);
  const std::uint64_t nb = batch_count(samples);
  // split, sole, none, sum b50, sum b100, upper
  std::vector<double> acc(nb * 6, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (long long b = 0; b < static_cast<long long>(nb); ++b) {
    Rng rng(derive_seed(seed, b));
    std::vector<double> v(2), o(2), bids(4);
    double* a = acc.data() + b * 6;
    for (std::uint64_t t = 0; t < batch_size(samples, b); ++t) {
      prior.sample(rng, v, o);
      for (int j = 0; j < 2; ++j) {
        bs[j].sample(o[j], rng, std::span<double>(bids).subspan(2 * j, 2));
        a[3] += bids[2 * j + 1];
        a[4] += bids[2 * j];
        if (bids[2 * j + 1] >= st.pooling_midpoint) a[5] += 1.0;
      }
      const SplitOutcome out = split_award_outcome(mech, bids, v);
      if (out.allocation == SplitOutcome::kSplit) {
        a[0] += 1.0;
      } else if (out.allocation == SplitOutcome::kNone) {
        a[2] += 1.0;
      } else {
        a[1] += 1.0;
      }
    }
  }
  double sum[6] = {0, 0, 0, 0, 0, 0};
  for (std::uint64_t b = 0; b < nb; ++b) {
    for (int q = 0; q < 6; ++q) sum[q] += acc[b * 6 + q];
  }
  const double N = static_cast<double>(samples);
  st.split_share = sum[0] / N;
  st.sole_share = sum[1] / N;
  st.none_share = sum[2] / N;
  st.mean_bid50 = sum[3] / (2 * N);
  st.mean_bid100 = sum[4] / (2 * N);
  st.upper_pooling_share = sum[5] / (2 * N);
  return st;
}

void emit_plot_data(std::ostream& out,
                    const std::vector<const Strategy*>& profile,
                    const ContinuousPrior& prior, const AnalyticBNE* beta,
                    int agent, int count, std::uint64_t seed, bool header) {
  if (count < 1) throw Error("emit_plot_data: count must be >= 1");
  const int n = static_cast<int>(profile.size());
  if (prior.agents != n) throw Error("emit_plot_data: agent count mismatch");
  if (agent < 0 || agent >= n) throw Error("emit_plot_data: bad agent");
  const int dims = profile[agent]->action_dims();
  if (header) {
    out << "agent,observation";
    for (int d = 0; d < dims; ++d) out << ",bid" << d;
    out << ",analytic_bid\n";
  }
  Rng rng(seed);
  const BidSampler bs(*profile[agent]);
  std::vector<double> v(n), o(n), bid(dims);
  for (int t = 0; t < count; ++t) {
    prior.sample(rng, v, o);
    bs.sample(o[agent], rng, bid);
    out << agent << ',' << format_double(o[agent]);
    for (double x : bid) out << ',' << format_double(x);
    out << ',';
    if (beta && beta->has(agent)) out << format_double(beta->bid[agent](o[agent]));
    out << '\n';
  }
}

}  // namespace distbne
