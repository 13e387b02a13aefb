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

#include "distbne/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace distbne {
namespace {

// Index of the unique maximum, or -1 if the maximum is shared.
int unique_max(std::span<const double> bids) {
  int best = 0;
  bool tied = false;
  for (int j = 1; j < static_cast<int>(bids.size()); ++j) {
    if (bids[j] > bids[best]) {
      best = j;
      tied = false;
    } else if (bids[j] == bids[best]) {
      tied = true;
    }
  }
  return tied ? -1 : best;
}

// Closest point to z on {p1 + p2 = total, 0 <= p_i <= cap_i}. Solves
// sum_i clip(z_i + lam, 0, cap_i) = total over the sorted breakpoints of lam.
std::array<double, 2> project_core_segment(std::array<double, 2> z,
                                           std::array<double, 2> cap,
                                           double total) {
  auto g = [&](double lam) {
    return std::clamp(z[0] + lam, 0.0, cap[0]) +
           std::clamp(z[1] + lam, 0.0, cap[1]);
  };
  std::array<double, 4> bp = {-z[0], cap[0] - z[0], -z[1], cap[1] - z[1]};
  std::sort(bp.begin(), bp.end());
  double lam = bp[0];
  if (g(bp[0]) >= total) {
    lam = bp[0];
  } else {
    lam = bp[3];
    for (int j = 1; j < 4; ++j) {
      const double g1 = g(bp[j]);
      if (g1 >= total) {
        const double g0 = g(bp[j - 1]);
        lam = g1 == g0 ? bp[j]
                       : bp[j - 1] + (total - g0) * (bp[j] - bp[j - 1]) /
                                         (g1 - g0);
        break;
      }
    }
  }
  std::array<double, 2> p = {std::clamp(z[0] + lam, 0.0, cap[0]),
                             std::clamp(z[1] + lam, 0.0, cap[1])};
  // Remove the last bit of rounding from the binding constraint.
  const double slack = total - p[0] - p[1];
  if (slack != 0.0) {
    const int j = (p[0] + slack >= 0.0 && p[0] + slack <= cap[0]) ? 0 : 1;
    p[j] = std::clamp(p[j] + slack, 0.0, cap[j]);
  }
  return p;
}

double split_share_cost(const Mechanism& mech, double cost) {
  return mech.split_cost == SplitCost::kMultiplicative ? mech.split_c * cost
                                                       : mech.split_c;
}

double quasilinear(const Mechanism& mech, int agent,
                   std::span<const double> bids, double value) {
  const int n = mech.agents;
  switch (mech.kind) {
    case MechanismKind::kFpsb: {
      return unique_max(bids) == agent ? value - bids[agent] : 0.0;
    }
    case MechanismKind::kSpsb: {
      if (unique_max(bids) != agent) return 0.0;
      double second = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != agent) second = std::max(second, bids[j]);
      }
      return value - second;
    }
    case MechanismKind::kAllPay: {
      return (unique_max(bids) == agent ? value : 0.0) - bids[agent];
    }
    case MechanismKind::kTullock: {
      double total = 0.0;
      for (int j = 0; j < n; ++j) total += std::pow(bids[j], mech.tullock_r);
      if (total <= 0.0) return value / n - bids[agent];
      return value * std::pow(bids[agent], mech.tullock_r) / total -
             bids[agent];
    }
    case MechanismKind::kLlg: {
      const LlgOutcome out = llg_outcome(mech, bids);
      const bool wins = (out.winner == LlgOutcome::kLocals && agent < 2) ||
                        (out.winner == LlgOutcome::kGlobal && agent == 2);
      return wins ? value - out.payments[agent] : 0.0;
    }
    case MechanismKind::kSplitAward: {
      const double b1 = bids[2 * agent], b2 = bids[2 * agent + 1];
      const double s0 = bids[0] < bids[2] ? bids[0] : bids[2];
      const double split = bids[1] + bids[3];
      // Mirrors split_award_outcome without touching the opponent's cost.
      if (split < s0) return b2 - split_share_cost(mech, value);
      if (s0 < split && bids[0] != bids[2]) {
        const int sole = bids[0] < bids[2] ? 0 : 1;
        return sole == agent ? b1 - value : 0.0;
      }
      return 0.0;
    }
  }
  throw Error("unknown mechanism kind");
}

}  // namespace

MechanismKind parse_mechanism_kind(const std::string& s) {
  if (s == "fpsb") return MechanismKind::kFpsb;
  if (s == "spsb") return MechanismKind::kSpsb;
  if (s == "all_pay" || s == "all_pay_first_price") return MechanismKind::kAllPay;
  if (s == "tullock") return MechanismKind::kTullock;
  if (s == "llg") return MechanismKind::kLlg;
  if (s == "split_award") return MechanismKind::kSplitAward;
  throw Error("unknown mechanism kind '" + s + "'");
}

std::string to_string(MechanismKind k) {
  switch (k) {
    case MechanismKind::kFpsb: return "fpsb";
    case MechanismKind::kSpsb: return "spsb";
    case MechanismKind::kAllPay: return "all_pay";
    case MechanismKind::kTullock: return "tullock";
    case MechanismKind::kLlg: return "llg";
    case MechanismKind::kSplitAward: return "split_award";
  }
  return "?";
}

PaymentRule parse_payment_rule(const std::string& s) {
  if (s == "NZ" || s == "nz") return PaymentRule::kNearestZero;
  if (s == "NVCG" || s == "nvcg") return PaymentRule::kNearestVcg;
  if (s == "NB" || s == "nb") return PaymentRule::kNearestBid;
  if (s == "first_price") return PaymentRule::kFirstPrice;
  throw Error("unknown payment rule '" + s + "'");
}

std::string to_string(PaymentRule r) {
  switch (r) {
    case PaymentRule::kNearestZero: return "NZ";
    case PaymentRule::kNearestVcg: return "NVCG";
    case PaymentRule::kNearestBid: return "NB";
    case PaymentRule::kFirstPrice: return "first_price";
  }
  return "?";
}

std::string Mechanism::id() const {
  std::ostringstream os;
  os << to_string(kind) << "_n" << agents;
  if (kind == MechanismKind::kLlg) {
    os << "_" << to_string(payment_rule);
    if (llg_ties_to_locals) os << "_tielocals";
  }
  if (kind == MechanismKind::kTullock) os << "_r" << tullock_r;
  if (kind == MechanismKind::kSplitAward) {
    os << "_C" << split_c
       << (split_cost == SplitCost::kMultiplicative ? "_mult" : "_add");
  }
  if (risk_rho != 1.0) os << "_rho" << risk_rho;
  return os.str();
}

void Mechanism::validate() const {
  if (agents < 2) throw Error("mechanism needs at least two agents");
  if (!(risk_rho > 0.0 && risk_rho <= 1.0)) {
    throw Error("risk_rho must lie in (0, 1]");
  }
  if (kind == MechanismKind::kTullock && !(tullock_r > 0.0)) {
    throw Error("tullock r must be positive");
  }
  if (kind == MechanismKind::kLlg && agents != 3) {
    throw Error("llg requires exactly three agents");
  }
  if (kind == MechanismKind::kSplitAward) {
    if (agents != 2) throw Error("split_award requires exactly two agents");
    if (!(split_c > 0.0 && split_c < 0.5)) {
      throw Error("split_award C must lie in (0, 0.5)");
    }
  }
}

double crra(double u, double rho) {
  if (rho == 1.0) return u;
  if (u == 0.0) return 0.0;
  return u > 0.0 ? std::pow(u, rho) : -std::pow(-u, rho);
}

double expost_utility(const Mechanism& mech, int agent,
                      std::span<const double> bids, double value) {
  if (static_cast<int>(bids.size()) != mech.agents * mech.action_dims()) {
    throw Error("expost_utility: bid profile has wrong dimension");
  }
  if (agent < 0 || agent >= mech.agents) {
    throw Error("expost_utility: agent out of range");
  }
  return crra(quasilinear(mech, agent, bids, value), mech.risk_rho);
}

LlgOutcome llg_outcome(const Mechanism& mech, std::span<const double> bids) {
  if (bids.size() != 3) throw Error("llg_outcome: expects three bids");
  const double b1 = bids[0], b2 = bids[1], b3 = bids[2];
  if (b1 < 0.0 || b2 < 0.0 || b3 < 0.0) {
    throw Error("llg_outcome: negative bid");
  }
  LlgOutcome out;
  const double locals = b1 + b2;
  if (b3 > locals) {
    out.winner = LlgOutcome::kGlobal;
    out.payments[2] =
        mech.payment_rule == PaymentRule::kFirstPrice ? b3 : locals;
    return out;
  }
  if (!(locals > b3) && !(mech.llg_ties_to_locals && locals == b3)) {
    return out;
  }
  out.winner = LlgOutcome::kLocals;
  std::array<double, 2> p = {0.0, 0.0};
  switch (mech.payment_rule) {
    case PaymentRule::kFirstPrice:
      p = {b1, b2};
      break;
    case PaymentRule::kNearestZero:
      p = project_core_segment({0.0, 0.0}, {b1, b2}, b3);
      break;
    case PaymentRule::kNearestVcg:
      p = project_core_segment(
          {std::max(0.0, b3 - b2), std::max(0.0, b3 - b1)}, {b1, b2}, b3);
      break;
    case PaymentRule::kNearestBid:
      p = project_core_segment({b1, b2}, {b1, b2}, b3);
      break;
  }
  out.payments[0] = p[0];
  out.payments[1] = p[1];
  return out;
}

SplitOutcome split_award_outcome(const Mechanism& mech,
                                 std::span<const double> bids,
                                 std::span<const double> costs) {
  if (bids.size() != 4 || costs.size() != 2) {
    throw Error("split_award_outcome: expects 2x2 bids and two costs");
  }
  const auto& r = mech.split_bounds;
  for (int a = 0; a < 2; ++a) {
    if (bids[2 * a] < r[0] || bids[2 * a] > r[1] || bids[2 * a + 1] < r[2] ||
        bids[2 * a + 1] > r[3]) {
      throw Error("split_award_outcome: bid outside the action rectangle");
    }
  }
  SplitOutcome out;
  const double sole = std::min(bids[0], bids[2]);
  const double split = bids[1] + bids[3];
  if (split < sole) {
    out.allocation = SplitOutcome::kSplit;
    out.price = split;
    out.utilities[0] = bids[1] - split_share_cost(mech, costs[0]);
    out.utilities[1] = bids[3] - split_share_cost(mech, costs[1]);
  } else if (sole < split && bids[0] != bids[2]) {
    const int w = bids[0] < bids[2] ? 0 : 1;
    out.allocation = w == 0 ? SplitOutcome::kSoleFirst : SplitOutcome::kSoleSecond;
    out.price = sole;
    out.utilities[w] = bids[2 * w] - costs[w];
  }
  return out;
}

double revenue(const Mechanism& mech, std::span<const double> bids) {
  const int n = mech.agents;
  switch (mech.kind) {
    case MechanismKind::kFpsb: {
      const int w = unique_max(bids);
      return w < 0 ? 0.0 : bids[w];
    }
    case MechanismKind::kSpsb: {
      const int w = unique_max(bids);
      if (w < 0) return 0.0;
      double second = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j != w) second = std::max(second, bids[j]);
      }
      return second;
    }
    case MechanismKind::kAllPay:
    case MechanismKind::kTullock: {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += bids[j];
      return s;
    }
    case MechanismKind::kLlg: {
      const LlgOutcome out = llg_outcome(mech, bids);
      return out.payments[0] + out.payments[1] + out.payments[2];
    }
    case MechanismKind::kSplitAward: {
      const double sole = std::min(bids[0], bids[2]);
      const double split = bids[1] + bids[3];
      if (split < sole) return split;
      if (sole < split && bids[0] != bids[2]) return sole;
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace distbne
