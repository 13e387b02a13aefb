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

#ifndef DISTBNE_MECHANISM_HPP_
#define DISTBNE_MECHANISM_HPP_

#include <array>
#include <span>
#include <string>

#include "distbne/common.hpp"

namespace distbne {

enum class MechanismKind { kFpsb, kSpsb, kAllPay, kTullock, kLlg, kSplitAward };
enum class PaymentRule { kNearestZero, kNearestVcg, kNearestBid, kFirstPrice };
enum class SplitCost { kMultiplicative, kAdditive };

MechanismKind parse_mechanism_kind(const std::string& s);
std::string to_string(MechanismKind k);
PaymentRule parse_payment_rule(const std::string& s);
std::string to_string(PaymentRule r);

struct Mechanism {
  MechanismKind kind = MechanismKind::kFpsb;
  int agents = 2;
  PaymentRule payment_rule = PaymentRule::kNearestVcg;  // LLG
  // LLG only: award b1 + b2 == b3 ties to the locals instead of nobody.
  bool llg_ties_to_locals = false;
  double tullock_r = 1.0;
  double split_c = 0.3;
  SplitCost split_cost = SplitCost::kMultiplicative;
  // Admissible (100%, 50%) bid rectangle: lo100, hi100, lo50, hi50.
  std::array<double, 4> split_bounds = {1.0, 2.5, 0.3, 1.2};
  double risk_rho = 1.0;

  // Procurement: lower prices win.
  bool reverse() const { return kind == MechanismKind::kSplitAward; }
  // Action dimensions per agent; split award bids on (100%, 50%).
  int action_dims() const { return kind == MechanismKind::kSplitAward ? 2 : 1; }
  // Utility is x(b) * v - p(b) whenever no risk transform applies.
  bool affine_in_value() const { return risk_rho == 1.0; }
  std::string id() const;
  void validate() const;
};

// sign(u) |u|^rho.
double crra(double u, double rho);

// Ex-post utility of `agent`. `bids` holds action_dims() entries per agent,
// agent-major. `value` is the agent's valuation (its cost in procurement).
double expost_utility(const Mechanism& mech, int agent,
                      std::span<const double> bids, double value);

struct LlgOutcome {
  enum Winner { kNone, kLocals, kGlobal };
  Winner winner = kNone;
  std::array<double, 3> payments{};
};

// Agents 0 and 1 are the locals, agent 2 the global bidder.
LlgOutcome llg_outcome(const Mechanism& mech, std::span<const double> bids);

struct SplitOutcome {
  enum Allocation { kNone, kSoleFirst, kSoleSecond, kSplit };
  Allocation allocation = kNone;
  std::array<double, 2> utilities{};
  double price = 0.0;  // paid by the buyer
};

// bids = (b1_100, b1_50, b2_100, b2_50). Utilities before any risk transform.
SplitOutcome split_award_outcome(const Mechanism& mech,
                                 std::span<const double> bids,
                                 std::span<const double> costs);

// Total payments collected by the auctioneer (procurement: paid by the
// buyer).
double revenue(const Mechanism& mech, std::span<const double> bids);

}  // namespace distbne

#endif  // DISTBNE_MECHANISM_HPP_
