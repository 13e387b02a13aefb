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

#ifndef DISTBNE_EVALUATE_HPP_
#define DISTBNE_EVALUATE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "distbne/mechanism.hpp"
#include "distbne/prior.hpp"
#include "distbne/strategy.hpp"

namespace distbne {

constexpr std::uint64_t kDefaultEvalSamples = std::uint64_t{1} << 18;

using BidFunction = std::function<double(double observation)>;

// Closed-form equilibrium bids. bid[i] is empty for agents without a known
// closed form.
struct AnalyticBNE {
  std::string id;
  std::vector<BidFunction> bid;
  // Formula validated only against reported losses, not printed in the
  // source it comes from.
  bool gated = false;

  bool complete() const;
  bool has(int agent) const {
    return agent < static_cast<int>(bid.size()) && static_cast<bool>(bid[agent]);
  }
};

// Registry lookup by mechanism and continuous prior kind. Returns nothing
// when no agent has a known baseline.
std::optional<AnalyticBNE> lookup_analytic(const Mechanism& mech,
                                           const std::string& prior_kind);

struct EvalReport {
  std::vector<int> agents;       // evaluated agents
  std::vector<double> loss;      // L per evaluated agent (NaN if undefined)
  std::vector<std::string> note; // diagnostics, e.g. undefined L
  std::vector<double> l2;        // per evaluated agent, first action axis
  std::vector<double> utility_learned;
  std::vector<double> utility_analytic;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string baseline;
};

// Monte-Carlo evaluation in the continuous game. For each evaluated agent,
// the agent bids through the induced strategy while all opponents play the
// analytic equilibrium; the same draws feed both utilities of L. Agents
// without a baseline are skipped; L is undefined (NaN) if an opponent lacks
// one or the baseline utility is not positive.
EvalReport evaluate(const std::vector<const Strategy*>& profile,
                    const AnalyticBNE& beta, const ContinuousPrior& prior,
                    const Mechanism& mech, std::uint64_t samples,
                    std::uint64_t seed);

// Mean total payment when every agent bids through its induced strategy.
double estimate_revenue(const std::vector<const Strategy*>& profile,
                        const ContinuousPrior& prior, const Mechanism& mech,
                        std::uint64_t samples, std::uint64_t seed);

struct SplitAwardStats {
  double split_share = 0.0;     // fraction of auctions awarded as a split
  double sole_share = 0.0;
  double none_share = 0.0;
  double mean_bid50 = 0.0;
  double mean_bid100 = 0.0;
  // Fraction of 50% bids at or above the midpoint of the pooling price range
  // [C * o_max, (1 - C) * o_min].
  double upper_pooling_share = 0.0;
  double pooling_midpoint = 0.0;
};

SplitAwardStats split_award_stats(const std::vector<const Strategy*>& profile,
                                  const ContinuousPrior& prior,
                                  const Mechanism& mech, double obs_lower,
                                  double obs_upper, std::uint64_t samples,
                                  std::uint64_t seed);

// Writes `count` sampled (observation, bid) rows for `agent`, plus the
// analytic bid when available. Observations come from the continuous prior.
void emit_plot_data(std::ostream& out,
                    const std::vector<const Strategy*>& profile,
                    const ContinuousPrior& prior, const AnalyticBNE* beta,
                    int agent, int count, std::uint64_t seed,
                    bool header = true);

}  // namespace distbne

#endif  // DISTBNE_EVALUATE_HPP_
