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

#ifndef DISTBNE_VERIFY_HPP_
#define DISTBNE_VERIFY_HPP_

#include <span>
#include <vector>

#include "distbne/gradient.hpp"
#include "distbne/strategy.hpp"

namespace distbne {

// Row k puts marginal_k on argmax_l c[k, l], lowest index on ties.
Matrix best_response(const Matrix& c, std::span<const double> marginal);
Strategy best_response(const Matrix& c, const Strategy& layout);

struct Certificate {
  std::vector<double> loss;  // relative utility loss per agent
  std::vector<double> utility_br;
  std::vector<double> utility_current;
  long iteration = 0;
  double tolerance = 1e-4;
  bool converged = false;

  double max_loss() const;
};

// Utility loss of one agent given its gradient.
double relative_loss(double utility_br, double utility_current);

// Certificate from precomputed gradients (one per agent).
Certificate certify(const std::vector<const Strategy*>& profile,
                    const std::vector<Matrix>& gradients, double tolerance);

// Computes every agent's gradient and certifies the profile.
Certificate relative_utility_loss(GradientEngine& engine,
                                  const std::vector<const Strategy*>& profile,
                                  double tolerance = 1e-4);

// sum_i <grad_i u_i(probe), probe_i - eq_i>. Positive values certify that
// the equilibrium is not globally variationally stable.
double vs_probe(GradientEngine& engine,
                const std::vector<const Strategy*>& equilibrium,
                const std::vector<const Strategy*>& probe);

// Each row's mean bid scaled by `factor`, with the row's mass moved to the
// nearest action point.
Strategy collusive_probe(const Strategy& eq, double factor = 0.5);

}  // namespace distbne

#endif  // DISTBNE_VERIFY_HPP_
