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

#include "distbne/verify.hpp"

#include <algorithm>

namespace distbne {

Matrix best_response(const Matrix& c, std::span<const double> marginal) {
  if (static_cast<int>(marginal.size()) != c.rows) {
    throw Error("best_response: marginal length != gradient rows");
  }
  Matrix br(c.rows, c.cols);
  for (int k = 0; k < c.rows; ++k) {
    const auto row = c.row(k);
    // max_element keeps the first maximum
    const int l = static_cast<int>(std::max_element(row.begin(), row.end()) -
                                   row.begin());
    br(k, l) = marginal[k];
  }
  return br;
}

Strategy best_response(const Matrix& c, const Strategy& layout) {
  if (!c.same_shape(layout.matrix)) {
    throw Error("best_response: gradient shape != strategy shape");
  }
  Strategy s = layout;
  s.matrix = best_response(c, layout.marginal);
  return s;
}

double Certificate::max_loss() const {
  return loss.empty() ? 0.0 : *std::max_element(loss.begin(), loss.end());
}

double relative_loss(double utility_br, double utility_current) {
  const double gap = utility_br - utility_current;
  return utility_br > 1e-12 ? gap / utility_br : gap;
}

Certificate certify(const std::vector<const Strategy*>& profile,
                    const std::vector<Matrix>& gradients, double tolerance) {
  if (profile.size() != gradients.size()) {
    throw Error("certify: one gradient per agent required");
  }
  Certificate cert;
  cert.tolerance = tolerance;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Matrix br = best_response(gradients[i], profile[i]->marginal);
    const double ub = frobenius_dot(br, gradients[i]);
    const double uc = frobenius_dot(profile[i]->matrix, gradients[i]);
    cert.utility_br.push_back(ub);
    cert.utility_current.push_back(uc);
    cert.loss.push_back(relative_loss(ub, uc));
  }
  cert.converged = cert.max_loss() < tolerance;
  return cert;
}

Certificate relative_utility_loss(GradientEngine& engine,
                                  const std::vector<const Strategy*>& profile,
                                  double tolerance) {
  std::vector<Matrix> grads;
  for (int i = 0; i < engine.agents(); ++i) {
    grads.push_back(engine.gradient(i, profile));
  }
  return certify(profile, grads, tolerance);
}

double vs_probe(GradientEngine& engine,
                const std::vector<const Strategy*>& equilibrium,
                const std::vector<const Strategy*>& probe) {
  if (equilibrium.size() != probe.size() ||
      static_cast<int>(probe.size()) != engine.agents()) {
    throw Error("vs_probe: profile sizes differ");
  }
  double total = 0.0;
  for (int i = 0; i < engine.agents(); ++i) {
    if (!equilibrium[i]->matrix.same_shape(probe[i]->matrix)) {
      throw Error("vs_probe: strategy shape mismatch");
    }
    const Matrix c = engine.gradient(i, probe);
    total += frobenius_dot(probe[i]->matrix, c) -
             frobenius_dot(equilibrium[i]->matrix, c);
  }
  return total;
}

Strategy collusive_probe(const Strategy& eq, double factor) {
  if (eq.action_dims() != 1) {
    throw Error("collusive_probe: single-dimensional actions only");
  }
  Strategy p = eq;
  std::fill(p.matrix.data.begin(), p.matrix.data.end(), 0.0);
  const std::vector<double> mean = mean_action(eq);
  for (int k = 0; k < eq.obs_count(); ++k) {
    if (!(eq.marginal[k] > 0.0)) continue;
    const int l = eq.action_grids[0].nearest(factor * mean[k]).index;
    p.matrix(k, l) = eq.marginal[k];
  }
  return p;
}

}  // namespace distbne
