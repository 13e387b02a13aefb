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

#include <memory>
#include <random>

#include "distbne/gradient.hpp"
#include "distbne/learner.hpp"
#include "distbne/verify.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace distbne;

namespace {

// Row 0 carries all the mass; row 1 is a zero-probability observation.
Strategy one_row(std::vector<double> row) {
  const int L = static_cast<int>(row.size());
  Matrix m(2, L);
  for (int l = 0; l < L; ++l) m(0, l) = row[l];
  return make_strategy(m, Grid::uniform(0, 1, 2), {Grid::uniform(0, 1, L)},
                       {1.0, 0.0});
}

Matrix row_matrix(std::vector<double> row) {
  Matrix m(2, static_cast<int>(row.size()));
  std::copy(row.begin(), row.end(), m.data.begin());
  return m;
}

std::shared_ptr<GradientEngine> fpsb_engine(int K, int n = 2) {
  Mechanism m;
  m.agents = n;
  const Grid g = Grid::uniform(0, 1, K);
  const std::vector<double> marg(K, 1.0 / K);
  auto prior = std::make_shared<DiscretePrior>(DiscretePrior::independent(
      std::vector<Grid>(n, g), std::vector<std::vector<double>>(n, marg)));
  return std::make_shared<GradientEngine>(m, prior,
                                          std::vector<std::vector<Grid>>(n, {g}));
}

}  // namespace

TEST_CASE("step size schedules") {
  LearnerSpec s{Rule::kSoda1, 10.0, 0.05};
  CHECK(s.step_size(1) == 10.0);
  CHECK(s.step_size(32) == doctest::Approx(10.0 * std::pow(32.0, -0.05)));
  LearnerSpec fw{Rule::kSofw, 10.0, 0.05};
  CHECK(fw.step_size(1) == 1.0);
  CHECK(fw.step_size(3) == 0.5);
  CHECK_THROWS_AS(s.step_size(0), Error);
  CHECK(parse_rule("soma2") == Rule::kSoma2);
  CHECK_THROWS_AS(parse_rule("adam"), Error);
}

TEST_CASE("soda1 examples") {
  const auto s = one_row({0.5, 0.5});
  const auto n = step_soda1(s, row_matrix({1.0, 0.0}), 1.0);
  CHECK(n.matrix(0, 0) == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 1)).epsilon(1e-14));
  CHECK(n.matrix(0, 1) == doctest::Approx(1.0 / (std::exp(1.0) + 1)).epsilon(1e-14));

  const auto r = one_row({0.2, 0.3, 0.5});
  const auto same = step_soda1(r, row_matrix({4.0, 4.0, 4.0}), 3.0);
  for (int l = 0; l < 3; ++l) CHECK(same.matrix(0, l) == doctest::Approx(r.matrix(0, l)).epsilon(1e-14));
}

TEST_CASE("soda1 ignores row constants") {
  Rng rng(4);
  std::normal_distribution<double> d;
  const Grid o = Grid::uniform(0, 1, 6), a = Grid::uniform(0, 1, 9);
  const auto s = oracle::random_strategy(o, a, std::vector<double>(6, 1.0 / 6), 3);
  Matrix c(6, 9), shifted(6, 9);
  for (int k = 0; k < 6; ++k) {
    const double shift = 10 * d(rng);
    for (int l = 0; l < 9; ++l) {
      c(k, l) = d(rng);
      shifted(k, l) = c(k, l) + shift;
    }
  }
  const auto x = step_soda1(s, c, 2.0), y = step_soda1(s, shifted, 2.0);
  for (std::size_t i = 0; i < x.matrix.data.size(); ++i) {
    CHECK(std::abs(x.matrix.data[i] - y.matrix.data[i]) < 1e-12);
  }
}

TEST_CASE("simplex projection") {
  std::vector<double> y = {0.9, 0.3};
  project_scaled_simplex(y, 1.0);
  CHECK(y[0] == doctest::Approx(0.8));
  CHECK(y[1] == doctest::Approx(0.2));

  std::vector<double> f = {0.1, 0.6, 0.3};
  project_scaled_simplex(f, 1.0);
  CHECK(f[0] == doctest::Approx(0.1));
  CHECK(f[2] == doctest::Approx(0.3));
}

TEST_CASE("simplex projection agrees with the support-enumeration QP") {
  Rng rng(2024);
  std::uniform_int_distribution<int> len(1, 8);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_real_distribution<double> mass(0.01, 2.0);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> y(len(rng));
    for (double& x : y) x = d(rng);
    const double m = mass(rng);
    const auto ref = oracle::qp_simplex(y, m);
    project_scaled_simplex(y, m);
    for (std::size_t l = 0; l < y.size(); ++l) CHECK(std::abs(y[l] - ref[l]) < 1e-9);
  }
}

TEST_CASE("soda2, soma2, sofw and fictitious play examples") {
  const auto s = one_row({0.25, 0.75});
  Matrix dual = s.matrix;
  const auto a = step_soda2(dual, s, row_matrix({0.0, 0.0}), 1.0);
  CHECK(a.matrix.data == s.matrix.data);
  const auto b = step_soda2(dual, a, row_matrix({0.0, 0.0}), 1.0);
  CHECK(b.matrix.data == s.matrix.data);

  Matrix d2 = row_matrix({0.5, -0.1});
  const auto p = step_soda2(d2, s, row_matrix({0.4, 0.4}), 1.0);
  CHECK(p.matrix(0, 0) == doctest::Approx(0.8));
  CHECK(p.matrix(0, 1) == doctest::Approx(0.2));

  const auto m = step_soma2(s, row_matrix({0.0, 0.0}), 5.0);
  CHECK(m.matrix.data == s.matrix.data);

  const auto fw = step_sofw(s, row_matrix({1.0, 2.0}), 1.0);
  CHECK(fw.matrix(0, 0) == 0.0);
  CHECK(fw.matrix(0, 1) == 1.0);
  const auto flat = step_sofw(s, row_matrix({3.0, 3.0}), 1.0);
  CHECK(flat.matrix(0, 0) == 1.0);
  const auto half = step_sofw(s, row_matrix({1.0, 2.0}), 0.5);
  CHECK(half.matrix(0, 1) == doctest::Approx(0.875));

  const auto br = one_row({1.0, 0.0});
  CHECK(step_fictitious_play(s, br, 0).matrix.data == br.matrix.data);
  auto avg = s;
  for (long t = 1; t < 2000; ++t) avg = step_fictitious_play(avg, br, t);
  CHECK(avg.matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("every rule preserves feasibility on random steps") {
  Rng rng(77);
  std::uniform_int_distribution<int> rule_pick(0, 4), dim(2, 12);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_real_distribution<double> step(1e-3, 50.0), scale(1e-3, 1e3);
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = dim(rng), L = dim(rng);
    std::vector<double> marg(K);
    double tot = 0.0;
    for (double& m : marg) tot += (m = std::abs(d(rng)) + 1e-3);
    for (double& m : marg) m /= tot;
    const auto s0 = oracle::random_strategy(Grid::uniform(0, 1, K),
                                            Grid::uniform(0, 1, L), marg, trial);
    const Rule rule = static_cast<Rule>(rule_pick(rng));
    LearnerState st({rule, step(rng), 0.5}, s0);
    const double sc = scale(rng);
    for (int it = 0; it < 3; ++it) {
      Matrix c(s0.obs_count(), s0.action_count());
      for (double& x : c.data) x = sc * d(rng);
      st.step(c);
      const auto& m = st.iterate.matrix;
      for (int k = 0; k < m.rows; ++k) {
        double row = 0.0;
        for (double x : m.row(k)) {
          CHECK(x >= 0.0);
          row += x;
        }
        CHECK(std::abs(row - marg[k]) < 1e-10);
      }
    }
  }
}

TEST_CASE("run with zero iterations returns the initial profile") {
  auto eng = fpsb_engine(8);
  RunOptions opt;
  opt.max_iterations = 0;
  opt.seed = 3;
  opt.init = InitMode::kUniform;
  const auto res = run(*eng, opt);
  CHECK(res.reason == "max_iterations");
  CHECK(res.iterations == 0);
  const auto init = initial_profile(*eng, {0, 1}, InitMode::kUniform, 3);
  CHECK(res.strategies[0].matrix.data == init[0].matrix.data);
}

TEST_CASE("fpsb converges and bids near half the value") {
  auto eng = fpsb_engine(64);
  RunOptions opt;
  opt.learner = {Rule::kSoda1, 100.0, 0.05};
  opt.groups = {0, 0};
  opt.seed = 1;
  const auto res = run(*eng, opt);
  CHECK(res.reason == "converged");
  CHECK(res.iterations <= 1000);
  CHECK(res.certificate.max_loss() < 1e-4);
  const auto mean = mean_action(res.strategies[0]);
  for (int k = 8; k < 64; ++k) {
    CHECK(std::abs(mean[k] - 0.5 * res.strategies[0].obs_grid[k]) < 0.05);
  }
}

TEST_CASE("learning is simultaneous and deterministic") {
  auto eng = fpsb_engine(16);
  RunOptions opt;
  opt.learner = {Rule::kSoma2, 1.0, 0.5};
  opt.max_iterations = 30;
  opt.tolerance = 0.0;
  opt.seed = 8;
  std::vector<std::tuple<std::string, int, long>> events;
  opt.observer = [&](const std::string& e, int g, long t) { events.emplace_back(e, g, t); };
  const auto a = run(*eng, opt);
  // Per iteration: both gradients, then both updates.
  long it = -1;
  bool updating = false;
  for (const auto& [e, g, t] : events) {
    if (t != it) {
      it = t;
      updating = false;
    }
    if (e == "update") updating = true;
    if (e == "gradient") CHECK_FALSE(updating);
  }
  // 30 updates, plus the gradients that certify the final profile.
  CHECK(events.size() == 4 * 30 + 2);
  opt.observer = nullptr;
  auto eng2 = fpsb_engine(16);
  const auto b = run(*eng2, opt);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].loss == b.history[i].loss);
  }
  CHECK(a.strategies[1].matrix.data == b.strategies[1].matrix.data);
}

TEST_CASE("tullock symmetric converges quickly") {
  Mechanism m;
  m.kind = MechanismKind::kTullock;
  m.tullock_r = 1.0;
  const Grid o = Grid::uniform(0, 1, 64), a = Grid::uniform(0, 0.5, 64);
  const std::vector<double> marg(64, 1.0 / 64);
  auto prior = std::make_shared<DiscretePrior>(DiscretePrior::independent({o, o}, {marg, marg}));
  GradientEngine eng(m, prior, {{a}, {a}});
  RunOptions opt;
  opt.learner = {Rule::kSoda2, 10.0, 0.05};
  opt.groups = {0, 0};
  const auto res = run(eng, opt);
  CHECK(res.reason == "converged");
  CHECK(res.iterations < 1000);
}
