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

#include <cmath>
#include <numeric>

#include "distbne/grid.hpp"
#include "distbne/prior.hpp"
#include "doctest.h"

using namespace distbne;

namespace {

// Mass a nearest-point binning assigns to each grid point under CDF F.
template <typename Cdf>
std::vector<double> cell_masses(const Grid& g, Cdf F) {
  std::vector<double> out(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const double lo = k == 0 ? g.lower() : 0.5 * (g[k - 1] + g[k]);
    const double hi = k + 1 == g.size() ? g.upper() : 0.5 * (g[k] + g[k + 1]);
    out[k] = F(hi) - F(lo);
  }
  return out;
}

double total_variation(std::span<const double> a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("uniform grid points") {
  const Grid g = Grid::uniform(0, 1, 3);
  CHECK(g.size() == 3);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.5);
  CHECK(g[2] == 1.0);

  const Grid g20 = Grid::uniform(0, 1, 20);
  CHECK(g20.size() == 20);
  CHECK(g20[1] - g20[0] == doctest::Approx(1.0 / 19).epsilon(1e-12));

  const Grid g64 = Grid::uniform(1.0, 2.5, 64);
  CHECK(g64[1] - g64[0] == doctest::Approx(1.5 / 63).epsilon(1e-12));
  CHECK(g64.upper() == 2.5);
}

TEST_CASE("grid rejects bad input") {
  CHECK_THROWS_AS(Grid::uniform(1, 0, 4), Error);
  CHECK_THROWS_AS(Grid::uniform(0, 1, 1), Error);
  CHECK_THROWS_AS(Grid(std::vector<double>{0.0, 0.0, 1.0}), Error);
}

TEST_CASE("nearest point and lower-index ties") {
  const Grid g({0.0, 0.5, 1.0});
  CHECK(g.nearest(0.24).index == 0);
  CHECK(g.nearest(0.25).index == 0);
  CHECK(g.nearest(0.25).value == 0.0);
  CHECK(g.nearest(1.3).index == 2);
  CHECK(g.nearest(1.3).value == 1.0);
  CHECK(g.nearest(-4.0).index == 0);

  const Grid h = Grid::uniform(-1.3, 2.7, 37);
  for (double x = -2.0; x < 3.0; x += 0.0137) {
    const auto p = h.nearest(x);
    CHECK(h.nearest(p.value).index == p.index);
  }
}

TEST_CASE("discretize density") {
  const Grid g4 = Grid::uniform(0, 1, 4);
  const auto u = discretize_density(g4, [](double) { return 3.7; });
  for (double m : u) CHECK(m == 0.25);

  const Grid g3 = Grid::uniform(0, 1, 3);
  const auto lin = discretize_density(g3, [](double x) { return x; });
  CHECK(lin[0] == 0.0);
  CHECK(lin[1] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(lin[2] == doctest::Approx(2.0 / 3).epsilon(1e-14));

  const Grid g32 = Grid::uniform(1.0, 1.4, 32);
  const auto gauss = discretize_density(g32, [](double x) {
    return std::exp(-0.5 * std::pow((x - 1.2) / 0.1, 2));
  });
  CHECK(std::accumulate(gauss.begin(), gauss.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Symmetric about 1.2, which sits between points 15 and 16.
  for (int k = 0; k < 16; ++k) {
    CHECK(gauss[k] == doctest::Approx(gauss[31 - k]).epsilon(1e-9));
  }
  for (int k = 0; k < 15; ++k) CHECK(gauss[k] < gauss[k + 1]);

  CHECK_THROWS_AS(discretize_density(g3, [](double) { return 0.0; }), Error);
  CHECK_THROWS_AS(discretize_density(g3, [](double) { return -1.0; }), Error);
}

TEST_CASE("independent prior normalization") {
  const auto cp = uniform_prior({{0, 1}, {0, 2}});
  const auto p = discretize_prior(cp, {Grid::uniform(0, 1, 8), Grid::uniform(0, 2, 5)},
                                  {}, 1000, 1);
  CHECK(p.independent());
  for (int i = 0; i < 2; ++i) {
    double s = 0.0;
    for (double m : p.marginal(i)) s += m;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(p.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("affiliated marginal is the binned triangle") {
  const Grid g = Grid::uniform(0, 2, 16);
  const auto cp = affiliated_prior();
  const auto p = discretize_prior(cp, {g, g}, {g, g}, 1000000, 11);
  p.validate();
  CHECK(p.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  const auto expect = cell_masses(g, [](double x) {
    return x <= 1 ? 0.5 * x * x : 1.0 - 0.5 * (2 - x) * (2 - x);
  });
  CHECK(total_variation(p.marginal(0), expect) < 0.005);
  // Exchangeable agents get identical marginals.
  for (int k = 0; k < g.size(); ++k) CHECK(p.marginal(0)[k] == p.marginal(1)[k]);
}

TEST_CASE("common value marginal matches its closed form") {
  const Grid g = Grid::uniform(0, 2, 16);
  const Grid v = Grid::uniform(0, 1, 16);
  const auto cp = common_value_prior(3);
  const auto a = discretize_prior(cp, {g, g, g}, {v, v, v}, 1000000, 3);
  const auto b = discretize_prior(cp, {g, g, g}, {v, v, v}, 1000000, 4);
  CHECK(a.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  // o / 2 is a product of two uniforms: P(o <= x) = (x/2)(1 - ln(x/2)).
  const auto expect = cell_masses(g, [](double x) {
    const double y = x / 2;
    return y <= 0 ? 0.0 : y * (1 - std::log(y));
  });
  CHECK(total_variation(a.marginal(0), expect) < 0.005);
  std::vector<double> bm(b.marginal(1).begin(), b.marginal(1).end());
  CHECK(total_variation(a.marginal(1), bm) < 0.005);
  // Decreasing beyond the first (half-width) cell.
  for (int k = 1; k + 1 < g.size(); ++k) {
    CHECK(a.marginal(0)[k] > a.marginal(0)[k + 1]);
  }
}

TEST_CASE("degenerate sampler gives a single atom") {
  const Grid g = Grid::uniform(0, 1, 5);
  JointSampler s = [](Rng&, std::span<double> v, std::span<double> o) {
    v[0] = o[0] = 0.5;
    v[1] = o[1] = 0.25;
  };
  const auto p = joint_from_latent(s, {g, g}, {}, true, 1000, 2, false);
  CHECK(p.atom_count() == 1);
  CHECK(p.atom_mass(0) == doctest::Approx(1.0));
  CHECK(p.atom_obs(0)[0] == 2);
  CHECK(p.atom_obs(0)[1] == 1);
}

TEST_CASE("missing support is rejected") {
  const Grid g = Grid::uniform(0, 1, 5);
  JointSampler s = [](Rng&, std::span<double> v, std::span<double> o) {
    v[0] = o[0] = 0.5;
    v[1] = o[1] = 0.25;
  };
  CHECK_THROWS_AS(joint_from_latent(s, {g, g}, {}, true, 1000, 2, true), Error);
}

TEST_CASE("private-value binning reproduces the density discretization") {
  const Grid g = Grid::uniform(0, 1, 12);
  const auto cp = uniform_prior({{0, 1}, {0, 1}});
  const auto p = joint_from_latent(cp.sample, {g, g}, {}, true, 1000000, 5);
  // Interior cells of nearest-point binning are full width, end cells half.
  std::vector<double> expect(12, 1.0 / 11);
  expect.front() = expect.back() = 0.5 / 11;
  CHECK(total_variation(p.marginal(0), expect) < 0.005);
}

namespace {

struct LocalsStats {
  double corr = 0.0;
  double diag = 0.0;     // mass with equal local indices
  double product = 0.0;  // TV between locals' joint and product of marginals
};

LocalsStats locals(const DiscretePrior& p) {
  const int K = p.obs_grid(0).size();
  std::vector<double> joint(K * K, 0.0);
  for (std::size_t a = 0; a < p.atom_count(); ++a) {
    joint[p.atom_val(a)[0] * K + p.atom_val(a)[1]] += p.atom_mass(a);
  }
  LocalsStats st;
  double m1 = 0, m2 = 0, s11 = 0, s22 = 0, s12 = 0;
  for (int x = 0; x < K; ++x) {
    for (int y = 0; y < K; ++y) {
      const double w = joint[x * K + y];
      const double a = p.val_grid(0)[x], b = p.val_grid(1)[y];
      m1 += w * a;
      m2 += w * b;
      s11 += w * a * a;
      s22 += w * b * b;
      s12 += w * a * b;
      if (x == y) st.diag += w;
      st.product += 0.5 * std::abs(w - p.marginal(0)[x] * p.marginal(1)[y]);
    }
  }
  st.corr = (s12 - m1 * m2) / std::sqrt((s11 - m1 * m1) * (s22 - m2 * m2));
  return st;
}

}  // namespace

TEST_CASE("bernoulli weights correlation") {
  const Grid l = Grid::uniform(0, 1, 16);
  const Grid gl = Grid::uniform(0, 2, 16);
  const auto p0 = bernoulli_weights_prior(0.0, {l, l, gl}, 1000000, 7);
  const auto p1 = bernoulli_weights_prior(1.0, {l, l, gl}, 1000000, 7);
  const auto p5 = bernoulli_weights_prior(0.5, {l, l, gl}, 1000000, 7);
  CHECK(locals(p0).product < 0.01);
  CHECK(locals(p1).diag == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(locals(p5).corr == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::abs(locals(p5).corr - 0.5) < 0.02);
  for (const auto* p : {&p0, &p1, &p5}) {
    p->validate();
    CHECK(p->total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  }
}
