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

// Serial reference kernels against their OpenMP counterparts, plus whole
// gradients on the two heaviest preset shapes.

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "distbne/gradient.hpp"
#include "distbne/kernels.hpp"
#include "distbne/presets.hpp"
#include "distbne/runner.hpp"

namespace {

using namespace distbne;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

template <bool Parallel>
void BM_ContractAxis(benchmark::State& state) {
  const std::size_t A = 64;
  const int B = static_cast<int>(state.range(0));
  const std::size_t C = 64 * 64;
  const int Lp = 64;
  const auto in = random_vec(A * B * C, 1);
  const auto cond = random_vec(static_cast<std::size_t>(B) * Lp, 2);
  std::vector<double> out(A * Lp * C);
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::contract_axis(in.data(), A, B, C, cond.data(), Lp, out.data());
    } else {
      kernels::serial::contract_axis(in.data(), A, B, C, cond.data(), Lp, out.data());
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * A * B * C * Lp);
}
BENCHMARK_TEMPLATE(BM_ContractAxis, false)->Arg(16)->Arg(64);
BENCHMARK_TEMPLATE(BM_ContractAxis, true)->Arg(16)->Arg(64);

template <bool Parallel>
void BM_Matvec(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  const std::size_t cols = rows;
  const auto U = random_vec(rows * cols, 3);
  const auto x = random_vec(cols, 4);
  std::vector<double> y(rows);
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::matvec(U.data(), rows, cols, x.data(), y.data());
    } else {
      kernels::serial::matvec(U.data(), rows, cols, x.data(), y.data());
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * rows * cols);
}
BENCHMARK_TEMPLATE(BM_Matvec, false)->Arg(1024)->Arg(4096);
BENCHMARK_TEMPLATE(BM_Matvec, true)->Arg(1024)->Arg(4096);

template <bool Parallel>
void BM_AffineRows(benchmark::State& state) {
  const int K = 64, L = 64;
  const std::size_t R = static_cast<std::size_t>(state.range(0));
  const auto U1 = random_vec(L * R, 5), U2 = random_vec(L * R, 6);
  const auto X = random_vec(K * R, 7), Y = random_vec(K * R, 8);
  const auto scale = random_vec(K, 9);
  std::vector<unsigned char> active(K, 1);
  std::vector<double> c(K * L);
  for (auto _ : state) {
    if (Parallel) {
      kernels::omp::affine_rows(U1.data(), U2.data(), L, R, X.data(), Y.data(),
                                scale.data(), active.data(), K, c.data());
    } else {
      kernels::serial::affine_rows(U1.data(), U2.data(), L, R, X.data(),
                                   Y.data(), scale.data(), active.data(), K,
                                   c.data());
    }
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * K * L * R);
}
BENCHMARK_TEMPLATE(BM_AffineRows, false)->Arg(4096);
BENCHMARK_TEMPLATE(BM_AffineRows, true)->Arg(4096);

// One agent gradient of a preset, serial vs parallel engine.
void BM_PresetGradient(benchmark::State& state, const char* id, bool parallel) {
  ConfigMap m = preset_config(id);
  m["prior.samples"] = "200000";
  const Experiment exp = build_experiment(to_run_config(m));
  GradientOptions go;
  go.parallel = parallel;
  go.symmetric_fast_path = false;
  GradientEngine engine(exp.config.mech, exp.prior, exp.action_grids, go);
  const auto init =
      initial_profile(engine, exp.config.groups, InitMode::kRandom, 1);
  std::vector<const Strategy*> prof;
  for (int a = 0; a < engine.agents(); ++a) {
    const int g = exp.config.groups.empty() ? a : exp.config.groups[a];
    prof.push_back(&init[g]);
  }
  engine.gradient(0, prof);  // builds the cached tensors
  for (auto _ : state) benchmark::DoNotOptimize(engine.gradient(0, prof));
}
BENCHMARK_CAPTURE(BM_PresetGradient, llg_serial, "llg_nvcg_g05_soda1", false)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PresetGradient, llg_omp, "llg_nvcg_g05_soda1", true)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PresetGradient, common_value_serial,
                  "common_value_spsb_soma2", false)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PresetGradient, common_value_omp,
                  "common_value_spsb_soma2", true)
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
