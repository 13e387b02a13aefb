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

#include "distbne/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace distbne::kernels {

int thread_count() { return omp_get_max_threads(); }

namespace serial {

void contract_axis(const double* in, std::size_t A, int B, std::size_t C,
                   const double* cond, int Lp, double* out) {
  for (std::size_t a = 0; a < A; ++a) {
    for (int lp = 0; lp < Lp; ++lp) {
      for (std::size_t c = 0; c < C; ++c) {
        double acc = 0.0;
        for (int b = 0; b < B; ++b) {
          acc += in[(a * B + b) * C + c] * cond[b * Lp + lp];
        }
        out[(a * Lp + lp) * C + c] = acc;
      }
    }
  }
}

void matvec(const double* U, int rows, std::size_t cols, const double* x,
            double* y) {
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += U[i * cols + j] * x[j];
    y[i] = acc;
  }
}

void affine_rows(const double* U1, const double* U2, int L, std::size_t R,
                 const double* X, const double* Y, const double* scale,
                 const unsigned char* active, int K, double* c) {
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      if (!active[k]) {
        c[k * L + l] = 0.0;
        continue;
      }
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        s1 += U1[l * R + r] * X[k * R + r];
        s2 += U2[l * R + r] * Y[k * R + r];
      }
      c[k * L + l] = scale[k] * s1 + s2;
    }
  }
}

void full_rows(const double* U, int M, int L, std::size_t R, const double* X,
               const unsigned char* active, int K, bool per_row, double* c) {
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      double acc = 0.0;
      if (active[k]) {
        for (int m = 0; m < M; ++m) {
          const double* u = U + (static_cast<std::size_t>(per_row ? k : m) * L + l) * R;
          const double* x = X + (static_cast<std::size_t>(k) * M + m) * R;
          for (std::size_t r = 0; r < R; ++r) acc += u[r] * x[r];
        }
      }
      c[k * L + l] = acc;
    }
  }
}

}  // namespace serial

namespace omp {
namespace {

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

void contract_axis(const double* in, std::size_t A, int B, std::size_t C,
                   const double* cond, int Lp, double* out) {
  const long long na = static_cast<long long>(A);
#pragma omp parallel for schedule(static)
  for (long long a = 0; a < na; ++a) {
    double* o = out + static_cast<std::size_t>(a) * Lp * C;
    std::fill(o, o + static_cast<std::size_t>(Lp) * C, 0.0);
    for (int b = 0; b < B; ++b) {
      const double* row = in + (static_cast<std::size_t>(a) * B + b) * C;
      for (int lp = 0; lp < Lp; ++lp) {
        const double f = cond[b * Lp + lp];
        if (f == 0.0) continue;
        double* dst = o + static_cast<std::size_t>(lp) * C;
#pragma omp simd
        for (std::size_t c = 0; c < C; ++c) dst[c] += f * row[c];
      }
    }
  }
}

void matvec(const double* U, int rows, std::size_t cols, const double* x,
            double* y) {
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) y[i] = dot(U + i * cols, x, cols);
}

void affine_rows(const double* U1, const double* U2, int L, std::size_t R,
                 const double* X, const double* Y, const double* scale,
                 const unsigned char* active, int K, double* c) {
  const long long cells = static_cast<long long>(K) * L;
#pragma omp parallel for schedule(static)
  for (long long cell = 0; cell < cells; ++cell) {
    const int k = static_cast<int>(cell / L);
    const int l = static_cast<int>(cell % L);
    if (!active[k]) {
      c[cell] = 0.0;
      continue;
    }
    const double s1 = dot(U1 + l * R, X + k * R, R);
    const double s2 = dot(U2 + l * R, Y + k * R, R);
    c[cell] = scale[k] * s1 + s2;
  }
}

void full_rows(const double* U, int M, int L, std::size_t R, const double* X,
               const unsigned char* active, int K, bool per_row, double* c) {
  const long long cells = static_cast<long long>(K) * L;
#pragma omp parallel for schedule(static)
  for (long long cell = 0; cell < cells; ++cell) {
    const int k = static_cast<int>(cell / L);
    const int l = static_cast<int>(cell % L);
    double acc = 0.0;
    if (active[k]) {
      for (int m = 0; m < M; ++m) {
        const double* u =
            U + (static_cast<std::size_t>(per_row ? k : m) * L + l) * R;
        acc += dot(u, X + (static_cast<std::size_t>(k) * M + m) * R, R);
      }
    }
    c[cell] = acc;
  }
}

}  // namespace omp
}  // namespace distbne::kernels
