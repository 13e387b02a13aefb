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

#ifndef DISTBNE_KERNELS_HPP_
#define DISTBNE_KERNELS_HPP_

#include <cstddef>

namespace distbne::kernels {

// Dense building blocks of the gradient. Every kernel exists twice: a plain
// serial reference and an OpenMP version that splits the outer output cells
// across threads and vectorizes the inner reductions. Both agree to rounding
// (the vector reductions reassociate sums); each is deterministic on its own.
//
// Layouts are row-major. cond is B x Lp.

namespace serial {

// out[a, lp, c] = sum_b in[a, b, c] * cond[b, lp]
void contract_axis(const double* in, std::size_t A, int B, std::size_t C,
                   const double* cond, int Lp, double* out);

// y = U x, U is rows x cols.
void matvec(const double* U, int rows, std::size_t cols, const double* x,
            double* y);

// c[k, l] = scale[k] * <U1[l], X[k]> + <U2[l], Y[k]> for rows with
// active[k] != 0, else 0. U1, U2 are L x R; X, Y are K x R.
void affine_rows(const double* U1, const double* U2, int L, std::size_t R,
                 const double* X, const double* Y, const double* scale,
                 const unsigned char* active, int K, double* c);

// c[k, l] = sum_m <U[m, l], X[k, m]> over m < M. U is M x L x R, X is
// K x M x R. With per_row set, U is indexed by k instead of m and M = 1
// with X K x R.
void full_rows(const double* U, int M, int L, std::size_t R, const double* X,
               const unsigned char* active, int K, bool per_row, double* c);

}  // namespace serial

namespace omp {

void contract_axis(const double* in, std::size_t A, int B, std::size_t C,
                   const double* cond, int Lp, double* out);
void matvec(const double* U, int rows, std::size_t cols, const double* x,
            double* y);
void affine_rows(const double* U1, const double* U2, int L, std::size_t R,
                 const double* X, const double* Y, const double* scale,
                 const unsigned char* active, int K, double* c);
void full_rows(const double* U, int M, int L, std::size_t R, const double* X,
               const unsigned char* active, int K, bool per_row, double* c);

}  // namespace omp

// Number of OpenMP threads the parallel kernels will use.
int thread_count();

}  // namespace distbne::kernels

#endif  // DISTBNE_KERNELS_HPP_
