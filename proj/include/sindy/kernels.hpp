// Copyright 2026-present the sindy-ensemble authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SINDY_KERNELS_HPP
#define SINDY_KERNELS_HPP

#include <cstddef>

// Double-precision inner-loop kernels. Scalar reference implementations are
// always available; an AVX2/FMA variant is selected at startup when the CPU
// supports it. All higher-level numerics (library evaluation, QR, rollouts,
// k-means) go through these function pointers so the two backends can be
// equivalence-tested against each other.
namespace sindy::kernels {

using DotFn = double (*)(const double*, const double*, std::size_t);
using SumSqFn = double (*)(const double*, std::size_t);
using MaxAbsFn = double (*)(const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using ScaleFn = void (*)(double*, double, std::size_t);
using MulFn = void (*)(const double*, const double*, double*, std::size_t);
using SqDistFn = double (*)(const double*, const double*, std::size_t);
using SumSqDiffFn = double (*)(const double*, const double*, std::size_t);

extern DotFn dot;                 // sum_i a[i]*b[i]
extern SumSqFn sum_sq;            // sum_i a[i]^2
extern MaxAbsFn max_abs;          // max_i |a[i]|
extern AxpyFn axpy;               // y[i] += alpha*x[i]
extern ScaleFn scale_inplace;     // x[i] *= alpha
extern MulFn hadamard;            // out[i] = a[i]*b[i]
extern SqDistFn squared_distance; // sum_i (a[i]-b[i])^2

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale_inplace(double* x, double alpha, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq(const double* a, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale_inplace(double* x, double alpha, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

// Name of the active backend: "scalar" or "avx2".
const char* backend_name();

// Force the scalar reference backend (used by equivalence tests).
void use_scalar_backend();

// Re-run CPU detection and bind the fastest available backend.
void use_best_backend();

}  // namespace sindy::kernels

#endif
