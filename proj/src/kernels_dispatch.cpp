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

#include "sindy/kernels.hpp"

namespace sindy::kernels {

namespace {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const char* g_backend = "scalar";

void bind_scalar() {
    dot = &scalar::dot;
    sum_sq = &scalar::sum_sq;
    max_abs = &scalar::max_abs;
    axpy = &scalar::axpy;
    scale_inplace = &scalar::scale_inplace;
    hadamard = &scalar::hadamard;
    squared_distance = &scalar::squared_distance;
    g_backend = "scalar";
}

#if defined(__x86_64__) || defined(_M_X64)
void bind_avx2() {
    dot = &avx2::dot;
    sum_sq = &avx2::sum_sq;
    max_abs = &avx2::max_abs;
    axpy = &avx2::axpy;
    scale_inplace = &avx2::scale_inplace;
    hadamard = &avx2::hadamard;
    squared_distance = &avx2::squared_distance;
    g_backend = "avx2";
}
#endif

int bind_best() {
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) {
        bind_avx2();
        return 0;
    }
#endif
    bind_scalar();
    return 0;
}

}  // namespace

DotFn dot = &scalar::dot;
SumSqFn sum_sq = &scalar::sum_sq;
MaxAbsFn max_abs = &scalar::max_abs;
AxpyFn axpy = &scalar::axpy;
ScaleFn scale_inplace = &scalar::scale_inplace;
MulFn hadamard = &scalar::hadamard;
SqDistFn squared_distance = &scalar::squared_distance;

namespace {
const int g_bound_at_startup = bind_best();
}

const char* backend_name() { return g_backend; }

void use_scalar_backend() { bind_scalar(); }

void use_best_backend() { bind_best(); }

}  // namespace sindy::kernels
