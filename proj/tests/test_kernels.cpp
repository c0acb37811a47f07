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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "sindy/kernels.hpp"
#include "sindy/rng.hpp"

using namespace sindy;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * (rng.next_double() * 2.0 - 1.0);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand computation") {
    kernels::use_scalar_backend();
    const std::vector<double> a{1.0, -2.0, 3.0, 0.5};
    const std::vector<double> b{2.0, 0.5, -1.0, 4.0};
    CHECK(kernels::dot(a.data(), b.data(), 4) == doctest::Approx(2.0 - 1.0 - 3.0 + 2.0));
    CHECK(kernels::sum_sq(a.data(), 4) == doctest::Approx(1.0 + 4.0 + 9.0 + 0.25));
    CHECK(kernels::max_abs(a.data(), 4) == 3.0);
    CHECK(kernels::squared_distance(a.data(), b.data(), 4) ==
          doctest::Approx(1.0 + 6.25 + 16.0 + 12.25));

    std::vector<double> y{1.0, 1.0, 1.0, 1.0};
    kernels::axpy(2.0, a.data(), y.data(), 4);
    CHECK(y == std::vector<double>{3.0, -3.0, 7.0, 2.0});

    std::vector<double> out(4);
    kernels::hadamard(a.data(), b.data(), out.data(), 4);
    CHECK(out == std::vector<double>{2.0, -1.0, -3.0, 2.0});

    kernels::scale_inplace(out.data(), 0.5, 4);
    CHECK(out == std::vector<double>{1.0, -0.5, -1.5, 1.0});
    kernels::use_best_backend();
}

TEST_CASE("simd backend agrees with scalar reference") {
    kernels::use_best_backend();
    const std::string backend = kernels::backend_name();
    if (backend == "scalar") return;  // nothing to compare on this host

    Rng rng(42);
    // Sizes straddle the vector width, including ragged tails.
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4},
                          std::size_t{7}, std::size_t{8}, std::size_t{9}, std::size_t{17},
                          std::size_t{64}, std::size_t{1001}}) {
        const auto a = random_vec(rng, n, 3.0);
        const auto b = random_vec(rng, n, 2.0);

        kernels::use_best_backend();
        const double dot_v = kernels::dot(a.data(), b.data(), n);
        const double ss_v = kernels::sum_sq(a.data(), n);
        const double ma_v = kernels::max_abs(a.data(), n);
        const double sq_v = kernels::squared_distance(a.data(), b.data(), n);
        std::vector<double> had_v(n), axpy_v = b;
        kernels::hadamard(a.data(), b.data(), had_v.data(), n);
        kernels::axpy(1.7, a.data(), axpy_v.data(), n);

        kernels::use_scalar_backend();
        const double dot_s = kernels::dot(a.data(), b.data(), n);
        const double ss_s = kernels::sum_sq(a.data(), n);
        const double ma_s = kernels::max_abs(a.data(), n);
        const double sq_s = kernels::squared_distance(a.data(), b.data(), n);
        std::vector<double> had_s(n), axpy_s = b;
        kernels::hadamard(a.data(), b.data(), had_s.data(), n);
        kernels::axpy(1.7, a.data(), axpy_s.data(), n);
        kernels::use_best_backend();

        CHECK(dot_v == doctest::Approx(dot_s).epsilon(1e-13));
        CHECK(ss_v == doctest::Approx(ss_s).epsilon(1e-13));
        CHECK(ma_v == ma_s);  // max of abs is rounding-free
        CHECK(sq_v == doctest::Approx(sq_s).epsilon(1e-13));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(had_v[i] == had_s[i]);  // single multiply per lane, exact
            CHECK(axpy_v[i] == doctest::Approx(axpy_s[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("accumulation over long vectors stays accurate") {
    kernels::use_best_backend();
    const std::size_t n = 100000;
    std::vector<double> ones(n, 1.0);
    CHECK(kernels::dot(ones.data(), ones.data(), n) == doctest::Approx(100000.0));
    CHECK(kernels::sum_sq(ones.data(), n) == doctest::Approx(100000.0));
    CHECK(kernels::max_abs(ones.data(), n) == 1.0);
}

TEST_CASE("backend selection is reversible") {
    kernels::use_scalar_backend();
    CHECK(std::string(kernels::backend_name()) == "scalar");
    kernels::use_best_backend();
    CHECK((std::string(kernels::backend_name()) == "scalar" ||
           std::string(kernels::backend_name()) == "avx2"));
}
