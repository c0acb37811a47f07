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
#include <numbers>
#include <set>
#include <vector>

#include "sindy/errors.hpp"
#include "sindy/library.hpp"
#include "sindy/rng.hpp"

using namespace sindy;

namespace {

SnapshotSet snapshot_from(const Matrix& x, const Matrix& gamma, const Matrix& d) {
    SnapshotSet snap;
    snap.X = x;
    snap.X_plus = x;
    snap.Gamma = gamma;
    snap.D = d;
    snap.raw_state_dim = x.rows();
    return snap;
}

}  // namespace

TEST_CASE("smallest quadratic spec") {
    const LibrarySpec spec = build_polynomial_spec(1, 0, 0, 2);
    CHECK(spec.p() == 3);
    CHECK(spec.terms[0].kind == TermKind::constant);
    CHECK(spec.terms[1].kind == TermKind::linear);
    CHECK(spec.terms[2].kind == TermKind::product);
    CHECK(spec.terms[2].operands[0] == spec.terms[2].operands[1]);
}

TEST_CASE("term counts match the combinatorial law") {
    CHECK(build_polynomial_spec(2, 1, 0, 2).p() == 10);
    CHECK(build_polynomial_spec(4, 2, 2, 2).p() == 45);  // 1 + 8 + 36
    // p = 1 + v + v(v+1)/2 for degree-2, sine-free specs.
    for (std::size_t n_e = 1; n_e <= 5; ++n_e)
        for (std::size_t l = 0; l <= 3; ++l)
            for (std::size_t q = 0; q <= 3; ++q) {
                const std::size_t v = n_e + l + q;
                CHECK(build_polynomial_spec(n_e, l, q, 2).p() == 1 + v + v * (v + 1) / 2);
                CHECK(build_polynomial_spec(n_e, l, q, 1).p() == 1 + v);
            }
}

TEST_CASE("no duplicate terms under canonical ordering") {
    const LibrarySpec spec = build_polynomial_spec(3, 2, 1, 2, true);
    std::set<std::pair<int, std::vector<std::pair<int, std::size_t>>>> seen;
    for (const auto& t : spec.terms) {
        std::vector<std::pair<int, std::size_t>> ops;
        for (const auto& op : t.operands) ops.emplace_back(static_cast<int>(op.block), op.channel);
        CHECK(seen.insert({static_cast<int>(t.kind), ops}).second);
    }
}

TEST_CASE("unsupported degree is rejected") {
    CHECK_THROWS_AS(build_polynomial_spec(2, 1, 1, 3), ConfigError);
    CHECK_THROWS_AS(build_polynomial_spec(2, 1, 1, 0), ConfigError);
    CHECK_THROWS_AS(build_polynomial_spec(0, 0, 0, 2), ConfigError);
}

TEST_CASE("rebuilding the spec reproduces the fingerprint") {
    const LibrarySpec a = build_polynomial_spec(4, 2, 2, 2);
    const LibrarySpec b = build_polynomial_spec(4, 2, 2, 2);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.terms == b.terms);
    const LibrarySpec c = build_polynomial_spec(4, 2, 2, 1);
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("constant term evaluates to an all-ones row") {
    const LibrarySpec spec = build_polynomial_spec(1, 1, 0, 2);
    const auto snap =
        snapshot_from(Matrix::from_rows({{2.0, 3.0}}), Matrix::from_rows({{5.0, 7.0}}), Matrix(0, 2));
    const FeatureMatrix fm = evaluate_library(spec, snap);
    CHECK(fm.theta_T(0, 0) == 1.0);
    CHECK(fm.theta_T(0, 1) == 1.0);
}

TEST_CASE("cross product row is the hand product") {
    const LibrarySpec spec = build_polynomial_spec(1, 1, 0, 2);
    const auto snap =
        snapshot_from(Matrix::from_rows({{2.0, 3.0}}), Matrix::from_rows({{5.0, 7.0}}), Matrix(0, 2));
    const FeatureMatrix fm = evaluate_library(spec, snap);
    // Find the x1*u1 term.
    std::size_t idx = spec.p();
    for (std::size_t i = 0; i < spec.p(); ++i) {
        const auto& t = spec.terms[i];
        if (t.kind == TermKind::product && t.operands[0].block == Block::state &&
            t.operands[1].block == Block::control)
            idx = i;
    }
    REQUIRE(idx < spec.p());
    CHECK(fm.theta_T(idx, 0) == 10.0);
    CHECK(fm.theta_T(idx, 1) == 21.0);
}

TEST_CASE("sine of a linear term") {
    const LibrarySpec spec = build_polynomial_spec(1, 0, 0, 1, true);
    const auto snap = snapshot_from(Matrix::from_rows({{0.0, std::numbers::pi / 2.0}}),
                                    Matrix(0, 2), Matrix(0, 2));
    const FeatureMatrix fm = evaluate_library(spec, snap);
    REQUIRE(spec.terms[2].kind == TermKind::sin_linear);
    CHECK(fm.theta_T(2, 0) == doctest::Approx(0.0));
    CHECK(fm.theta_T(2, 1) == doctest::Approx(1.0));
}

TEST_CASE("column scales are positive and default to 1 for zero rows") {
    const LibrarySpec spec = build_polynomial_spec(1, 1, 0, 2);
    const auto snap =
        snapshot_from(Matrix::from_rows({{0.0, 0.0}}), Matrix::from_rows({{5.0, -7.0}}), Matrix(0, 2));
    const FeatureMatrix fm = evaluate_library(spec, snap);
    for (std::size_t i = 0; i < spec.p(); ++i) CHECK(fm.column_scales[i] > 0.0);
    CHECK(fm.column_scales[1] == 1.0);  // zero state row falls back to 1
    CHECK(fm.column_scales[2] == 7.0);  // control row max-abs
}

TEST_CASE("evaluate_row equals the matching library column bit for bit") {
    const LibrarySpec spec = build_polynomial_spec(3, 2, 1, 2, true);
    Rng rng(21);
    const std::size_t m_s = 13;
    Matrix x(3, m_s), g(2, m_s), d(1, m_s);
    for (std::size_t j = 0; j < m_s; ++j) {
        for (std::size_t i = 0; i < 3; ++i) x(i, j) = rng.uniform(-4.0, 4.0);
        for (std::size_t i = 0; i < 2; ++i) g(i, j) = rng.uniform(-2.0, 2.0);
        d(0, j) = rng.uniform(-1.0, 1.0);
    }
    const auto snap = snapshot_from(x, g, d);
    const FeatureMatrix fm = evaluate_library(spec, snap);

    std::vector<double> xv(3), uv(2), dv(1), row(spec.p());
    for (std::size_t j = 0; j < m_s; ++j) {
        for (std::size_t i = 0; i < 3; ++i) xv[i] = x(i, j);
        for (std::size_t i = 0; i < 2; ++i) uv[i] = g(i, j);
        dv[0] = d(0, j);
        evaluate_row(spec, xv, uv, dv, row);
        for (std::size_t i = 0; i < spec.p(); ++i) CHECK(row[i] == fm.theta_T(i, j));
    }
}

TEST_CASE("zero inputs light up only the constant term") {
    const LibrarySpec spec = build_polynomial_spec(2, 1, 1, 2);
    std::vector<double> x(2, 0.0), u(1, 0.0), d(1, 0.0), row(spec.p());
    evaluate_row(spec, x, u, d, row);
    CHECK(row[0] == 1.0);
    for (std::size_t i = 1; i < spec.p(); ++i) CHECK(row[i] == 0.0);
}

TEST_CASE("constant-only spec always evaluates to [1]") {
    LibrarySpec spec;
    spec.n_e = 1;
    spec.terms = {{TermKind::constant, {}}};
    std::vector<double> x{123.0}, row(1);
    evaluate_row(spec, x, {}, {}, row);
    CHECK(row[0] == 1.0);
}

TEST_CASE("dimension mismatches are rejected") {
    const LibrarySpec spec = build_polynomial_spec(2, 1, 0, 2);
    std::vector<double> x(2), u(1), d(0), row(spec.p());
    CHECK_THROWS_AS(evaluate_row(spec, std::vector<double>(3), u, d, row), DataError);
    CHECK_THROWS_AS(evaluate_row(spec, x, std::vector<double>(2), d, row), DataError);
    std::vector<double> short_row(spec.p() - 1);
    CHECK_THROWS_AS(evaluate_row(spec, x, u, d, short_row), DataError);

    // Spec/data mismatch on evaluation over snapshots.
    const auto snap = snapshot_from(Matrix(1, 4), Matrix(1, 4), Matrix(0, 4));
    CHECK_THROWS_AS(evaluate_library(spec, snap), DataError);
}

TEST_CASE("restrict_features copies the selected rows and scales") {
    const LibrarySpec spec = build_polynomial_spec(2, 1, 0, 2);
    Rng rng(33);
    Matrix x(2, 9), g(1, 9);
    for (std::size_t j = 0; j < 9; ++j) {
        x(0, j) = rng.gaussian();
        x(1, j) = rng.gaussian();
        g(0, j) = rng.gaussian();
    }
    const FeatureMatrix fm = evaluate_library(spec, snapshot_from(x, g, Matrix(0, 9)));
    const std::vector<std::size_t> keep{0, 3, 7};
    const FeatureMatrix sub = restrict_features(fm, keep);
    CHECK(sub.theta_T.rows() == 3);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        CHECK(sub.column_scales[i] == fm.column_scales[keep[i]]);
        for (std::size_t j = 0; j < 9; ++j) CHECK(sub.theta_T(i, j) == fm.theta_T(keep[i], j));
    }
    CHECK_THROWS_AS(restrict_features(fm, {fm.theta_T.rows()}), DataError);
}
