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

#include "sindy/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"
#include "sindy/linalg.hpp"

namespace sindy {

namespace {

// Column-major design matrix from the selected scaled feature rows, with
// optional ridge augmentation rows (sqrt(ridge) * I).
std::vector<double> build_design(const FeatureMatrix& theta, const std::vector<std::size_t>& support,
                                 double ridge, std::size_t m_rows) {
    const std::size_t m_s = theta.theta_T.cols();
    std::vector<double> a(m_rows * support.size(), 0.0);
    for (std::size_t j = 0; j < support.size(); ++j) {
        const std::size_t f = support[j];
        const double* row = theta.theta_T.row(f);
        double* dst = a.data() + j * m_rows;
        const double inv_scale = 1.0 / theta.column_scales[f];
        for (std::size_t s = 0; s < m_s; ++s) dst[s] = row[s] * inv_scale;
        if (ridge > 0.0) dst[m_s + j] = std::sqrt(ridge);
    }
    return a;
}

}  // namespace

CoefficientMatrix stls_fit(const FeatureMatrix& theta, const Matrix& targets,
                           const StlsConfig& cfg) {
    const std::size_t p = theta.theta_T.rows();
    const std::size_t m_s = theta.theta_T.cols();
    if (targets.cols() != m_s) throw DataError("stls_fit: targets/theta sample count mismatch");
    if (p == 0) throw DataError("stls_fit: empty feature matrix");
    if (cfg.lambda < 0.0) throw ConfigError("stls_fit: lambda must be >= 0");
    if (cfg.max_sweeps < 1) throw ConfigError("stls_fit: max_sweeps must be >= 1");
    if (!theta.theta_T.all_finite() || !targets.all_finite())
        throw DataError("stls_fit: non-finite input data");

    const std::size_t n_rows = targets.rows();
    const std::size_t m_rows = m_s + (cfg.ridge > 0.0 ? p : 0);

    CoefficientMatrix out;
    out.xi = Matrix(n_rows, p);
    out.library_fingerprint = theta.library_fingerprint;

    // Initial full-support solve, shared across target rows.
    std::vector<std::size_t> full(p);
    std::iota(full.begin(), full.end(), std::size_t{0});
    const LeastSquares full_solver(build_design(theta, full, cfg.ridge, m_rows), m_rows, p);
    if (full_solver.rank_deficient()) out.diagnostics.rank_warning = true;

    std::vector<double> rhs(m_rows, 0.0);
    auto load_rhs = [&](std::size_t i) {
        const double* t = targets.row(i);
        for (std::size_t s = 0; s < m_s; ++s) rhs[s] = t[s];
        for (std::size_t s = m_s; s < m_rows; ++s) rhs[s] = 0.0;
    };

    for (std::size_t i = 0; i < n_rows; ++i) {
        load_rhs(i);
        std::vector<std::size_t> support = full;
        std::vector<double> coef = full_solver.solve(rhs);  // scaled units
        int sweeps = 0;

        while (sweeps < cfg.max_sweeps) {
            std::vector<std::size_t> kept;
            std::vector<double> kept_coef;
            for (std::size_t j = 0; j < support.size(); ++j) {
                if (std::fabs(coef[j]) >= cfg.lambda) {
                    kept.push_back(support[j]);
                    kept_coef.push_back(coef[j]);
                }
            }
            if (kept.size() == support.size()) break;  // support stable
            ++sweeps;
            support = std::move(kept);
            if (support.empty()) {
                coef.clear();
                break;
            }
            const std::size_t rows = m_s + (cfg.ridge > 0.0 ? support.size() : 0);
            const LeastSquares solver(build_design(theta, support, cfg.ridge, rows), rows,
                                      support.size());
            if (solver.rank_deficient()) out.diagnostics.rank_warning = true;
            if (cfg.ridge > 0.0) {
                std::vector<double> sub_rhs(rows, 0.0);
                const double* t = targets.row(i);
                for (std::size_t s = 0; s < m_s; ++s) sub_rhs[s] = t[s];
                coef = solver.solve(sub_rhs);
            } else {
                coef = solver.solve(std::span<const double>(rhs.data(), m_s));
            }
        }
        out.diagnostics.sweeps_used = std::max(out.diagnostics.sweeps_used, sweeps);

        if (support.empty()) {
            out.diagnostics.empty_rows.push_back(i);
            continue;  // row stays all-zero
        }
        double* xi_row = out.xi.row(i);
        for (std::size_t j = 0; j < support.size(); ++j)
            xi_row[support[j]] = coef[j] / theta.column_scales[support[j]];
    }

    out.support_count = CoefficientMatrix::count_nonzeros(out.xi);
    return out;
}

std::vector<double> one_step_residual(const CoefficientMatrix& coeffs, const FeatureMatrix& theta,
                                      const Matrix& targets) {
    const std::size_t p = theta.theta_T.rows();
    const std::size_t m_s = theta.theta_T.cols();
    if (coeffs.xi.cols() != p) throw DataError("one_step_residual: coefficient/feature mismatch");
    if (coeffs.xi.rows() != targets.rows() || targets.cols() != m_s)
        throw DataError("one_step_residual: target dimensions mismatch");

    std::vector<double> rss(targets.rows(), 0.0);
    std::vector<double> pred(m_s);
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        std::fill(pred.begin(), pred.end(), 0.0);
        const double* xi_row = coeffs.xi.row(i);
        for (std::size_t f = 0; f < p; ++f)
            if (xi_row[f] != 0.0) kernels::axpy(xi_row[f], theta.theta_T.row(f), pred.data(), m_s);
        const double* t = targets.row(i);
        double sum = 0.0;
        for (std::size_t s = 0; s < m_s; ++s) {
            const double d = t[s] - pred[s];
            sum += d * d;
        }
        rss[i] = sum;
    }
    return rss;
}

}  // namespace sindy
