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

#include "sindy/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"

namespace sindy {

namespace {

constexpr double kDivergenceFactor = 1e6;

double divergence_bound(const SindyModel& model, std::size_t channel) {
    double envelope = 1.0;
    if (channel < model.state_abs_max.size() && model.state_abs_max[channel] > 0.0)
        envelope = model.state_abs_max[channel];
    return kDivergenceFactor * envelope;
}

double clip_to(double v, double bound) {
    if (std::isnan(v)) return bound;
    return std::clamp(v, -bound, bound);
}

}  // namespace

double PredictionReport::min_r2() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : r2_per_output) m = std::min(m, v);
    return m;
}

double r_squared(std::span<const double> truth, std::span<const double> prediction) {
    if (truth.size() != prediction.size()) throw DataError("r_squared: length mismatch");
    if (truth.size() < 2) throw DataError("r_squared: need at least 2 samples");

    double mean = 0.0;
    for (double v : truth) mean += v;
    mean /= static_cast<double>(truth.size());

    double ssr = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = truth[i] - prediction[i];
        const double d = truth[i] - mean;
        ssr += e * e;
        sst += d * d;
    }
    if (sst == 0.0) throw DataError("r_squared: truth is constant, R^2 undefined");
    return 1.0 - ssr / sst;
}

void SindyModel::validate() const {
    spec.validate();
    if (coefficients.xi.rows() != n_e())
        throw DataError("model: coefficient rows do not equal n*(sigma_x+1)");
    if (coefficients.xi.cols() != spec.p())
        throw DataError("model: coefficient columns do not equal library size");
    if (coefficients.library_fingerprint != spec.fingerprint())
        throw DataError("model: coefficient matrix was fit against a different library");
    if (offsets.state_means.size() != raw_state_dim)
        throw DataError("model: centering offsets do not match state dimension");
}

PredictionReport predict_one_step(const SindyModel& model, const SnapshotSet& snap) {
    model.validate();
    if (snap.n_e() != model.n_e() || snap.delay_order != model.sigma_x)
        throw DataError("predict_one_step: snapshot embedding does not match model");
    if (snap.Gamma.rows() != model.spec.l || snap.D.rows() != model.spec.q)
        throw DataError("predict_one_step: snapshot input dimensions do not match model");

    const std::size_t n = model.raw_state_dim;
    const std::size_t m_s = snap.m_s();
    const std::size_t p = model.spec.p();

    PredictionReport report;
    report.predicted = Matrix(n, m_s);

    std::vector<double> x_m(snap.n_e());
    std::vector<double> u(model.spec.l);
    std::vector<double> d(model.spec.q);
    std::vector<double> phi(p);

    for (std::size_t j = 0; j < m_s; ++j) {
        for (std::size_t i = 0; i < snap.n_e(); ++i) x_m[i] = snap.X(i, j);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = snap.Gamma(i, j);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = snap.D(i, j);
        evaluate_row(model.spec, x_m, u, d, phi);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = kernels::dot(model.coefficients.xi.row(i), phi.data(), p);
            if (!std::isfinite(v)) {
                report.diverged = true;
                if (!report.diverged_at) report.diverged_at = j;
                report.predicted(i, j) = clip_to(v, divergence_bound(model, i));
            } else {
                report.predicted(i, j) = v;
            }
        }
    }

    report.r2_per_output.resize(n);
    std::vector<double> truth_row(m_s);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m_s; ++j) truth_row[j] = snap.X_plus(i, j);
        report.r2_per_output[i] =
            r_squared(truth_row, std::span<const double>(report.predicted.row(i), m_s));
    }
    return report;
}

PredictionReport predict_multi_step(const SindyModel& model, const Matrix& initial_window,
                                    const Matrix& controls, const Matrix& exogenous,
                                    const Matrix* truth) {
    model.validate();
    const std::size_t n = model.raw_state_dim;
    const std::size_t sigma = model.sigma_x;
    if (initial_window.rows() != n || initial_window.cols() != sigma + 1)
        throw DataError("predict_multi_step: initial window must be n x (sigma_x+1)");
    const std::size_t horizon = controls.cols();
    if (horizon < 1) throw DataError("predict_multi_step: horizon must be >= 1");
    if (controls.rows() != model.spec.l || exogenous.rows() != model.spec.q)
        throw DataError("predict_multi_step: input dimensions do not match model");
    if (exogenous.cols() < horizon)
        throw DataError("predict_multi_step: exogenous record shorter than horizon");
    if (truth && (truth->rows() != n || truth->cols() < horizon))
        throw DataError("predict_multi_step: truth dimensions do not match horizon");

    const std::size_t n_e = model.n_e();
    const std::size_t p = model.spec.p();

    PredictionReport report;
    report.predicted = Matrix(n, horizon);

    // Embedded state, newest block first: window column sigma is x(0).
    std::vector<double> x_m(n_e);
    for (std::size_t b = 0; b <= sigma; ++b)
        for (std::size_t i = 0; i < n; ++i) x_m[b * n + i] = initial_window(i, sigma - b);

    std::vector<double> u(model.spec.l);
    std::vector<double> d(model.spec.q);
    std::vector<double> phi(p);
    std::vector<double> x_next(n_e);

    std::size_t t = 0;
    for (; t < horizon; ++t) {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = controls(i, t);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = exogenous(i, t);
        evaluate_row(model.spec, x_m, u, d, phi);
        for (std::size_t i = 0; i < n_e; ++i)
            x_next[i] = kernels::dot(model.coefficients.xi.row(i), phi.data(), p);

        bool out_of_bounds = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = x_next[i];
            if (!std::isfinite(v) || std::fabs(v) > divergence_bound(model, i)) out_of_bounds = true;
            report.predicted(i, t) = v;
        }
        if (out_of_bounds) {
            report.diverged = true;
            report.diverged_at = t;
            for (std::size_t i = 0; i < n; ++i)
                report.predicted(i, t) = clip_to(report.predicted(i, t), divergence_bound(model, i));
            ++t;
            break;
        }
        x_m.swap(x_next);
    }
    // Pad an aborted rollout with its clipped last value so R2 is defined.
    for (; t < horizon; ++t)
        for (std::size_t i = 0; i < n; ++i) report.predicted(i, t) = report.predicted(i, t - 1);

    if (truth) {
        report.r2_per_output.resize(n);
        std::vector<double> truth_row(horizon);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < horizon; ++j) truth_row[j] = (*truth)(i, j);
            report.r2_per_output[i] =
                r_squared(truth_row, std::span<const double>(report.predicted.row(i), horizon));
        }
    }
    return report;
}

ValidationScenario scenario_from_series(const TimeSeries& ts, std::size_t sigma_x) {
    if (ts.m() < sigma_x + 2)
        throw DataError("scenario: need at least sigma_x+2 samples, got " + std::to_string(ts.m()));
    const std::size_t horizon = ts.m() - sigma_x - 1;
    ValidationScenario sc;
    sc.initial_window = Matrix(ts.n(), sigma_x + 1);
    for (std::size_t i = 0; i < ts.n(); ++i)
        for (std::size_t j = 0; j <= sigma_x; ++j) sc.initial_window(i, j) = ts.states(i, j);
    sc.controls = Matrix(ts.l(), horizon);
    sc.exogenous = Matrix(ts.q(), horizon);
    sc.truth = Matrix(ts.n(), horizon);
    for (std::size_t t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < ts.l(); ++i) sc.controls(i, t) = ts.controls(i, t + sigma_x);
        for (std::size_t i = 0; i < ts.q(); ++i) sc.exogenous(i, t) = ts.exogenous(i, t + sigma_x);
        for (std::size_t i = 0; i < ts.n(); ++i) sc.truth(i, t) = ts.states(i, t + sigma_x + 1);
    }
    return sc;
}

PredictionReport score_multi_step(const SindyModel& model, const ValidationScenario& scenario) {
    return predict_multi_step(model, scenario.initial_window, scenario.controls, scenario.exogenous,
                              &scenario.truth);
}

}  // namespace sindy
