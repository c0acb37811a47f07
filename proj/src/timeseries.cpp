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

#include "sindy/timeseries.hpp"

#include <cmath>

#include "sindy/errors.hpp"
#include "sindy/rng.hpp"

namespace sindy {

namespace {

void shift_block(Matrix& block, const std::vector<double>& means, double sign) {
    for (std::size_t i = 0; i < block.rows(); ++i) {
        double* row = block.row(i);
        const double delta = sign * means[i];
        for (std::size_t j = 0; j < block.cols(); ++j) row[j] += delta;
    }
}

std::vector<double> row_means(const Matrix& block) {
    std::vector<double> means(block.rows(), 0.0);
    if (block.cols() == 0) return means;
    for (std::size_t i = 0; i < block.rows(); ++i) {
        const double* row = block.row(i);
        double sum = 0.0;
        for (std::size_t j = 0; j < block.cols(); ++j) sum += row[j];
        means[i] = sum / static_cast<double>(block.cols());
    }
    return means;
}

double row_stddev(const double* row, std::size_t m) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += row[j];
    const double mean = sum / static_cast<double>(m);
    double ss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double d = row[j] - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(m - 1));
}

}  // namespace

void TimeSeries::validate() const {
    const std::size_t cols = m();
    if (cols < 2) throw DataError("time series requires at least 2 samples, got " + std::to_string(cols));
    if (controls.cols() != cols || exogenous.cols() != cols)
        throw DataError("state/control/exogenous blocks disagree on sample count");
    if (!(sample_period > 0.0)) throw DataError("sample period must be positive");
    if (!states.all_finite() || !controls.all_finite() || !exogenous.all_finite())
        throw DataError("time series contains non-finite entries");
}

std::pair<TimeSeries, CenteringOffsets> center(const TimeSeries& ts) {
    CenteringOffsets offsets{row_means(ts.states), row_means(ts.controls), row_means(ts.exogenous)};
    return {apply_offsets(ts, offsets), offsets};
}

TimeSeries apply_offsets(const TimeSeries& ts, const CenteringOffsets& offsets) {
    if (offsets.state_means.size() != ts.n() || offsets.control_means.size() != ts.l() ||
        offsets.exogenous_means.size() != ts.q())
        throw DataError("centering offsets do not match series dimensions");
    TimeSeries out = ts;
    shift_block(out.states, offsets.state_means, -1.0);
    shift_block(out.controls, offsets.control_means, -1.0);
    shift_block(out.exogenous, offsets.exogenous_means, -1.0);
    return out;
}

TimeSeries remove_offsets(const TimeSeries& ts, const CenteringOffsets& offsets) {
    if (offsets.state_means.size() != ts.n() || offsets.control_means.size() != ts.l() ||
        offsets.exogenous_means.size() != ts.q())
        throw DataError("centering offsets do not match series dimensions");
    TimeSeries out = ts;
    shift_block(out.states, offsets.state_means, 1.0);
    shift_block(out.controls, offsets.control_means, 1.0);
    shift_block(out.exogenous, offsets.exogenous_means, 1.0);
    return out;
}

TimeSeries inject_noise(const TimeSeries& ts, const NoiseSpec& spec) {
    if (spec.eta < 0.0) throw ConfigError("noise fraction must be >= 0");
    if (spec.eta == 0.0) return ts;

    TimeSeries out = ts;
    Rng rng(spec.seed);
    const std::size_t m = ts.m();
    for (std::size_t i = 0; i < ts.n(); ++i) {
        const double sigma = row_stddev(ts.states.row(i), m);
        double* row = out.states.row(i);
        for (std::size_t j = 0; j < m; ++j) row[j] += spec.eta * sigma * rng.gaussian();
    }
    return out;
}

}  // namespace sindy
