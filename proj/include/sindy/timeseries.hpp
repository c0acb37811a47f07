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

#ifndef SINDY_TIMESERIES_HPP
#define SINDY_TIMESERIES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sindy/matrix.hpp"

namespace sindy {

/// Aligned multichannel record: states x(t), control inputs u(t) and
/// exogenous inputs d(t), one column per sample.
struct TimeSeries {
    Matrix states;     // n x m
    Matrix controls;   // l x m
    Matrix exogenous;  // q x m
    double sample_period = 0.1;
    std::vector<std::string> state_names;
    std::vector<std::string> control_names;
    std::vector<std::string> exogenous_names;

    std::size_t n() const { return states.rows(); }
    std::size_t l() const { return controls.rows(); }
    std::size_t q() const { return exogenous.rows(); }
    std::size_t m() const { return states.cols(); }

    /// Enforces the construction invariants: equal column counts, m >= 2,
    /// positive sample period, all entries finite. Throws DataError.
    void validate() const;
};

/// Per-channel sample means subtracted by center(); stored in exported
/// models so predictions can be reported in original units.
struct CenteringOffsets {
    std::vector<double> state_means;
    std::vector<double> control_means;
    std::vector<double> exogenous_means;

    static CenteringOffsets zeros(std::size_t n, std::size_t l, std::size_t q) {
        return {std::vector<double>(n, 0.0), std::vector<double>(l, 0.0),
                std::vector<double>(q, 0.0)};
    }
};

struct NoiseSpec {
    double eta = 0.0;  // noise percentage as a fraction; 0 disables injection
    std::uint64_t seed = 0;
};

/// Subtract per-channel sample means from every block.
std::pair<TimeSeries, CenteringOffsets> center(const TimeSeries& ts);

/// Subtract previously computed offsets (used when evaluating new data
/// against a stored model).
TimeSeries apply_offsets(const TimeSeries& ts, const CenteringOffsets& offsets);

/// Add the offsets back; inverse of apply_offsets.
TimeSeries remove_offsets(const TimeSeries& ts, const CenteringOffsets& offsets);

/// Additive Gaussian perturbation of the state block, scaled per channel by
/// the channel's sample standard deviation. Controls and exogenous inputs
/// pass through untouched. Deterministic per spec.seed.
TimeSeries inject_noise(const TimeSeries& ts, const NoiseSpec& spec);

}  // namespace sindy

#endif
