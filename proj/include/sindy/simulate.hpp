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

#ifndef SINDY_SIMULATE_HPP
#define SINDY_SIMULATE_HPP

#include <optional>
#include <span>
#include <vector>

#include "sindy/matrix.hpp"
#include "sindy/model.hpp"
#include "sindy/snapshot.hpp"

namespace sindy {

struct PredictionReport {
    Matrix predicted;  // n x horizon, same units as the provided data
    std::vector<double> r2_per_output;
    bool diverged = false;
    std::optional<std::size_t> diverged_at;

    double min_r2() const;
};

/// Coefficient of determination (1 - SSR/SST). Arbitrarily negative for bad
/// fits; throws DataError when the truth is constant.
double r_squared(std::span<const double> truth, std::span<const double> prediction);

/// Predict x(t+1) from the measured embedded state at every snapshot column.
/// The snapshot set must be in the model's (centered) frame; R2 is scored on
/// the raw-state block against X_plus.
PredictionReport predict_one_step(const SindyModel& model, const SnapshotSet& snap);

/// Closed-loop rollout from a measured initial window of sigma_x+1 raw states
/// (oldest column first), feeding predictions back as state. Inputs and the
/// optional truth are in the model's frame; horizon = columns of controls.
/// The rollout halts early once any state channel leaves the divergence
/// envelope; the truncated trajectory is padded with its clipped last value
/// so that R2 stays defined (and heavily penalized).
PredictionReport predict_multi_step(const SindyModel& model, const Matrix& initial_window,
                                    const Matrix& controls, const Matrix& exogenous,
                                    const Matrix* truth = nullptr);

/// Multi-step validation scenario: everything predict_multi_step needs plus
/// the recorded truth to score against.
struct ValidationScenario {
    Matrix initial_window;  // n x (sigma_x+1), oldest first
    Matrix controls;        // l x H
    Matrix exogenous;       // q x H
    Matrix truth;           // n x H
};

/// Slice a record into the scenario that replays it: window from the first
/// sigma_x+1 samples, then drive with the recorded inputs.
ValidationScenario scenario_from_series(const TimeSeries& ts, std::size_t sigma_x);

PredictionReport score_multi_step(const SindyModel& model, const ValidationScenario& scenario);

}  // namespace sindy

#endif
