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

#ifndef SINDY_SNAPSHOT_HPP
#define SINDY_SNAPSHOT_HPP

#include <cstddef>

#include "sindy/matrix.hpp"
#include "sindy/timeseries.hpp"

namespace sindy {

/// Regression-ready snapshot matrices. Column j of X stacks the delay-embedded
/// state at time j+sigma (newest block first); X_plus is the same embedding
/// shifted forward one sample. Gamma and D carry the inputs at the time of the
/// newest block.
struct SnapshotSet {
    Matrix X;       // n_e x m_s
    Matrix X_plus;  // n_e x m_s
    Matrix Gamma;   // l x m_s
    Matrix D;       // q x m_s
    std::size_t delay_order = 0;
    std::size_t raw_state_dim = 0;

    std::size_t n_e() const { return X.rows(); }
    std::size_t m_s() const { return X.cols(); }
};

/// Build snapshot matrices with state delay order sigma_x.
/// Requires m >= n*(sigma_x+1) + sigma_x + 1 so that m_s >= n_e.
SnapshotSet embed_delay(const TimeSeries& ts, std::size_t sigma_x);

}  // namespace sindy

#endif
