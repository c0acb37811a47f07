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

#include "sindy/snapshot.hpp"

#include <algorithm>
#include <string>

#include "sindy/errors.hpp"

namespace sindy {

SnapshotSet embed_delay(const TimeSeries& ts, std::size_t sigma_x) {
    const std::size_t n = ts.n();
    const std::size_t m = ts.m();
    const std::size_t n_e = n * (sigma_x + 1);
    if (m < sigma_x + 2 || m < n_e + sigma_x + 1)
        throw DataError("insufficient data for delay order " + std::to_string(sigma_x) +
                        ": need at least " + std::to_string(std::max(sigma_x + 2, n_e + sigma_x + 1)) +
                        " samples, got " + std::to_string(m));

    const std::size_t m_s = m - sigma_x - 1;
    SnapshotSet snap;
    snap.delay_order = sigma_x;
    snap.raw_state_dim = n;
    snap.X = Matrix(n_e, m_s);
    snap.X_plus = Matrix(n_e, m_s);
    snap.Gamma = Matrix(ts.l(), m_s);
    snap.D = Matrix(ts.q(), m_s);

    // Newest-first stacking: block b of column j is x(j + sigma_x - b).
    for (std::size_t b = 0; b <= sigma_x; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* src = ts.states.row(i);
            double* dst = snap.X.row(b * n + i);
            double* dst_plus = snap.X_plus.row(b * n + i);
            for (std::size_t j = 0; j < m_s; ++j) {
                dst[j] = src[j + sigma_x - b];
                dst_plus[j] = src[j + sigma_x - b + 1];
            }
        }
    }
    for (std::size_t i = 0; i < ts.l(); ++i) {
        const double* src = ts.controls.row(i);
        double* dst = snap.Gamma.row(i);
        for (std::size_t j = 0; j < m_s; ++j) dst[j] = src[j + sigma_x];
    }
    for (std::size_t i = 0; i < ts.q(); ++i) {
        const double* src = ts.exogenous.row(i);
        double* dst = snap.D.row(i);
        for (std::size_t j = 0; j < m_s; ++j) dst[j] = src[j + sigma_x];
    }
    return snap;
}

}  // namespace sindy
