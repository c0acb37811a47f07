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

#ifndef SINDY_REGRESSION_HPP
#define SINDY_REGRESSION_HPP

#include <cstdint>
#include <vector>

#include "sindy/library.hpp"
#include "sindy/matrix.hpp"

namespace sindy {

struct StlsConfig {
    double lambda = 30.0;  // hard threshold on scaled coefficients
    int max_sweeps = 10;
    double ridge = 0.0;  // optional Tikhonov term for ill-conditioned bags
};

struct StlsDiagnostics {
    bool rank_warning = false;               // some sub-solve was rank deficient
    std::vector<std::size_t> empty_rows;     // rows thresholded to all-zero
    int sweeps_used = 0;                     // max over target rows
};

/// Sparse coefficient matrix Xi mapping library features to next states.
struct CoefficientMatrix {
    Matrix xi;  // n_e x p, raw-feature units
    std::size_t support_count = 0;
    std::uint64_t library_fingerprint = 0;
    StlsDiagnostics diagnostics;

    static std::size_t count_nonzeros(const Matrix& m) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (m(i, j) != 0.0) ++n;
        return n;
    }
};

/// Sequentially thresholded least squares, row by row. Features are
/// normalized to unit max-abs before solving, the threshold acts on the
/// scaled coefficients, and the result is unscaled back to raw units.
CoefficientMatrix stls_fit(const FeatureMatrix& theta, const Matrix& targets,
                           const StlsConfig& cfg);

/// Per-target-row sum of squared residuals of coeffs on the given snapshots.
std::vector<double> one_step_residual(const CoefficientMatrix& coeffs, const FeatureMatrix& theta,
                                      const Matrix& targets);

}  // namespace sindy

#endif
