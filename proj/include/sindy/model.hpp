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

#ifndef SINDY_MODEL_HPP
#define SINDY_MODEL_HPP

#include <string>
#include <vector>

#include "sindy/library.hpp"
#include "sindy/regression.hpp"
#include "sindy/timeseries.hpp"

namespace sindy {

/// An identified discrete difference equation: library, coefficients and the
/// preprocessing metadata needed to run it on raw data.
struct SindyModel {
    LibrarySpec spec;
    CoefficientMatrix coefficients;
    std::size_t sigma_x = 0;
    std::size_t raw_state_dim = 0;
    CenteringOffsets offsets;  // zeros when centering was disabled
    double sample_period = 0.1;
    /// Per raw state channel, max |value| seen in (centered) training data;
    /// rollouts abort once a predicted state exceeds 1e6 times this envelope.
    std::vector<double> state_abs_max;
    std::vector<std::string> state_names;
    std::vector<std::string> control_names;
    std::vector<std::string> exogenous_names;

    std::size_t n_e() const { return raw_state_dim * (sigma_x + 1); }
    std::size_t support_count() const { return coefficients.support_count; }

    void validate() const;
};

}  // namespace sindy

#endif
