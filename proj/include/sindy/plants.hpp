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

#ifndef SINDY_PLANTS_HPP
#define SINDY_PLANTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "sindy/library.hpp"
#include "sindy/regression.hpp"
#include "sindy/timeseries.hpp"

namespace sindy::plants {

/// One additive term of a plant's update rule: a library-style feature over
/// the plant's (embedded) state, control and exogenous channels, times a
/// published coefficient.
struct PlantTerm {
    FeatureTerm term;
    double coefficient = 0.0;
};

/// Closed-form discrete-time plant with known sparse ground truth.
struct PlantSpec {
    std::string name;
    std::size_t state_dim = 0;
    std::size_t control_dim = 0;
    std::size_t exog_dim = 0;
    std::size_t memory = 0;  // delay depth of the update rule (0 = first order)
    std::vector<std::vector<PlantTerm>> rows;  // per raw state channel

    std::vector<std::pair<double, double>> state_ranges;
    std::vector<std::pair<double, double>> control_ranges;
    std::vector<std::pair<double, double>> exog_ranges;
    std::vector<std::size_t> control_hold;
    std::vector<std::size_t> exog_hold;
    std::vector<double> x0;
    double sample_period = 0.1;
    std::vector<std::string> state_names;
    std::vector<std::string> control_names;
    std::vector<std::string> exog_names;
};

const PlantSpec& get_plant(const std::string& name);
std::vector<std::string> plant_names();

/// Exact deterministic rollout of the update rule. The returned series has
/// one sample per control column; the first memory+1 samples replay the
/// initial window. If warning is non-null and x0 leaves the operating range,
/// a note is written there (the rollout still runs).
TimeSeries simulate_plant(const PlantSpec& spec, const Matrix& initial_window,
                          const Matrix& controls, const Matrix& exogenous,
                          std::string* warning = nullptr);

enum class ExcitationKind { steps, filtered_random };

/// Single-channel excitation record of length horizon, deterministic per seed.
std::vector<double> excitation_signal(ExcitationKind kind, double lo, double hi,
                                      std::size_t hold_samples, std::uint64_t seed,
                                      std::size_t horizon);

/// Multi-level step excitation for every control and exogenous channel using
/// the plant's shipped ranges and hold lengths, seeded per channel.
std::pair<Matrix, Matrix> default_excitation(const PlantSpec& spec, std::uint64_t seed,
                                             std::size_t horizon);

/// Convenience: simulate the plant from its shipped initial state under
/// default excitation.
TimeSeries generate_dataset(const PlantSpec& spec, std::uint64_t seed, std::size_t horizon,
                            std::string* warning = nullptr);

/// Project the plant's true update rule onto a delay-embedded library in the
/// centered frame defined by offsets (pass zero offsets for the raw frame).
/// Shift rows for the delayed blocks are included. Throws DataError if some
/// required term is missing from the library, so this doubles as the
/// ground-truth identifiability check.
CoefficientMatrix true_embedded_coefficients(const PlantSpec& spec, const LibrarySpec& lib,
                                             const CenteringOffsets& offsets);

}  // namespace sindy::plants

#endif
