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

#ifndef SINDY_MODEL_IO_HPP
#define SINDY_MODEL_IO_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sindy/ensemble.hpp"
#include "sindy/model.hpp"

namespace sindy {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kToolVersion = "sindy-ensemble 1.0.0";

struct Provenance {
    std::uint64_t seed = 0;
    std::string config_hash;
};

/// Versioned model file: library terms, sparse coefficient triplets,
/// embedding and centering metadata, provenance. Loading re-derives the
/// library fingerprint and refuses mismatched pairings.
nlohmann::json model_to_json(const SindyModel& model, const Provenance& prov);
SindyModel model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const SindyModel& model, const Provenance& prov);
SindyModel load_model(const std::string& path);

/// Ensemble run report: config echo, per-elite metadata, cluster table with
/// per-class one-step/long-term R2 and parameter counts, selection record.
nlohmann::json run_report_json(const EnsembleRun& run);

nlohmann::json ensemble_config_json(const EnsembleConfig& cfg);

}  // namespace sindy

#endif
