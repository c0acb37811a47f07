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

#ifndef SINDY_COMMANDS_HPP
#define SINDY_COMMANDS_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sindy/csv.hpp"
#include "sindy/ensemble.hpp"
#include "sindy/model_io.hpp"

namespace sindy {

enum class Method { basic, e_sindy, proposed };

Method method_from_string(const std::string& s);
std::string method_name(Method m);

/// Everything a run needs; a run is reproducible from (config, input files).
struct RunConfig {
    // Data source.
    std::string data_path;                    // identify/evaluate input CSV
    std::string plant = "surrogate-airpath";  // generate source
    std::size_t horizon = 20000;              // generate length
    CsvSchema schema;                         // column roles + sample period

    // Pipeline.
    bool centering = true;
    std::size_t sigma_x = 1;
    int degree = 2;
    bool include_sine = false;
    Method method = Method::proposed;
    StlsConfig stls;          // lambda for basic/e-sindy; sweeps/ridge shared
    EnsembleConfig ensemble;  // seed/threads fields are overwritten from below
    NoiseSpec noise;          // seed field is overwritten from below
    std::string validation_path;  // optional held-out multi-step scenario

    std::uint64_t seed = 0;  // master seed; all randomness derives from it
    std::size_t threads = 1;

    // Outputs (empty = do not write).
    std::string out_data;
    std::string out_model;
    std::string out_report;
    std::string out_metrics;
    std::string out_trajectory;
    std::string out_table;
    std::string trajectory_mode = "long-term";  // or "one-step"

    nlohmann::json to_json() const;
};

/// FNV-1a of the canonical config serialization; recorded in every artifact.
std::string config_hash(const RunConfig& cfg);

struct PipelineResult {
    SindyModel model;
    std::vector<double> r2_one_step;  // training data
    std::vector<double> r2_long;      // validation scenario
    bool diverged = false;
    std::size_t support_count = 0;
    std::uint64_t iterations_used = 0;
    double wall_seconds = 0.0;
    std::optional<EnsembleRun> run;  // proposed method only
    nlohmann::json report;
};

/// Identification pipeline on an already-loaded raw record (noise injection,
/// centering, embedding, fit per the configured method, scoring).
PipelineResult run_pipeline(const RunConfig& cfg, const TimeSeries& raw);

/// generate: simulate the configured plant under default excitation and write
/// the CSV. Returns the series.
TimeSeries cmd_generate(const RunConfig& cfg);

/// identify: load data, run the pipeline, write model + report files.
PipelineResult cmd_identify(const RunConfig& cfg);

struct EvaluationResult {
    std::vector<double> r2_one_step;
    std::vector<double> r2_long;
    bool diverged = false;
    std::optional<std::size_t> diverged_at;
    std::size_t support_count = 0;
    nlohmann::json metrics;
};

/// evaluate: score a stored model on a data file; write metrics JSON and the
/// trajectory CSV (time, truth, prediction per channel).
EvaluationResult cmd_evaluate(const RunConfig& cfg, const std::string& model_path);

struct SweepRow {
    double eta = 0.0;
    bool ok = false;
    std::string error;
    std::vector<double> r2_one_step;
    std::vector<double> r2_long;
    std::size_t support_count = 0;
    double wall_seconds = 0.0;
    std::uint64_t iterations = 0;
};

/// sweep-noise: run the full pipeline once per noise level with per-row
/// derived seeds; failures become error rows and the sweep continues.
std::vector<SweepRow> cmd_sweep_noise(const RunConfig& cfg, const std::vector<double>& etas);

}  // namespace sindy

#endif
