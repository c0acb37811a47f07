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

#include "sindy/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <tuple>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"
#include "sindy/plants.hpp"
#include "sindy/rng.hpp"

namespace sindy {

namespace {

using nlohmann::json;

// Substream ids hung off the master seed.
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kEnsembleStream = 2;
constexpr std::uint64_t kGenerateStream = 3;
constexpr std::uint64_t kSweepStreamBase = 5000;

SindyModel bare_model(const LibrarySpec& spec, CoefficientMatrix coeffs, const SnapshotSet& snap) {
    SindyModel m;
    m.spec = spec;
    m.coefficients = std::move(coeffs);
    m.sigma_x = snap.delay_order;
    m.raw_state_dim = snap.raw_state_dim;
    m.offsets = CenteringOffsets::zeros(snap.raw_state_dim, spec.l, spec.q);
    m.state_abs_max.assign(snap.raw_state_dim, 0.0);
    for (std::size_t i = 0; i < snap.raw_state_dim; ++i)
        m.state_abs_max[i] = std::max(kernels::max_abs(snap.X.row(i), snap.m_s()),
                                      kernels::max_abs(snap.X_plus.row(i), snap.m_s()));
    return m;
}

json metrics_json(const PipelineResult& result, const TimeSeries& raw) {
    json one = json::object();
    json lng = json::object();
    for (std::size_t i = 0; i < result.r2_one_step.size(); ++i) {
        const std::string name =
            i < raw.state_names.size() ? raw.state_names[i] : "y" + std::to_string(i + 1);
        one[name] = result.r2_one_step[i];
        lng[name] = result.r2_long[i];
    }
    return json{{"r2_one_step", one},
                {"r2_long", lng},
                {"N", result.support_count},
                {"diverged", result.diverged}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream file(path);
    if (!file.is_open()) throw DataError("cannot open file for writing: " + path);
    file << j.dump(2) << '\n';
    if (!file.good()) throw DataError("write failed: " + path);
}

}  // namespace

Method method_from_string(const std::string& s) {
    if (s == "basic") return Method::basic;
    if (s == "e-sindy") return Method::e_sindy;
    if (s == "proposed") return Method::proposed;
    throw ConfigError("unknown method '" + s + "' (choose basic, e-sindy or proposed)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::basic: return "basic";
        case Method::e_sindy: return "e-sindy";
        case Method::proposed: return "proposed";
    }
    return "?";
}

json RunConfig::to_json() const {
    return json{{"data_path", data_path},
                {"plant", plant},
                {"horizon", horizon},
                {"schema",
                 {{"states", schema.states}, {"controls", schema.controls},
                  {"exogenous", schema.exogenous}, {"sample_period", schema.sample_period}}},
                {"centering", centering},
                {"sigma_x", sigma_x},
                {"degree", degree},
                {"include_sine", include_sine},
                {"method", method_name(method)},
                {"stls",
                 {{"lambda", stls.lambda}, {"max_sweeps", stls.max_sweeps}, {"ridge", stls.ridge}}},
                {"ensemble", ensemble_config_json(ensemble)},
                {"noise_eta", noise.eta},
                {"validation_path", validation_path},
                {"seed", seed},
                {"threads", threads}};
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = cfg.to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineResult run_pipeline(const RunConfig& cfg, const TimeSeries& raw) {
    const auto t0 = std::chrono::steady_clock::now();
    raw.validate();

    TimeSeries working = raw;
    if (cfg.noise.eta > 0.0)
        working = inject_noise(working, NoiseSpec{cfg.noise.eta, derive_seed(cfg.seed, kNoiseStream)});

    CenteringOffsets offsets = CenteringOffsets::zeros(raw.n(), raw.l(), raw.q());
    TimeSeries centered = working;
    if (cfg.centering) std::tie(centered, offsets) = center(working);

    const SnapshotSet snap = embed_delay(centered, cfg.sigma_x);
    const LibrarySpec spec = build_polynomial_spec(snap.n_e(), centered.l(), centered.q(),
                                                   cfg.degree, cfg.include_sine);

    ValidationScenario scenario;
    if (!cfg.validation_path.empty()) {
        const TimeSeries vraw = load_timeseries(cfg.validation_path, cfg.schema);
        scenario = scenario_from_series(apply_offsets(vraw, offsets), cfg.sigma_x);
    } else {
        scenario = scenario_from_series(centered, cfg.sigma_x);
    }

    PipelineResult result;

    if (cfg.method == Method::proposed) {
        EnsembleConfig ecfg = cfg.ensemble;
        ecfg.seed = derive_seed(cfg.seed, kEnsembleStream);
        ecfg.threads = cfg.threads;
        EnsembleRun run = run_ensemble(snap, spec, scenario, ecfg, cfg.stls);
        result.model = run.selected;
        result.iterations_used = run.iterations_used;
        result.run = std::move(run);
    } else if (cfg.method == Method::basic) {
        const FeatureMatrix theta = evaluate_library(spec, snap);
        CoefficientMatrix fit = stls_fit(theta, snap.X_plus, cfg.stls);
        result.model = bare_model(spec, std::move(fit), snap);
        result.iterations_used = 1;
    } else {
        // Traditional ensemble: bag, fit, and average everything - no elite
        // gate, no clustering.
        EnsembleConfig ecfg = cfg.ensemble;
        ecfg.validate();
        ecfg.seed = derive_seed(cfg.seed, kEnsembleStream);
        const FeatureMatrix theta = evaluate_library(spec, snap);
        std::vector<Elite> members(ecfg.target_elites);
        for (std::size_t i = 0; i < members.size(); ++i) {
            Rng rng(derive_seed(ecfg.seed, i));
            const auto bag = draw_bag(spec.p(), ecfg, rng, spec.constant_index());
            const CoefficientMatrix fit =
                stls_fit(restrict_features(theta, bag), snap.X_plus, cfg.stls);
            members[i].xi_full =
                embed_bag_coefficients(fit, bag, spec.p(), spec.fingerprint()).xi;
            members[i].support_count = fit.support_count;
            members[i].bag = bag;
        }
        std::vector<const Elite*> ptrs;
        for (const Elite& e : members) ptrs.push_back(&e);
        CoefficientMatrix mean = aggregate_class(ptrs);
        mean.library_fingerprint = spec.fingerprint();
        result.model = bare_model(spec, std::move(mean), snap);
        result.iterations_used = members.size();
    }

    // Score the final model on training data and the validation scenario.
    result.r2_one_step = predict_one_step(result.model, snap).r2_per_output;
    const PredictionReport long_term = score_multi_step(result.model, scenario);
    result.r2_long = long_term.r2_per_output;
    result.diverged = long_term.diverged;
    result.support_count = result.model.coefficients.support_count;

    // Attach reporting metadata so the exported model runs on raw data.
    result.model.offsets = offsets;
    result.model.sample_period = raw.sample_period;
    result.model.state_names = raw.state_names;
    result.model.control_names = raw.control_names;
    result.model.exogenous_names = raw.exogenous_names;

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    result.report = json{{"method", method_name(cfg.method)},
                         {"config", cfg.to_json()},
                         {"config_hash", config_hash(cfg)},
                         {"seed", cfg.seed},
                         {"metrics", metrics_json(result, raw)},
                         {"iterations_used", result.iterations_used},
                         {"wall_seconds", result.wall_seconds}};
    if (result.run) result.report["ensemble"] = run_report_json(*result.run);
    return result;
}

TimeSeries cmd_generate(const RunConfig& cfg) {
    const plants::PlantSpec& plant = plants::get_plant(cfg.plant);
    std::string warning;
    const TimeSeries ts = plants::generate_dataset(plant, derive_seed(cfg.seed, kGenerateStream),
                                                   cfg.horizon, &warning);
    if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
    if (!cfg.out_data.empty()) save_timeseries(cfg.out_data, ts);
    return ts;
}

PipelineResult cmd_identify(const RunConfig& cfg) {
    const TimeSeries raw = load_timeseries(cfg.data_path, cfg.schema);
    PipelineResult result = run_pipeline(cfg, raw);
    if (!cfg.out_model.empty())
        save_model(cfg.out_model, result.model, Provenance{cfg.seed, config_hash(cfg)});
    if (!cfg.out_report.empty()) write_json(cfg.out_report, result.report);
    return result;
}

EvaluationResult cmd_evaluate(const RunConfig& cfg, const std::string& model_path) {
    const SindyModel model = load_model(model_path);

    CsvSchema schema;
    schema.states = model.state_names;
    schema.controls = model.control_names;
    schema.exogenous = model.exogenous_names;
    schema.sample_period = model.sample_period;
    const TimeSeries raw = load_timeseries(cfg.data_path, schema);
    if (raw.n() != model.raw_state_dim) {
        std::string names;
        for (const auto& n : model.state_names) names += (names.empty() ? "" : ", ") + n;
        throw DataError("evaluate: data state channels do not match the model's (" + names + ")");
    }

    const TimeSeries centered = apply_offsets(raw, model.offsets);
    const SnapshotSet snap = embed_delay(centered, model.sigma_x);
    const PredictionReport one = predict_one_step(model, snap);
    const ValidationScenario scenario = scenario_from_series(centered, model.sigma_x);
    const PredictionReport lng = score_multi_step(model, scenario);

    EvaluationResult ev;
    ev.r2_one_step = one.r2_per_output;
    ev.r2_long = lng.r2_per_output;
    ev.diverged = lng.diverged;
    ev.diverged_at = lng.diverged_at;
    ev.support_count = model.coefficients.support_count;

    json one_j = json::object(), lng_j = json::object();
    for (std::size_t i = 0; i < model.raw_state_dim; ++i) {
        one_j[model.state_names[i]] = ev.r2_one_step[i];
        lng_j[model.state_names[i]] = ev.r2_long[i];
    }
    ev.metrics = json{{"model", model_path},
                      {"data", cfg.data_path},
                      {"r2_one_step", one_j},
                      {"r2_long", lng_j},
                      {"N", ev.support_count},
                      {"diverged", ev.diverged}};
    if (ev.diverged_at) ev.metrics["diverged_at"] = *ev.diverged_at;
    if (!cfg.out_metrics.empty()) write_json(cfg.out_metrics, ev.metrics);

    if (!cfg.out_trajectory.empty()) {
        const bool one_step_mode = cfg.trajectory_mode == "one-step";
        const PredictionReport& rep = one_step_mode ? one : lng;
        const std::size_t horizon = rep.predicted.cols();
        std::ofstream file(cfg.out_trajectory);
        if (!file.is_open())
            throw DataError("cannot open file for writing: " + cfg.out_trajectory);
        file << "time";
        for (const auto& name : model.state_names) file << ",truth_" << name;
        for (const auto& name : model.state_names) file << ",pred_" << name;
        file << '\n';
        char buf[40];
        const std::size_t offset = model.sigma_x + 1;
        for (std::size_t t = 0; t < horizon; ++t) {
            std::snprintf(buf, sizeof buf, "%.17g",
                          static_cast<double>(t + offset) * model.sample_period);
            file << buf;
            for (std::size_t i = 0; i < model.raw_state_dim; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", raw.states(i, t + offset));
                file << ',' << buf;
            }
            for (std::size_t i = 0; i < model.raw_state_dim; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g",
                              rep.predicted(i, t) + model.offsets.state_means[i]);
                file << ',' << buf;
            }
            file << '\n';
        }
    }
    return ev;
}

std::vector<SweepRow> cmd_sweep_noise(const RunConfig& cfg, const std::vector<double>& etas) {
    if (etas.empty()) throw ConfigError("sweep-noise: need at least one noise level");
    for (double eta : etas)
        if (eta < 0.0) throw ConfigError("sweep-noise: noise levels must be >= 0");

    const TimeSeries raw = load_timeseries(cfg.data_path, cfg.schema);

    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        RunConfig row_cfg = cfg;
        row_cfg.noise.eta = etas[i];
        row_cfg.seed = derive_seed(cfg.seed, kSweepStreamBase + i);
        SweepRow row;
        row.eta = etas[i];
        try {
            const PipelineResult r = run_pipeline(row_cfg, raw);
            row.ok = true;
            row.r2_one_step = r.r2_one_step;
            row.r2_long = r.r2_long;
            row.support_count = r.support_count;
            row.wall_seconds = r.wall_seconds;
            row.iterations = r.iterations_used;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    if (!cfg.out_table.empty()) {
        std::ofstream file(cfg.out_table);
        if (!file.is_open()) throw DataError("cannot open file for writing: " + cfg.out_table);
        file << "eta";
        for (const auto& name : raw.state_names) file << ",r2_one_step_" << name;
        for (const auto& name : raw.state_names) file << ",r2_long_" << name;
        file << ",N,wall_seconds,iterations,status\n";
        char buf[40];
        for (const SweepRow& row : rows) {
            std::snprintf(buf, sizeof buf, "%g", row.eta);
            file << buf;
            if (row.ok) {
                for (double v : row.r2_one_step) {
                    std::snprintf(buf, sizeof buf, "%.6f", v);
                    file << ',' << buf;
                }
                for (double v : row.r2_long) {
                    std::snprintf(buf, sizeof buf, "%.6f", v);
                    file << ',' << buf;
                }
                std::snprintf(buf, sizeof buf, "%.3f", row.wall_seconds);
                file << ',' << row.support_count << ',' << buf << ',' << row.iterations << ",ok\n";
            } else {
                std::string msg = row.error;
                for (char& c : msg)
                    if (c == ',' || c == '\n') c = ';';
                for (std::size_t k = 0; k < 2 * raw.state_names.size(); ++k) file << ",";
                file << ",,," << "error: " << msg << '\n';
            }
        }
        if (!file.good()) throw DataError("write failed: " + cfg.out_table);
    }
    return rows;
}

}  // namespace sindy
