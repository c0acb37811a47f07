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

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sindy/commands.hpp"
#include "sindy/errors.hpp"
#include "sindy/plants.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNoModel = 4;

struct SchemaArgs {
    std::string states;
    std::string controls;
    std::string exogenous;
};

std::vector<std::string> split_names(const std::string& csv) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(csv);
    while (std::getline(ss, token, ',')) {
        const auto first = token.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = token.find_last_not_of(" \t");
        out.push_back(token.substr(first, last - first + 1));
    }
    return out;
}

void add_schema_options(CLI::App* cmd, sindy::RunConfig& cfg, SchemaArgs& args) {
    cmd->add_option("--states", args.states, "State column names, comma separated");
    cmd->add_option("--controls", args.controls, "Control column names, comma separated");
    cmd->add_option("--exogenous", args.exogenous, "Exogenous column names, comma separated");
    cmd->add_option("--sample-period", cfg.schema.sample_period, "Sample period in seconds")
        ->check(CLI::PositiveNumber);
}

// Any explicit role list replaces the whole 6-channel demo default.
void resolve_schema(sindy::RunConfig& cfg, const SchemaArgs& args) {
    if (args.states.empty() && args.controls.empty() && args.exogenous.empty()) return;
    cfg.schema.states = split_names(args.states);
    cfg.schema.controls = split_names(args.controls);
    cfg.schema.exogenous = split_names(args.exogenous);
}

void add_pipeline_options(CLI::App* cmd, sindy::RunConfig& cfg, std::string& method,
                          bool& no_centering) {
    cmd->add_option("--method", method, "Identification method: basic, e-sindy or proposed")
        ->check(CLI::IsMember({"basic", "e-sindy", "proposed"}));
    cmd->add_flag("--no-centering", no_centering, "Disable mean centering");
    cmd->add_option("--sigma-x", cfg.sigma_x, "State delay order for the embedding");
    cmd->add_option("--degree", cfg.degree, "Polynomial library degree (1 or 2)");
    cmd->add_flag("--sine", cfg.include_sine, "Add sine families to the library");
    cmd->add_option("--lambda", cfg.stls.lambda, "STLS threshold (basic/e-sindy; initial for proposed)");
    cmd->add_option("--max-sweeps", cfg.stls.max_sweeps, "STLS sweep cap");
    cmd->add_option("--ridge", cfg.stls.ridge, "Optional ridge term for the least squares");
    cmd->add_option("--noise-eta", cfg.noise.eta, "Inject Gaussian state noise at this fraction");
    cmd->add_option("--validation", cfg.validation_path, "Held-out CSV for multi-step validation");

    cmd->add_option("--target-elites", cfg.ensemble.target_elites, "Elites to gather");
    cmd->add_option("--r2-gate", cfg.ensemble.r2_gate, "Long-term R^2 elite gate");
    cmd->add_option("--lambda-step", cfg.ensemble.lambda_step,
                    "Lambda decrement on stall (negative = 0.1*lambda)");
    cmd->add_option("--lambda-floor", cfg.ensemble.lambda_floor, "Lower bound for lambda");
    cmd->add_option("--stall-iterations", cfg.ensemble.stall_iterations,
                    "Elite-free iterations before lambda drops");
    cmd->add_option("--max-iterations", cfg.ensemble.max_iterations, "Iteration budget");
    cmd->add_option("--bag-min", cfg.ensemble.bag_min_fraction, "Bag size lower fraction of p");
    cmd->add_option("--bag-max", cfg.ensemble.bag_max_fraction, "Bag size upper fraction of p");
    cmd->add_option("--k-clusters", cfg.ensemble.k_clusters, "Number of k-means classes");
    cmd->add_option("--kmeans-restarts", cfg.ensemble.kmeans_restarts, "k-means restarts");
    cmd->add_flag("--silhouette-scan", cfg.ensemble.silhouette_scan,
                  "Pick k in 2..8 by mean silhouette instead of --k-clusters");
    cmd->add_option("--threads", cfg.threads, "Worker threads for the ensemble (1 = sequential)");
}

int dispatch(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const sindy::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const sindy::NoModelError& e) {
        std::cerr << "no model: " << e.what() << '\n';
        return kExitNoModel;
    } catch (const sindy::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse identification of nonlinear difference equations with control:\n"
                 "library bagging, multi-step elite gating and clustered aggregation."};
    app.require_subcommand(1);
    // Declarative config: `sindy --config run.conf <subcommand> ...` with
    // [generate]/[identify]/[evaluate]/[sweep-noise] sections; explicit
    // command-line flags override file values.
    app.set_config("--config", "", "Read options from a key=value config file");

    sindy::RunConfig cfg;
    cfg.schema.states = {"y1", "y2"};
    cfg.schema.controls = {"u1", "u2"};
    cfg.schema.exogenous = {"d1", "d2"};
    std::string method = "proposed";
    bool no_centering = false;
    std::string model_path;
    std::string eta_list;

    app.add_option("--seed", cfg.seed, "Master seed; all randomness derives from it")
        ->capture_default_str();

    auto* gen = app.add_subcommand("generate", "Simulate a synthetic plant and write a CSV");
    gen->add_option("--plant", cfg.plant, "Plant name")->capture_default_str();
    gen->add_option("--samples", cfg.horizon, "Number of samples")->capture_default_str();
    gen->add_option("-o,--output", cfg.out_data, "Output CSV path")->required();

    SchemaArgs schema_args;
    auto* ident = app.add_subcommand("identify", "Fit a model from a CSV record");
    ident->add_option("-i,--data", cfg.data_path, "Input CSV")->required();
    add_schema_options(ident, cfg, schema_args);
    add_pipeline_options(ident, cfg, method, no_centering);
    ident->add_option("-o,--model", cfg.out_model, "Output model JSON path")->required();
    ident->add_option("--report", cfg.out_report, "Output run report JSON path");

    auto* eval = app.add_subcommand("evaluate", "Score a stored model on a CSV record");
    eval->add_option("-m,--model", model_path, "Model JSON path")->required();
    eval->add_option("-i,--data", cfg.data_path, "Input CSV")->required();
    eval->add_option("--metrics", cfg.out_metrics, "Output metrics JSON path");
    eval->add_option("--trajectory", cfg.out_trajectory, "Output trajectory CSV path");
    eval->add_option("--trajectory-kind", cfg.trajectory_mode,
                     "Trajectory to export: long-term or one-step")
        ->check(CLI::IsMember({"long-term", "one-step"}));

    auto* sweep = app.add_subcommand("sweep-noise", "Run the pipeline across noise levels");
    sweep->add_option("-i,--data", cfg.data_path, "Input CSV")->required();
    add_schema_options(sweep, cfg, schema_args);
    add_pipeline_options(sweep, cfg, method, no_centering);
    sweep->add_option("--eta", eta_list, "Noise levels (fractions, e.g. 0,0.05,0.1)")->required();
    sweep->add_option("-o,--table", cfg.out_table, "Output CSV table path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    return dispatch([&] {
        cfg.method = sindy::method_from_string(method);
        cfg.centering = !no_centering;
        resolve_schema(cfg, schema_args);
        if (gen->parsed()) {
            const sindy::TimeSeries ts = sindy::cmd_generate(cfg);
            std::cout << "wrote " << ts.m() << " samples (" << ts.n() << " states, " << ts.l()
                      << " controls, " << ts.q() << " exogenous) to " << cfg.out_data << '\n';
        } else if (ident->parsed()) {
            const sindy::PipelineResult r = sindy::cmd_identify(cfg);
            std::cout << r.report.at("metrics").dump(2) << '\n';
            std::cout << "model written to " << cfg.out_model << '\n';
        } else if (eval->parsed()) {
            const sindy::EvaluationResult r = sindy::cmd_evaluate(cfg, model_path);
            std::cout << r.metrics.dump(2) << '\n';
        } else if (sweep->parsed()) {
            std::vector<double> etas;
            for (const std::string& tok : split_names(eta_list)) {
                try {
                    std::size_t used = 0;
                    etas.push_back(std::stod(tok, &used));
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw sindy::ConfigError("invalid noise level '" + tok + "'");
                }
            }
            const auto rows = sindy::cmd_sweep_noise(cfg, etas);
            std::size_t ok = 0;
            for (const auto& row : rows) ok += row.ok ? 1 : 0;
            std::cout << "sweep finished: " << ok << "/" << rows.size() << " rows ok, table in "
                      << cfg.out_table << '\n';
        }
    });
}
