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

#include "sindy/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sindy/errors.hpp"

namespace sindy {

namespace {

using nlohmann::json;

const char* kind_name(TermKind k) {
    switch (k) {
        case TermKind::constant: return "constant";
        case TermKind::linear: return "linear";
        case TermKind::product: return "product";
        case TermKind::sin_linear: return "sin";
        case TermKind::sin_product: return "sin_product";
    }
    return "?";
}

TermKind kind_from(const std::string& s) {
    if (s == "constant") return TermKind::constant;
    if (s == "linear") return TermKind::linear;
    if (s == "product") return TermKind::product;
    if (s == "sin") return TermKind::sin_linear;
    if (s == "sin_product") return TermKind::sin_product;
    throw DataError("model file: unknown term kind '" + s + "'");
}

const char* block_name(Block b) {
    switch (b) {
        case Block::state: return "state";
        case Block::control: return "control";
        case Block::exogenous: return "exogenous";
    }
    return "?";
}

Block block_from(const std::string& s) {
    if (s == "state") return Block::state;
    if (s == "control") return Block::control;
    if (s == "exogenous") return Block::exogenous;
    throw DataError("model file: unknown operand block '" + s + "'");
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

json terms_to_json(const LibrarySpec& spec) {
    json arr = json::array();
    for (const auto& t : spec.terms) {
        json ops = json::array();
        for (const auto& op : t.operands) ops.push_back({block_name(op.block), op.channel});
        arr.push_back({{"kind", kind_name(t.kind)}, {"operands", ops}});
    }
    return arr;
}

}  // namespace

json ensemble_config_json(const EnsembleConfig& cfg) {
    return json{{"target_elites", cfg.target_elites},
                {"r2_gate", cfg.r2_gate},
                {"lambda_init", cfg.lambda_init},
                {"lambda_step", cfg.resolved_lambda_step()},
                {"lambda_floor", cfg.lambda_floor},
                {"stall_iterations", cfg.stall_iterations},
                {"max_iterations", cfg.max_iterations},
                {"bag_min_fraction", cfg.bag_min_fraction},
                {"bag_max_fraction", cfg.bag_max_fraction},
                {"k_clusters", cfg.k_clusters},
                {"kmeans_restarts", cfg.kmeans_restarts},
                {"silhouette_scan", cfg.silhouette_scan},
                {"seed", cfg.seed},
                {"threads", cfg.threads}};
}

json model_to_json(const SindyModel& model, const Provenance& prov) {
    model.validate();
    json triplets = json::array();
    for (std::size_t i = 0; i < model.coefficients.xi.rows(); ++i)
        for (std::size_t j = 0; j < model.coefficients.xi.cols(); ++j)
            if (model.coefficients.xi(i, j) != 0.0)
                triplets.push_back({i, j, model.coefficients.xi(i, j)});

    return json{
        {"format_version", kModelFormatVersion},
        {"provenance",
         {{"tool", kToolVersion}, {"seed", prov.seed}, {"config_hash", prov.config_hash}}},
        {"sample_period", model.sample_period},
        {"sigma_x", model.sigma_x},
        {"dimensions",
         {{"state_dim", model.raw_state_dim}, {"control_dim", model.spec.l},
          {"exog_dim", model.spec.q}}},
        {"channel_names",
         {{"states", model.state_names}, {"controls", model.control_names},
          {"exogenous", model.exogenous_names}}},
        {"centering",
         {{"state_means", model.offsets.state_means},
          {"control_means", model.offsets.control_means},
          {"exogenous_means", model.offsets.exogenous_means}}},
        {"state_abs_max", model.state_abs_max},
        {"library", terms_to_json(model.spec)},
        {"library_fingerprint", hex64(model.spec.fingerprint())},
        {"coefficients",
         {{"rows", model.coefficients.xi.rows()}, {"cols", model.coefficients.xi.cols()},
          {"triplets", triplets}}},
    };
}

SindyModel model_from_json(const json& j) {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != kModelFormatVersion)
        throw DataError("model file: unsupported or missing format_version");

    SindyModel m;
    m.sample_period = j.at("sample_period").get<double>();
    m.sigma_x = j.at("sigma_x").get<std::size_t>();
    m.raw_state_dim = j.at("dimensions").at("state_dim").get<std::size_t>();

    m.spec.l = j.at("dimensions").at("control_dim").get<std::size_t>();
    m.spec.q = j.at("dimensions").at("exog_dim").get<std::size_t>();
    m.spec.n_e = m.raw_state_dim * (m.sigma_x + 1);
    for (const auto& jt : j.at("library")) {
        FeatureTerm t;
        t.kind = kind_from(jt.at("kind").get<std::string>());
        for (const auto& jop : jt.at("operands"))
            t.operands.push_back({block_from(jop.at(0).get<std::string>()),
                                  jop.at(1).get<std::size_t>()});
        m.spec.terms.push_back(std::move(t));
    }
    if (hex64(m.spec.fingerprint()) != j.at("library_fingerprint").get<std::string>())
        throw DataError("model file: library fingerprint mismatch");

    const auto& jc = j.at("coefficients");
    const auto rows = jc.at("rows").get<std::size_t>();
    const auto cols = jc.at("cols").get<std::size_t>();
    m.coefficients.xi = Matrix(rows, cols);
    for (const auto& t : jc.at("triplets")) {
        const auto r = t.at(0).get<std::size_t>();
        const auto c = t.at(1).get<std::size_t>();
        if (r >= rows || c >= cols) throw DataError("model file: coefficient triplet out of range");
        m.coefficients.xi(r, c) = t.at(2).get<double>();
    }
    m.coefficients.support_count = CoefficientMatrix::count_nonzeros(m.coefficients.xi);
    m.coefficients.library_fingerprint = m.spec.fingerprint();

    const auto& jcen = j.at("centering");
    m.offsets.state_means = jcen.at("state_means").get<std::vector<double>>();
    m.offsets.control_means = jcen.at("control_means").get<std::vector<double>>();
    m.offsets.exogenous_means = jcen.at("exogenous_means").get<std::vector<double>>();
    m.state_abs_max = j.at("state_abs_max").get<std::vector<double>>();

    const auto& jn = j.at("channel_names");
    m.state_names = jn.at("states").get<std::vector<std::string>>();
    m.control_names = jn.at("controls").get<std::vector<std::string>>();
    m.exogenous_names = jn.at("exogenous").get<std::vector<std::string>>();

    m.validate();
    return m;
}

void save_model(const std::string& path, const SindyModel& model, const Provenance& prov) {
    std::ofstream file(path);
    if (!file.is_open()) throw DataError("cannot open file for writing: " + path);
    file << model_to_json(model, prov).dump(2) << '\n';
    if (!file.good()) throw DataError("write failed: " + path);
}

SindyModel load_model(const std::string& path) {
    std::ifstream file(path);
    if (!file.is_open()) throw DataError("cannot open model file: " + path);
    json j;
    try {
        file >> j;
    } catch (const json::exception& e) {
        throw DataError("model file is not valid JSON: " + std::string(e.what()));
    }
    return model_from_json(j);
}

json run_report_json(const EnsembleRun& run) {
    json elites = json::array();
    for (const Elite& e : run.elites)
        elites.push_back({{"iteration", e.iteration},
                          {"lambda", e.lambda_used},
                          {"bag_size", e.bag.size()},
                          {"support_count", e.support_count},
                          {"r2_long", e.r2_long},
                          {"r2_one_step", e.r2_one_step}});

    json classes = json::array();
    for (const ClassCandidate& c : run.clusters.classes)
        classes.push_back({{"class", c.cluster_id + 1},
                           {"members", c.member_count},
                           {"r2_one_step", c.r2_one_step},
                           {"r2_long", c.r2_long},
                           {"N", c.support_count},
                           {"diverged", c.diverged}});

    double sil_mean = 0.0;
    double sil_min = run.clusters.silhouette.empty() ? 0.0 : run.clusters.silhouette.front();
    for (double s : run.clusters.silhouette) {
        sil_mean += s;
        sil_min = std::min(sil_min, s);
    }
    if (!run.clusters.silhouette.empty())
        sil_mean /= static_cast<double>(run.clusters.silhouette.size());

    json assignments = json::array();
    for (std::size_t a : run.clusters.assignments) assignments.push_back(a + 1);

    return json{{"config", ensemble_config_json(run.config)},
                {"iterations_used", run.iterations_used},
                {"final_lambda", run.final_lambda},
                {"best_min_r2_seen", run.best_min_r2_seen},
                {"partial", run.partial},
                {"wall_seconds", run.wall_seconds},
                {"elites", elites},
                {"clusters",
                 {{"k", run.clusters.k}, {"assignments", assignments},
                  {"classes", classes}}},
                {"silhouette",
                 {{"values", run.clusters.silhouette}, {"mean", sil_mean}, {"min", sil_min}}},
                {"selected_class", run.selected_class + 1},
                {"selection_reason", run.selection_reason}};
}

}  // namespace sindy
