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

#ifndef SINDY_ENSEMBLE_HPP
#define SINDY_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sindy/model.hpp"
#include "sindy/regression.hpp"
#include "sindy/rng.hpp"
#include "sindy/simulate.hpp"
#include "sindy/snapshot.hpp"

namespace sindy {

struct EnsembleConfig {
    std::size_t target_elites = 50;
    double r2_gate = 0.9;  // values <= 0 disable gating (test hook)
    double lambda_init = 30.0;
    double lambda_step = -1.0;  // negative = auto (0.1 * lambda_init)
    double lambda_floor = 0.0;
    std::size_t stall_iterations = 100;  // elite-free commits before lambda drops
    std::size_t max_iterations = 20000;
    double bag_min_fraction = 0.3;
    double bag_max_fraction = 0.9;
    std::size_t k_clusters = 4;
    std::size_t kmeans_restarts = 10;
    bool silhouette_scan = false;  // pick k in 2..8 by mean silhouette instead
    std::uint64_t seed = 0;
    std::size_t threads = 1;  // 1 = sequential

    double resolved_lambda_step() const {
        return lambda_step >= 0.0 ? lambda_step : 0.1 * lambda_init;
    }
    void validate() const;
};

/// A bag model that cleared the long-term R2 gate, embedded back into full
/// library coordinates (exact zeros outside the bag).
struct Elite {
    Matrix xi_full;  // n_e x p
    std::vector<std::size_t> bag;
    std::vector<double> r2_long;
    std::vector<double> r2_one_step;
    double lambda_used = 0.0;
    std::uint64_t iteration = 0;
    std::size_t support_count = 0;
};

struct ClassCandidate {
    std::size_t cluster_id = 0;
    std::size_t member_count = 0;
    SindyModel model;  // mean of the member coefficient matrices
    std::vector<double> r2_one_step;
    std::vector<double> r2_long;
    std::size_t support_count = 0;
    bool diverged = false;

    double min_r2_long() const;
};

struct ClusterReport {
    std::size_t k = 0;
    std::vector<std::size_t> assignments;  // per elite, in iteration order
    std::vector<double> silhouette;        // per elite
    std::vector<ClassCandidate> classes;   // non-empty clusters, by cluster id
};

struct EnsembleRun {
    EnsembleConfig config;
    std::vector<Elite> elites;
    ClusterReport clusters;
    std::size_t selected_class = 0;
    SindyModel selected;
    std::string selection_reason;
    std::uint64_t iterations_used = 0;
    double wall_seconds = 0.0;
    double final_lambda = 0.0;
    double best_min_r2_seen = 0.0;
    bool partial = false;  // hit max_iterations with fewer elites than requested
};

/// Random feature subset: size drawn uniformly from
/// [floor(bag_min_fraction*p), floor(bag_max_fraction*p)] (at least 1),
/// indices sampled without replacement, sorted, with the forced index (the
/// constant term) inserted when absent. Pass forced_index >= p to disable.
std::vector<std::size_t> draw_bag(std::size_t p, const EnsembleConfig& cfg, Rng& rng,
                                  std::size_t forced_index = 0);

/// Entrywise mean of the members' full coefficient matrices. A single member
/// (or bit-identical members) is returned unchanged; otherwise entries below
/// 1e-12 in magnitude snap to exact zero before the support is recounted.
CoefficientMatrix aggregate_class(const std::vector<const Elite*>& members);

/// Scatter a bag-space coefficient matrix into full library coordinates;
/// entries outside the bag are exact zeros.
CoefficientMatrix embed_bag_coefficients(const CoefficientMatrix& fit,
                                         const std::vector<std::size_t>& bag, std::size_t p,
                                         std::uint64_t fingerprint);

/// Library bagging with STLS per bag, multi-step elite gating, lambda
/// adaptation on stall, k-means classification of the elites, per-class mean
/// aggregation, and best-class selection (max min long-term R2, then fewer
/// parameters, then lower class id).
///
/// Iterations are keyed by (seed, iteration index) and committed in index
/// order, so the result is identical for any thread count.
EnsembleRun run_ensemble(const SnapshotSet& snap, const LibrarySpec& spec,
                         const ValidationScenario& scenario, const EnsembleConfig& cfg,
                         const StlsConfig& stls_base = StlsConfig{});

}  // namespace sindy

#endif
