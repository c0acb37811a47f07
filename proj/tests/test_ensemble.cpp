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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "sindy/ensemble.hpp"
#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"

using namespace sindy;

namespace {

// Scalar control system x(t+1) = 0.9 x(t) + 0.1 u(t) with snapshots, library
// and a replay validation scenario.
struct SmallProblem {
    SnapshotSet snap;
    LibrarySpec spec;
    ValidationScenario scenario;
};

SmallProblem make_problem(std::size_t m, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> xs(m + 1), us(m + 1);
    xs[0] = 0.4;
    for (std::size_t t = 0; t < m; ++t) {
        us[t] = rng.uniform(-1.0, 1.0);
        xs[t + 1] = 0.9 * xs[t] + 0.1 * us[t];
    }
    us[m] = 0.0;

    SmallProblem prob;
    prob.snap.X = Matrix(1, m);
    prob.snap.X_plus = Matrix(1, m);
    prob.snap.Gamma = Matrix(1, m);
    prob.snap.D = Matrix(0, m);
    prob.snap.raw_state_dim = 1;
    for (std::size_t t = 0; t < m; ++t) {
        prob.snap.X(0, t) = xs[t];
        prob.snap.X_plus(0, t) = xs[t + 1];
        prob.snap.Gamma(0, t) = us[t];
    }
    prob.spec = build_polynomial_spec(1, 1, 0, 2);

    prob.scenario.initial_window = Matrix::from_rows({{xs[0]}});
    prob.scenario.controls = Matrix(1, m);
    prob.scenario.exogenous = Matrix(0, m);
    prob.scenario.truth = Matrix(1, m);
    for (std::size_t t = 0; t < m; ++t) {
        prob.scenario.controls(0, t) = us[t];
        prob.scenario.truth(0, t) = xs[t + 1];
    }
    return prob;
}

EnsembleConfig small_config(std::uint64_t seed) {
    EnsembleConfig cfg;
    cfg.target_elites = 10;
    cfg.r2_gate = 0.9;
    cfg.lambda_init = 0.05;
    cfg.lambda_step = 0.005;
    cfg.stall_iterations = 20;
    cfg.max_iterations = 2000;
    cfg.bag_min_fraction = 0.5;
    cfg.bag_max_fraction = 1.0;
    cfg.k_clusters = 2;
    cfg.seed = seed;
    return cfg;
}

SindyModel elite_model(const SmallProblem& prob, const Elite& e) {
    SindyModel m;
    m.spec = prob.spec;
    m.coefficients.xi = e.xi_full;
    m.coefficients.support_count = e.support_count;
    m.coefficients.library_fingerprint = prob.spec.fingerprint();
    m.sigma_x = 0;
    m.raw_state_dim = 1;
    m.offsets = CenteringOffsets::zeros(1, 1, 0);
    m.state_abs_max = {kernels::max_abs(prob.snap.X.row(0), prob.snap.m_s())};
    return m;
}

}  // namespace

TEST_CASE("config validation catches bad settings") {
    EnsembleConfig cfg;
    cfg.bag_min_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = EnsembleConfig{};
    cfg.bag_max_fraction = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = EnsembleConfig{};
    cfg.r2_gate = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = EnsembleConfig{};
    cfg.lambda_floor = 50.0;  // above lambda_init
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(EnsembleConfig{}.resolved_lambda_step() == doctest::Approx(3.0));
}

TEST_CASE("full-library bag when fractions are pinned to one") {
    EnsembleConfig cfg;
    cfg.bag_min_fraction = 1.0;
    cfg.bag_max_fraction = 1.0;
    Rng rng(5);
    const auto bag = draw_bag(10, cfg, rng, 0);
    CHECK(bag.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) CHECK(bag[i] == i);
}

TEST_CASE("half-fraction bag on p=45 draws 22 indices plus the forced constant") {
    EnsembleConfig cfg;
    cfg.bag_min_fraction = 0.5;
    cfg.bag_max_fraction = 0.5;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed);
        const auto bag = draw_bag(45, cfg, rng, 0);
        CHECK(bag.size() >= 22);
        CHECK(bag.size() <= 23);
        CHECK(std::set<std::size_t>(bag.begin(), bag.end()).size() == bag.size());
        CHECK(std::is_sorted(bag.begin(), bag.end()));
        CHECK(bag.front() == 0);  // constant always included
        for (auto f : bag) CHECK(f < 45);
    }
}

TEST_CASE("identical rng states draw identical bags") {
    EnsembleConfig cfg;
    Rng a(99), b(99);
    CHECK(draw_bag(45, cfg, a, 0) == draw_bag(45, cfg, b, 0));
}

TEST_CASE("empty bag range is a config error") {
    EnsembleConfig cfg;
    cfg.bag_min_fraction = 0.1;
    cfg.bag_max_fraction = 0.3;
    Rng rng(1);
    CHECK_THROWS_AS(draw_bag(2, cfg, rng, 0), ConfigError);  // floor(0.3*2) = 0
}

TEST_CASE("bag coefficients embed with exact zeros outside the bag") {
    CoefficientMatrix fit;
    fit.xi = Matrix::from_rows({{1.5, -2.0, 0.0}});
    fit.support_count = 2;
    const std::vector<std::size_t> bag{1, 3, 6};
    const CoefficientMatrix full = embed_bag_coefficients(fit, bag, 8, 42);
    CHECK(full.xi.cols() == 8);
    CHECK(full.xi(0, 1) == 1.5);
    CHECK(full.xi(0, 3) == -2.0);
    CHECK(full.xi(0, 6) == 0.0);
    for (std::size_t j : {0, 2, 4, 5, 7}) CHECK(full.xi(0, j) == 0.0);
    CHECK(full.library_fingerprint == 42);
}

TEST_CASE("aggregate: single member passes through untouched") {
    Elite e;
    e.xi_full = Matrix::from_rows({{1e-20, 2.0, 0.0}});  // below snap threshold on purpose
    e.support_count = 2;
    const CoefficientMatrix mean = aggregate_class({&e});
    CHECK(mean.xi == e.xi_full);
    CHECK(mean.support_count == 2);
}

TEST_CASE("aggregate: disjoint supports union with halved values") {
    Elite a, b;
    a.xi_full = Matrix::from_rows({{2.0, 0.0, 0.0}});
    b.xi_full = Matrix::from_rows({{0.0, 4.0, 0.0}});
    const CoefficientMatrix mean = aggregate_class({&a, &b});
    CHECK(mean.xi(0, 0) == 1.0);
    CHECK(mean.xi(0, 1) == 2.0);
    CHECK(mean.xi(0, 2) == 0.0);
    CHECK(mean.support_count == 2);
}

TEST_CASE("aggregate: identical members are idempotent") {
    Elite a;
    a.xi_full = Matrix::from_rows({{0.1, -0.7, 3.0}});
    a.support_count = 3;
    Elite b = a, c = a;
    const CoefficientMatrix mean = aggregate_class({&a, &b, &c});
    CHECK(mean.xi == a.xi_full);
    CHECK(mean.support_count == 3);
}

TEST_CASE("aggregate snaps near-zero averages to exact zero") {
    Elite a, b;
    a.xi_full = Matrix::from_rows({{1e-13, 1.0}});
    b.xi_full = Matrix::from_rows({{-0.5e-13, 1.0}});
    const CoefficientMatrix mean = aggregate_class({&a, &b});
    CHECK(mean.xi(0, 0) == 0.0);
    CHECK(mean.support_count == 1);
}

TEST_CASE("ensemble gathers gate-satisfying elites with a monotone lambda") {
    const SmallProblem prob = make_problem(200, 3);
    const EnsembleConfig cfg = small_config(17);
    const EnsembleRun run = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);

    CHECK(run.elites.size() >= cfg.target_elites);
    CHECK(run.iterations_used <= cfg.max_iterations);

    double prev_lambda = cfg.lambda_init;
    for (const Elite& e : run.elites) {
        CHECK(e.lambda_used <= prev_lambda);
        CHECK(e.lambda_used >= cfg.lambda_floor);
        prev_lambda = e.lambda_used;

        // Re-simulate: the recorded gate decision must be reproducible.
        const SindyModel model = elite_model(prob, e);
        const PredictionReport rep = score_multi_step(model, prob.scenario);
        CHECK(rep.min_r2() >= cfg.r2_gate);
        for (std::size_t i = 0; i < rep.r2_per_output.size(); ++i)
            CHECK(rep.r2_per_output[i] == e.r2_long[i]);

        // Embedding correctness: zeros outside the bag.
        std::set<std::size_t> in_bag(e.bag.begin(), e.bag.end());
        for (std::size_t j = 0; j < prob.spec.p(); ++j)
            if (!in_bag.count(j)) CHECK(e.xi_full(0, j) == 0.0);
    }

    // Selection rule is a pure function of the recorded class metrics.
    std::size_t best = 0;
    const auto& classes = run.clusters.classes;
    for (std::size_t i = 1; i < classes.size(); ++i) {
        if (classes[i].min_r2_long() > classes[best].min_r2_long() ||
            (classes[i].min_r2_long() == classes[best].min_r2_long() &&
             classes[i].support_count < classes[best].support_count))
            best = i;
    }
    CHECK(run.selected_class == classes[best].cluster_id);
    CHECK(run.selected.coefficients.xi == classes[best].model.coefficients.xi);
}

TEST_CASE("identical config and seed reproduce the identical run") {
    const SmallProblem prob = make_problem(150, 5);
    const EnsembleConfig cfg = small_config(23);
    const EnsembleRun a = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    const EnsembleRun b = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    REQUIRE(a.elites.size() == b.elites.size());
    for (std::size_t i = 0; i < a.elites.size(); ++i) {
        CHECK(a.elites[i].iteration == b.elites[i].iteration);
        CHECK(a.elites[i].xi_full == b.elites[i].xi_full);
    }
    CHECK(a.clusters.assignments == b.clusters.assignments);
    CHECK(a.selected.coefficients.xi == b.selected.coefficients.xi);
    CHECK(a.iterations_used == b.iterations_used);
}

TEST_CASE("parallel execution commits the same run as sequential") {
    const SmallProblem prob = make_problem(150, 7);
    EnsembleConfig cfg = small_config(31);
    const EnsembleRun seq = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    cfg.threads = 2;
    const EnsembleRun par = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    cfg.threads = 5;
    const EnsembleRun par5 = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);

    for (const EnsembleRun* run : {&par, &par5}) {
        REQUIRE(run->elites.size() == seq.elites.size());
        for (std::size_t i = 0; i < seq.elites.size(); ++i) {
            CHECK(run->elites[i].iteration == seq.elites[i].iteration);
            CHECK(run->elites[i].xi_full == seq.elites[i].xi_full);
            CHECK(run->elites[i].lambda_used == seq.elites[i].lambda_used);
        }
        CHECK(run->selected.coefficients.xi == seq.selected.coefficients.xi);
        CHECK(run->iterations_used == seq.iterations_used);
    }
}

TEST_CASE("degenerate configuration reproduces stls_fit bit for bit") {
    const SmallProblem prob = make_problem(120, 11);
    EnsembleConfig cfg;
    cfg.target_elites = 1;
    cfg.max_iterations = 1;
    cfg.r2_gate = -1.0;  // gate disabled
    cfg.bag_min_fraction = 1.0;
    cfg.bag_max_fraction = 1.0;
    cfg.k_clusters = 1;
    cfg.lambda_init = 0.05;
    cfg.seed = 9;

    const StlsConfig stls{0.05, 10, 0.0};
    const EnsembleRun run = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg, stls);
    const FeatureMatrix theta = evaluate_library(prob.spec, prob.snap);
    const CoefficientMatrix direct = stls_fit(theta, prob.snap.X_plus, stls);
    CHECK(run.selected.coefficients.xi == direct.xi);
    CHECK(run.selected.coefficients.support_count == direct.support_count);
    CHECK(run.elites.size() == 1);
    CHECK(run.clusters.classes.size() == 1);
}

TEST_CASE("unreachable gate raises a no-model error with diagnostics") {
    const SmallProblem prob = make_problem(100, 13);
    EnsembleConfig cfg = small_config(1);
    cfg.r2_gate = 0.99999999;
    cfg.lambda_init = 50.0;  // thresholds everything away
    cfg.lambda_step = 0.0;
    cfg.max_iterations = 10;
    CHECK_THROWS_WITH_AS(run_ensemble(prob.snap, prob.spec, prob.scenario, cfg),
                         doctest::Contains("no elites"), NoModelError);
}

TEST_CASE("fewer elites than k still clusters") {
    const SmallProblem prob = make_problem(150, 17);
    EnsembleConfig cfg = small_config(3);
    cfg.target_elites = 2;
    cfg.k_clusters = 4;  // clamped to the elite count
    const EnsembleRun run = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    CHECK(run.elites.size() >= 2);
    CHECK(run.clusters.k <= run.elites.size());
}

TEST_CASE("lambda adaptation replays identically under parallel execution") {
    // Start with a threshold that kills every coefficient so elites appear
    // only after several stall-triggered lambda drops; the parallel committer
    // must then recompute stale-guess iterations and still match sequential.
    const SmallProblem prob = make_problem(150, 29);
    EnsembleConfig cfg = small_config(41);
    cfg.lambda_init = 1.0;
    cfg.lambda_step = 0.15;
    cfg.stall_iterations = 5;
    cfg.target_elites = 6;
    cfg.max_iterations = 3000;

    const EnsembleRun seq = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    CHECK(seq.final_lambda < cfg.lambda_init);  // adaptation actually fired

    cfg.threads = 3;
    const EnsembleRun par = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    REQUIRE(par.elites.size() == seq.elites.size());
    for (std::size_t i = 0; i < seq.elites.size(); ++i) {
        CHECK(par.elites[i].iteration == seq.elites[i].iteration);
        CHECK(par.elites[i].lambda_used == seq.elites[i].lambda_used);
        CHECK(par.elites[i].xi_full == seq.elites[i].xi_full);
    }
    CHECK(par.final_lambda == seq.final_lambda);
    CHECK(par.iterations_used == seq.iterations_used);
    CHECK(par.selected.coefficients.xi == seq.selected.coefficients.xi);
}

TEST_CASE("silhouette scan picks a k between 2 and 8") {
    const SmallProblem prob = make_problem(150, 23);
    EnsembleConfig cfg = small_config(29);
    cfg.silhouette_scan = true;
    const EnsembleRun run = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    CHECK(run.clusters.k >= 2);
    CHECK(run.clusters.k <= 8);
    CHECK(!run.clusters.classes.empty());
}

TEST_CASE("hitting the iteration cap with some elites is a partial result") {
    const SmallProblem prob = make_problem(150, 19);
    EnsembleConfig cfg = small_config(7);
    cfg.target_elites = 1000000;  // unreachable
    cfg.max_iterations = 40;
    const EnsembleRun run = run_ensemble(prob.snap, prob.spec, prob.scenario, cfg);
    CHECK(run.partial);
    CHECK(run.iterations_used == 40);
}
