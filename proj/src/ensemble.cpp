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

#include "sindy/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"
#include "sindy/kmeans.hpp"

namespace sindy {

namespace {

constexpr std::uint64_t kKmeansStream = 0x6b6d65616e73ULL;  // distinct RNG stream for clustering

struct IterationOutcome {
    std::uint64_t iteration = 0;
    double lambda_used = 0.0;
    bool is_elite = false;
    double min_r2_long = -std::numeric_limits<double>::infinity();
    Elite elite;
};

// Lambda adaptation: after stall_iterations consecutive elite-free commits
// the threshold steps down (never below the floor).
struct LambdaSchedule {
    double current;
    std::size_t consecutive_failures = 0;

    void on_commit(bool was_elite, const EnsembleConfig& cfg) {
        if (was_elite) {
            consecutive_failures = 0;
            return;
        }
        if (++consecutive_failures >= cfg.stall_iterations) {
            current = std::max(current - cfg.resolved_lambda_step(), cfg.lambda_floor);
            consecutive_failures = 0;
        }
    }
};

class EnsembleEngine {
public:
    EnsembleEngine(const SnapshotSet& snap, const LibrarySpec& spec,
                   const ValidationScenario& scenario, const EnsembleConfig& cfg,
                   const StlsConfig& stls_base)
        : snap_(snap), spec_(spec), scenario_(scenario), cfg_(cfg), stls_base_(stls_base) {
        theta_ = evaluate_library(spec_, snap_);
        constant_index_ = spec_.constant_index();

        template_.spec = spec_;
        template_.sigma_x = snap_.delay_order;
        template_.raw_state_dim = snap_.raw_state_dim;
        template_.offsets = CenteringOffsets::zeros(snap_.raw_state_dim, spec_.l, spec_.q);
        template_.state_abs_max.assign(snap_.raw_state_dim, 0.0);
        for (std::size_t i = 0; i < snap_.raw_state_dim; ++i) {
            const double a = kernels::max_abs(snap_.X.row(i), snap_.m_s());
            const double b = kernels::max_abs(snap_.X_plus.row(i), snap_.m_s());
            template_.state_abs_max[i] = std::max(a, b);
        }
    }

    IterationOutcome compute(std::uint64_t iteration, double lambda) const {
        IterationOutcome out;
        out.iteration = iteration;
        out.lambda_used = lambda;

        Rng rng(derive_seed(cfg_.seed, iteration));
        const std::vector<std::size_t> bag = draw_bag(spec_.p(), cfg_, rng, constant_index_);
        const FeatureMatrix theta_bag = restrict_features(theta_, bag);

        StlsConfig scfg = stls_base_;
        scfg.lambda = lambda;
        const CoefficientMatrix fit = stls_fit(theta_bag, snap_.X_plus, scfg);

        SindyModel candidate = template_;
        candidate.coefficients = embed_bag(fit, bag);

        const PredictionReport long_term = score_multi_step(candidate, scenario_);
        out.min_r2_long = long_term.min_r2();
        out.is_elite = out.min_r2_long >= cfg_.r2_gate;
        if (out.is_elite) {
            Elite e;
            e.xi_full = candidate.coefficients.xi;
            e.bag = bag;
            e.r2_long = long_term.r2_per_output;
            e.r2_one_step = predict_one_step(candidate, snap_).r2_per_output;
            e.lambda_used = lambda;
            e.iteration = iteration;
            e.support_count = candidate.coefficients.support_count;
            out.elite = std::move(e);
        }
        return out;
    }

    CoefficientMatrix embed_bag(const CoefficientMatrix& fit,
                                const std::vector<std::size_t>& bag) const {
        return embed_bag_coefficients(fit, bag, spec_.p(), spec_.fingerprint());
    }

    SindyModel model_from(CoefficientMatrix coeffs) const {
        SindyModel m = template_;
        m.coefficients = std::move(coeffs);
        return m;
    }

    const FeatureMatrix& theta() const { return theta_; }
    const SnapshotSet& snap() const { return snap_; }
    const ValidationScenario& scenario() const { return scenario_; }

private:
    const SnapshotSet& snap_;
    const LibrarySpec& spec_;
    const ValidationScenario& scenario_;
    const EnsembleConfig& cfg_;
    const StlsConfig& stls_base_;
    FeatureMatrix theta_;
    std::size_t constant_index_ = 0;
    SindyModel template_;
};

// Gather loop: iterations are computed (possibly by several workers, each
// with an optimistic lambda guess) but committed strictly in index order;
// a commit whose guess went stale is recomputed with the scheduled lambda.
// The committed prefix is therefore identical for any worker count.
struct GatherResult {
    std::vector<Elite> elites;
    std::uint64_t iterations_used = 0;
    double final_lambda = 0.0;
    double best_min_r2 = -std::numeric_limits<double>::infinity();
};

GatherResult gather_elites(const EnsembleEngine& engine, const EnsembleConfig& cfg) {
    GatherResult result;
    LambdaSchedule schedule{cfg.lambda_init};

    auto commit = [&](IterationOutcome&& out) {
        if (out.is_elite) result.elites.push_back(std::move(out.elite));
        result.best_min_r2 = std::max(result.best_min_r2, out.min_r2_long);
        schedule.on_commit(out.is_elite, cfg);
        result.iterations_used = out.iteration + 1;
        return result.elites.size() >= cfg.target_elites;
    };

    if (cfg.threads <= 1) {
        for (std::uint64_t iter = 0; iter < cfg.max_iterations; ++iter) {
            if (commit(engine.compute(iter, schedule.current))) break;
        }
    } else {
        std::atomic<std::uint64_t> next{0};
        std::atomic<bool> stop{false};
        std::atomic<double> lambda_guess{schedule.current};
        std::mutex mu;
        std::condition_variable cv;
        std::map<std::uint64_t, IterationOutcome> pending;
        std::exception_ptr worker_error;

        auto worker = [&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::uint64_t iter = next.fetch_add(1);
                if (iter >= cfg.max_iterations) break;
                try {
                    IterationOutcome out = engine.compute(iter, lambda_guess.load());
                    {
                        std::lock_guard lock(mu);
                        pending.emplace(iter, std::move(out));
                    }
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!worker_error) worker_error = std::current_exception();
                    stop.store(true);
                }
                cv.notify_all();
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(cfg.threads);
        for (std::size_t t = 0; t < cfg.threads; ++t) pool.emplace_back(worker);

        std::exception_ptr commit_error;
        try {
            for (std::uint64_t iter = 0; iter < cfg.max_iterations; ++iter) {
                IterationOutcome out;
                {
                    std::unique_lock lock(mu);
                    cv.wait(lock, [&] { return pending.count(iter) > 0 || worker_error; });
                    if (worker_error) break;
                    out = std::move(pending.at(iter));
                    pending.erase(iter);
                }
                if (out.lambda_used != schedule.current)
                    out = engine.compute(iter, schedule.current);  // stale guess
                const bool done = commit(std::move(out));
                lambda_guess.store(schedule.current);
                if (done) break;
            }
        } catch (...) {
            commit_error = std::current_exception();
        }
        stop.store(true);
        for (auto& th : pool) th.join();
        if (commit_error) std::rethrow_exception(commit_error);
        if (worker_error) std::rethrow_exception(worker_error);
    }

    result.final_lambda = schedule.current;
    return result;
}

std::size_t pick_k_by_silhouette(const std::vector<std::vector<double>>& points,
                                 const EnsembleConfig& cfg, Rng& rng) {
    std::size_t best_k = 2;
    double best_score = -std::numeric_limits<double>::infinity();
    const std::size_t hi = std::min<std::size_t>(8, points.size() - 1);
    for (std::size_t k = 2; k <= hi; ++k) {
        const KmeansResult r = kmeans_cluster(points, k, rng, cfg.kmeans_restarts);
        double mean = 0.0;
        for (double s : r.silhouette) mean += s;
        mean /= static_cast<double>(r.silhouette.size());
        if (mean > best_score) {
            best_score = mean;
            best_k = k;
        }
    }
    return best_k;
}

}  // namespace

void EnsembleConfig::validate() const {
    if (target_elites < 1) throw ConfigError("ensemble: target_elites must be >= 1");
    if (!(r2_gate < 1.0)) throw ConfigError("ensemble: r2_gate must be < 1");
    if (lambda_init < 0.0) throw ConfigError("ensemble: lambda_init must be >= 0");
    if (lambda_floor < 0.0 || lambda_floor > lambda_init)
        throw ConfigError("ensemble: lambda_floor must lie in [0, lambda_init]");
    if (stall_iterations < 1) throw ConfigError("ensemble: stall_iterations must be >= 1");
    if (max_iterations < 1) throw ConfigError("ensemble: max_iterations must be >= 1");
    if (!(bag_min_fraction > 0.0) || bag_min_fraction > bag_max_fraction || bag_max_fraction > 1.0)
        throw ConfigError("ensemble: need 0 < bag_min_fraction <= bag_max_fraction <= 1");
    if (k_clusters < 1) throw ConfigError("ensemble: k_clusters must be >= 1");
}

std::vector<std::size_t> draw_bag(std::size_t p, const EnsembleConfig& cfg, Rng& rng,
                                  std::size_t forced_index) {
    if (p < 1) throw ConfigError("draw_bag: empty library");
    const std::size_t hi = static_cast<std::size_t>(cfg.bag_max_fraction * static_cast<double>(p));
    if (hi < 1)
        throw ConfigError("draw_bag: bag size range is empty (bag_max_fraction too small for p=" +
                          std::to_string(p) + ")");
    std::size_t lo = static_cast<std::size_t>(cfg.bag_min_fraction * static_cast<double>(p));
    lo = std::max<std::size_t>(lo, 1);

    const std::size_t size = rng.uniform_u64(lo, hi);

    // Partial Fisher-Yates over 0..p-1.
    std::vector<std::size_t> pool(p);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = rng.uniform_u64(i, p - 1);
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> bag(pool.begin(), pool.begin() + size);
    std::sort(bag.begin(), bag.end());
    if (forced_index < p && !std::binary_search(bag.begin(), bag.end(), forced_index))
        bag.insert(std::lower_bound(bag.begin(), bag.end(), forced_index), forced_index);
    return bag;
}

CoefficientMatrix embed_bag_coefficients(const CoefficientMatrix& fit,
                                         const std::vector<std::size_t>& bag, std::size_t p,
                                         std::uint64_t fingerprint) {
    if (fit.xi.cols() != bag.size())
        throw DataError("embed_bag_coefficients: bag size does not match fit columns");
    CoefficientMatrix full;
    full.xi = Matrix(fit.xi.rows(), p);
    for (std::size_t i = 0; i < fit.xi.rows(); ++i)
        for (std::size_t j = 0; j < bag.size(); ++j) {
            if (bag[j] >= p) throw DataError("embed_bag_coefficients: bag index out of range");
            full.xi(i, bag[j]) = fit.xi(i, j);
        }
    full.support_count = fit.support_count;
    full.library_fingerprint = fingerprint;
    full.diagnostics = fit.diagnostics;
    return full;
}

CoefficientMatrix aggregate_class(const std::vector<const Elite*>& members) {
    if (members.empty()) throw ConfigError("aggregate_class: empty member list");
    const Matrix& first = members.front()->xi_full;

    bool all_identical = true;
    for (std::size_t i = 1; i < members.size() && all_identical; ++i)
        all_identical = members[i]->xi_full == first;

    CoefficientMatrix out;
    if (all_identical) {
        out.xi = first;
        out.support_count = members.front()->support_count;
        return out;
    }

    out.xi = Matrix(first.rows(), first.cols());
    for (const Elite* e : members) {
        if (e->xi_full.rows() != first.rows() || e->xi_full.cols() != first.cols())
            throw DataError("aggregate_class: member dimensions differ");
        kernels::axpy(1.0, e->xi_full.data(), out.xi.data(), out.xi.size());
    }
    kernels::scale_inplace(out.xi.data(), 1.0 / static_cast<double>(members.size()),
                           out.xi.size());
    for (std::size_t i = 0; i < out.xi.size(); ++i)
        if (std::fabs(out.xi.data()[i]) < 1e-12) out.xi.data()[i] = 0.0;
    out.support_count = CoefficientMatrix::count_nonzeros(out.xi);
    return out;
}

double ClassCandidate::min_r2_long() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : r2_long) m = std::min(m, v);
    return m;
}

EnsembleRun run_ensemble(const SnapshotSet& snap, const LibrarySpec& spec,
                         const ValidationScenario& scenario, const EnsembleConfig& cfg,
                         const StlsConfig& stls_base) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    EnsembleEngine engine(snap, spec, scenario, cfg, stls_base);
    GatherResult gathered = gather_elites(engine, cfg);

    EnsembleRun run;
    run.config = cfg;
    run.iterations_used = gathered.iterations_used;
    run.final_lambda = gathered.final_lambda;
    run.best_min_r2_seen = gathered.best_min_r2;
    run.elites = std::move(gathered.elites);

    if (run.elites.empty()) {
        std::ostringstream msg;
        msg << "no elites after " << run.iterations_used << " iterations (best min R^2 "
            << run.best_min_r2_seen << ", final lambda " << run.final_lambda << ")";
        throw NoModelError(msg.str());
    }
    run.partial = run.elites.size() < cfg.target_elites;

    // Classify the elites' coefficient matrices. Distances use scaled-feature
    // units (coefficient times feature max-abs), the same metric the STLS
    // threshold acts in; raw units would let large-scale features drown out
    // everything else.
    const std::vector<double>& scales = engine.theta().column_scales;
    std::vector<std::vector<double>> points;
    points.reserve(run.elites.size());
    for (const Elite& e : run.elites) {
        std::vector<double> flat(e.xi_full.size());
        for (std::size_t i = 0; i < e.xi_full.rows(); ++i)
            for (std::size_t j = 0; j < e.xi_full.cols(); ++j)
                flat[i * e.xi_full.cols() + j] = e.xi_full(i, j) * scales[j];
        points.push_back(std::move(flat));
    }

    Rng cluster_rng(derive_seed(cfg.seed, kKmeansStream));
    std::size_t k = std::min(cfg.k_clusters, points.size());
    if (cfg.silhouette_scan && points.size() >= 3)
        k = pick_k_by_silhouette(points, cfg, cluster_rng);
    const KmeansResult km = kmeans_cluster(points, k, cluster_rng, cfg.kmeans_restarts);

    run.clusters.k = k;
    run.clusters.assignments = km.assignments;
    run.clusters.silhouette = km.silhouette;

    for (std::size_t c = 0; c < k; ++c) {
        std::vector<const Elite*> members;
        for (std::size_t i = 0; i < run.elites.size(); ++i)
            if (km.assignments[i] == c) members.push_back(&run.elites[i]);
        if (members.empty()) continue;

        ClassCandidate cand;
        cand.cluster_id = c;
        cand.member_count = members.size();
        CoefficientMatrix mean = aggregate_class(members);
        mean.library_fingerprint = spec.fingerprint();
        cand.model = engine.model_from(std::move(mean));
        cand.support_count = cand.model.coefficients.support_count;
        cand.r2_one_step = predict_one_step(cand.model, snap).r2_per_output;
        const PredictionReport long_term = score_multi_step(cand.model, scenario);
        cand.r2_long = long_term.r2_per_output;
        cand.diverged = long_term.diverged;
        run.clusters.classes.push_back(std::move(cand));
    }

    // Best class: max min long-term R2, then fewer parameters, then lower id.
    std::size_t best = 0;
    for (std::size_t i = 1; i < run.clusters.classes.size(); ++i) {
        const ClassCandidate& a = run.clusters.classes[i];
        const ClassCandidate& b = run.clusters.classes[best];
        if (a.min_r2_long() > b.min_r2_long() ||
            (a.min_r2_long() == b.min_r2_long() && a.support_count < b.support_count))
            best = i;
    }
    const ClassCandidate& chosen = run.clusters.classes[best];
    run.selected_class = chosen.cluster_id;
    run.selected = chosen.model;
    {
        std::ostringstream reason;
        reason << "class " << chosen.cluster_id + 1 << " of " << run.clusters.classes.size()
               << ": max min long-term R^2 = " << chosen.min_r2_long() << " with N = "
               << chosen.support_count;
        run.selection_reason = reason.str();
    }

    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

}  // namespace sindy
