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

#include "sindy/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"

namespace sindy {

namespace {

constexpr std::size_t kMaxLloydIterations = 200;

struct Run {
    std::vector<std::size_t> assignments;
    std::vector<std::vector<double>> centroids;
    double wcss = std::numeric_limits<double>::infinity();
};

std::size_t nearest_centroid(const std::vector<double>& point,
                             const std::vector<std::vector<double>>& centroids) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d =
            kernels::squared_distance(point.data(), centroids[c].data(), point.size());
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

Run lloyd_once(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.size();
    const std::size_t dim = points[0].size();

    // k-means++ seeding.
    Run run;
    run.centroids.reserve(k);
    run.centroids.push_back(points[rng.uniform_u64(0, n - 1)]);
    std::vector<double> dist2(n);
    while (run.centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : run.centroids)
                best = std::min(best, kernels::squared_distance(points[i].data(), c.data(), dim));
            dist2[i] = best;
            total += best;
        }
        std::size_t chosen;
        if (total <= 0.0) {
            chosen = rng.uniform_u64(0, n - 1);  // all points coincide with a centroid
        } else {
            double target = rng.next_double() * total;
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= dist2[i];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        run.centroids.push_back(points[chosen]);
    }

    run.assignments.assign(n, 0);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = nearest_centroid(points[i], run.centroids);
            if (a != run.assignments[i]) {
                run.assignments[i] = a;
                changed = true;
            }
        }
        if (!changed) break;

        for (auto& c : run.centroids) std::fill(c.begin(), c.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = run.assignments[i];
            kernels::axpy(1.0, points[i].data(), run.centroids[a].data(), dim);
            ++counts[a];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Reseed an emptied cluster at the point farthest from its centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = kernels::squared_distance(
                        points[i].data(), run.centroids[run.assignments[i]].data(), dim);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                run.centroids[c] = points[far];
            } else {
                kernels::scale_inplace(run.centroids[c].data(), 1.0 / static_cast<double>(counts[c]),
                                       dim);
            }
        }
    }

    run.wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        run.wcss += kernels::squared_distance(points[i].data(),
                                              run.centroids[run.assignments[i]].data(), dim);
    return run;
}

std::vector<double> silhouette_scores(const std::vector<std::vector<double>>& points,
                                      const std::vector<std::size_t>& assignments, std::size_t k) {
    const std::size_t n = points.size();
    std::vector<double> scores(n, 0.0);
    if (k < 2) return scores;

    const std::size_t dim = points[0].size();
    std::vector<std::size_t> counts(k, 0);
    for (auto a : assignments) ++counts[a];

    std::vector<double> mean_dist(k);
    for (std::size_t i = 0; i < n; ++i) {
        if (counts[assignments[i]] <= 1) {
            scores[i] = 0.0;  // singleton convention
            continue;
        }
        std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            mean_dist[assignments[j]] +=
                std::sqrt(kernels::squared_distance(points[i].data(), points[j].data(), dim));
        }
        double a = 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            if (c == assignments[i]) {
                a = mean_dist[c] / static_cast<double>(counts[c] - 1);
            } else {
                b = std::min(b, mean_dist[c] / static_cast<double>(counts[c]));
            }
        }
        const double denom = std::max(a, b);
        scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    return scores;
}

}  // namespace

KmeansResult kmeans_cluster(const std::vector<std::vector<double>>& points, std::size_t k, Rng& rng,
                            std::size_t restarts) {
    if (points.empty()) throw ConfigError("kmeans: no points");
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (k > points.size())
        throw ConfigError("kmeans: k (" + std::to_string(k) + ") exceeds point count (" +
                          std::to_string(points.size()) + ")");
    const std::size_t dim = points[0].size();
    for (const auto& pt : points)
        if (pt.size() != dim) throw DataError("kmeans: inconsistent point dimensions");
    if (restarts < 1) restarts = 1;

    Run best;
    for (std::size_t r = 0; r < restarts; ++r) {
        Run run = lloyd_once(points, k, rng);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    KmeansResult result;
    result.assignments = std::move(best.assignments);
    result.centroids = std::move(best.centroids);
    result.within_cluster_ss = best.wcss;
    result.silhouette = silhouette_scores(points, result.assignments, k);
    return result;
}

}  // namespace sindy
