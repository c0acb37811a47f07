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

#ifndef SINDY_KMEANS_HPP
#define SINDY_KMEANS_HPP

#include <cstddef>
#include <vector>

#include "sindy/rng.hpp"

namespace sindy {

struct KmeansResult {
    std::vector<std::size_t> assignments;        // point -> cluster id in [0, k)
    std::vector<std::vector<double>> centroids;  // k centroids
    std::vector<double> silhouette;              // per point, [-1, 1]; singletons and k=1 score 0
    double within_cluster_ss = 0.0;
};

/// Lloyd's algorithm from k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares. Euclidean distances throughout.
KmeansResult kmeans_cluster(const std::vector<std::vector<double>>& points, std::size_t k,
                            Rng& rng, std::size_t restarts = 10);

}  // namespace sindy

#endif
