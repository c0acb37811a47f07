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

#ifndef SINDY_LIBRARY_HPP
#define SINDY_LIBRARY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sindy/matrix.hpp"
#include "sindy/snapshot.hpp"

namespace sindy {

enum class Block : std::uint8_t { state = 0, control = 1, exogenous = 2 };

enum class TermKind : std::uint8_t {
    constant,
    linear,
    product,      // second-order cross term a*b (a == b gives the square)
    sin_linear,   // sin(a)
    sin_product,  // sin(a*b)
};

struct Operand {
    Block block;
    std::size_t channel;

    friend bool operator==(const Operand&, const Operand&) = default;
    friend auto operator<=>(const Operand&, const Operand&) = default;
};

struct FeatureTerm {
    TermKind kind = TermKind::constant;
    std::vector<Operand> operands;  // 0, 1 or 2 entries; pairs in canonical order

    friend bool operator==(const FeatureTerm&, const FeatureTerm&) = default;

    /// Human-readable label like "x1*u2" or "sin(d1)" using 1-based channels.
    std::string label() const;
};

/// Ordered candidate-function dictionary. Term order is canonical: constant,
/// then linear terms block by block, then the upper-triangular product
/// enumeration over the combined channel sequence, then the sine families in
/// the same order when enabled.
struct LibrarySpec {
    std::size_t n_e = 0;  // embedded state dimension
    std::size_t l = 0;
    std::size_t q = 0;
    std::vector<FeatureTerm> terms;

    std::size_t p() const { return terms.size(); }

    /// Stable 64-bit hash of the canonical serialization; coefficient
    /// matrices record it so models cannot be paired with the wrong library.
    std::uint64_t fingerprint() const;

    /// Index of the constant term, or terms.size() when absent.
    std::size_t constant_index() const;

    void validate() const;
};

/// Library evaluated on snapshot data: row i of theta_T is term i across all
/// snapshot columns. column_scales holds the per-feature max-abs (1 for
/// identically-zero rows) used to normalize features inside the STLS solver.
struct FeatureMatrix {
    Matrix theta_T;  // p x m_s
    std::vector<double> column_scales;
    std::uint64_t library_fingerprint = 0;
};

/// Canonical polynomial dictionary over (embedded states, controls,
/// exogenous inputs): constant, all linear terms, and for degree 2 all
/// distinct pairwise products within and across blocks. Sine companions of
/// the linear and product families are appended when include_sine is set.
LibrarySpec build_polynomial_spec(std::size_t n_e, std::size_t l, std::size_t q, int degree,
                                  bool include_sine = false);

FeatureMatrix evaluate_library(const LibrarySpec& spec, const SnapshotSet& snap);

/// Single-time-step feature vector; bit-identical to the matching column of
/// evaluate_library.
void evaluate_row(const LibrarySpec& spec, std::span<const double> x_m,
                  std::span<const double> u, std::span<const double> d, std::span<double> out);

/// Copy the listed feature rows (and their scales) out of a full evaluation;
/// used to restrict the dictionary to a bag.
FeatureMatrix restrict_features(const FeatureMatrix& full, const std::vector<std::size_t>& keep);

}  // namespace sindy

#endif
