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

#ifndef SINDY_LINALG_HPP
#define SINDY_LINALG_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace sindy {

/// Dense least squares via Householder QR with column pivoting. When the
/// matrix is numerically rank deficient the factorization is completed to a
/// complete orthogonal decomposition and solve() returns the minimum-norm
/// solution; otherwise it returns the unique least-squares solution.
///
/// The matrix is passed column-major (column j occupies a[j*m .. j*m+m)) and
/// is factored once; solve() can then be applied to any number of right-hand
/// sides.
class LeastSquares {
public:
    LeastSquares(std::vector<double> a_colmajor, std::size_t m, std::size_t n);

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::size_t rank() const { return rank_; }
    bool rank_deficient() const { return rank_ < n_; }

    /// Least-squares (minimum-norm when rank deficient) solution for one
    /// right-hand side of length m. Returns x of length n.
    std::vector<double> solve(std::span<const double> b) const;

private:
    double* col(std::size_t j) { return a_.data() + j * m_; }
    const double* col(std::size_t j) const { return a_.data() + j * m_; }

    void factor();
    void complete_decomposition();

    std::vector<double> a_;       // packed factorization (R on top, reflectors below)
    std::size_t m_ = 0, n_ = 0;
    std::size_t kmax_ = 0;        // number of left reflectors generated
    std::size_t rank_ = 0;
    std::vector<double> tau_;     // left reflector scales
    std::vector<double> tau_z_;   // right reflector scales (rank-deficient case)
    std::vector<std::size_t> perm_;
};

}  // namespace sindy

#endif
