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

#include "sindy/linalg.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"

namespace sindy {

namespace {

// dlarfg-style reflector for v = [alpha; x]: returns (beta, tau) and scales x
// in place so that H*[alpha; x] = [beta; 0] with H = I - tau*[1; x][1; x]^T.
struct Reflector {
    double beta;
    double tau;
};

Reflector make_reflector(double alpha, double* x, std::size_t len) {
    const double xnorm = std::sqrt(kernels::sum_sq(x, len));
    if (xnorm == 0.0) return {alpha, 0.0};
    double beta = std::hypot(alpha, xnorm);
    if (alpha > 0.0) beta = -beta;
    const double tau = (beta - alpha) / beta;
    const double inv = 1.0 / (alpha - beta);
    kernels::scale_inplace(x, inv, len);
    return {beta, tau};
}

}  // namespace

LeastSquares::LeastSquares(std::vector<double> a_colmajor, std::size_t m, std::size_t n)
    : a_(std::move(a_colmajor)), m_(m), n_(n) {
    if (m_ == 0 || n_ == 0) throw DataError("least squares: empty matrix");
    if (a_.size() != m_ * n_) throw DataError("least squares: buffer size mismatch");
    perm_.resize(n_);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    factor();
    if (rank_ < n_) complete_decomposition();
}

void LeastSquares::factor() {
    kmax_ = std::min(m_, n_);
    tau_.assign(kmax_, 0.0);

    for (std::size_t k = 0; k < kmax_; ++k) {
        // Pivot: trailing column with the largest remaining norm, recomputed
        // exactly (cheap at our column counts and immune to downdate drift).
        std::size_t pivot = k;
        double best = -1.0;
        for (std::size_t j = k; j < n_; ++j) {
            const double norm2 = kernels::sum_sq(col(j) + k, m_ - k);
            if (norm2 > best) {
                best = norm2;
                pivot = j;
            }
        }
        if (pivot != k) {
            double* ck = col(k);
            double* cp = col(pivot);
            for (std::size_t i = 0; i < m_; ++i) std::swap(ck[i], cp[i]);
            std::swap(perm_[k], perm_[pivot]);
        }
        if (best <= 0.0) {
            kmax_ = k;  // trailing block is exactly zero
            break;
        }

        double* ck = col(k);
        const Reflector h = make_reflector(ck[k], ck + k + 1, m_ - k - 1);
        ck[k] = h.beta;
        tau_[k] = h.tau;
        if (h.tau != 0.0) {
            for (std::size_t j = k + 1; j < n_; ++j) {
                double* cj = col(j);
                double w = cj[k] + kernels::dot(ck + k + 1, cj + k + 1, m_ - k - 1);
                w *= h.tau;
                cj[k] -= w;
                kernels::axpy(-w, ck + k + 1, cj + k + 1, m_ - k - 1);
            }
        }
    }
    tau_.resize(kmax_);

    // Numerical rank: leading diagonal run above eps * max(m,n) * |R_00|.
    rank_ = 0;
    if (kmax_ > 0) {
        const double r00 = std::fabs(col(0)[0]);
        const double tol =
            r00 * static_cast<double>(std::max(m_, n_)) * std::numeric_limits<double>::epsilon();
        for (std::size_t k = 0; k < kmax_; ++k) {
            if (!(std::fabs(col(k)[k]) > tol)) break;
            ++rank_;
        }
    }
}

// Annihilate R12 with reflectors from the right, turning R's leading rank_
// rows into [T 0] (T upper triangular). Reflector i is supported on columns
// {i} and [n_excess..), with its tail stored in the slots it zeroed.
void LeastSquares::complete_decomposition() {
    tau_z_.assign(rank_, 0.0);
    const std::size_t r = rank_;
    if (r == 0 || r == n_) return;
    const std::size_t tail = n_ - r;

    std::vector<double> ztail(tail);
    for (std::size_t i = r; i-- > 0;) {
        // Gather row i's tail R[i, r..n) (strided across columns).
        for (std::size_t j = 0; j < tail; ++j) ztail[j] = col(r + j)[i];
        const Reflector h = make_reflector(col(i)[i], ztail.data(), tail);
        col(i)[i] = h.beta;
        tau_z_[i] = h.tau;
        for (std::size_t j = 0; j < tail; ++j) col(r + j)[i] = ztail[j];
        if (h.tau == 0.0) continue;
        // Apply to the rows above.
        for (std::size_t t = 0; t < i; ++t) {
            double w = col(i)[t];
            for (std::size_t j = 0; j < tail; ++j) w += col(r + j)[i] * col(r + j)[t];
            w *= h.tau;
            col(i)[t] -= w;
            for (std::size_t j = 0; j < tail; ++j) col(r + j)[t] -= w * col(r + j)[i];
        }
    }
}

std::vector<double> LeastSquares::solve(std::span<const double> b) const {
    if (b.size() != m_) throw DataError("least squares: rhs length mismatch");
    std::vector<double> c(b.begin(), b.end());

    // c = Q^T b.
    for (std::size_t k = 0; k < kmax_; ++k) {
        if (tau_[k] == 0.0) continue;
        const double* v = col(k) + k + 1;
        double w = c[k] + kernels::dot(v, c.data() + k + 1, m_ - k - 1);
        w *= tau_[k];
        c[k] -= w;
        kernels::axpy(-w, v, c.data() + k + 1, m_ - k - 1);
    }

    const std::size_t r = rank_;
    std::vector<double> y(n_, 0.0);
    if (r > 0) {
        // Back-substitute T y1 = c1 (T is R's leading triangle after the
        // right-reflector pass; identical to R11 in the full-rank case).
        for (std::size_t i = r; i-- > 0;) {
            double s = c[i];
            for (std::size_t j = i + 1; j < r; ++j) s -= col(j)[i] * y[j];
            y[i] = s / col(i)[i];
        }
        // Expand through the right reflectors (minimum-norm completion).
        if (r < n_ && !tau_z_.empty()) {
            const std::size_t tail = n_ - r;
            for (std::size_t i = 0; i < r; ++i) {
                if (tau_z_[i] == 0.0) continue;
                double w = y[i];
                for (std::size_t j = 0; j < tail; ++j) w += col(r + j)[i] * y[r + j];
                w *= tau_z_[i];
                y[i] -= w;
                for (std::size_t j = 0; j < tail; ++j) y[r + j] -= w * col(r + j)[i];
            }
        }
    }

    std::vector<double> x(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) x[perm_[j]] = y[j];
    return x;
}

}  // namespace sindy
