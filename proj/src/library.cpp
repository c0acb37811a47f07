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

#include "sindy/library.hpp"

#include <cmath>
#include <stdexcept>

#include "sindy/errors.hpp"
#include "sindy/kernels.hpp"

namespace sindy {

namespace {

const char* block_prefix(Block b) {
    switch (b) {
        case Block::state: return "x";
        case Block::control: return "u";
        case Block::exogenous: return "d";
    }
    return "?";
}

std::size_t block_dim(const LibrarySpec& spec, Block b) {
    switch (b) {
        case Block::state: return spec.n_e;
        case Block::control: return spec.l;
        case Block::exogenous: return spec.q;
    }
    return 0;
}

// Combined channel sequence: states, controls, exogenous.
Operand combined_operand(std::size_t idx, std::size_t n_e, std::size_t l) {
    if (idx < n_e) return {Block::state, idx};
    if (idx < n_e + l) return {Block::control, idx - n_e};
    return {Block::exogenous, idx - n_e - l};
}

}  // namespace

std::string FeatureTerm::label() const {
    auto op_name = [](const Operand& op) {
        return std::string(block_prefix(op.block)) + std::to_string(op.channel + 1);
    };
    switch (kind) {
        case TermKind::constant: return "1";
        case TermKind::linear: return op_name(operands[0]);
        case TermKind::product: return op_name(operands[0]) + "*" + op_name(operands[1]);
        case TermKind::sin_linear: return "sin(" + op_name(operands[0]) + ")";
        case TermKind::sin_product:
            return "sin(" + op_name(operands[0]) + "*" + op_name(operands[1]) + ")";
    }
    return "?";
}

std::uint64_t LibrarySpec::fingerprint() const {
    // FNV-1a over the canonical term encoding plus the dimensions.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 0x100000001b3ULL;
        }
    };
    mix(n_e);
    mix(l);
    mix(q);
    for (const auto& t : terms) {
        mix(static_cast<std::uint64_t>(t.kind));
        for (const auto& op : t.operands) {
            mix(static_cast<std::uint64_t>(op.block));
            mix(op.channel);
        }
    }
    return h;
}

std::size_t LibrarySpec::constant_index() const {
    for (std::size_t i = 0; i < terms.size(); ++i)
        if (terms[i].kind == TermKind::constant) return i;
    return terms.size();
}

void LibrarySpec::validate() const {
    if (terms.empty()) throw ConfigError("library spec has no terms");
    for (const auto& t : terms) {
        const std::size_t want = (t.kind == TermKind::constant)                                    ? 0
                                 : (t.kind == TermKind::linear || t.kind == TermKind::sin_linear) ? 1
                                                                                                   : 2;
        if (t.operands.size() != want) throw ConfigError("library term has wrong operand count");
        for (const auto& op : t.operands)
            if (op.channel >= block_dim(*this, op.block))
                throw ConfigError("library term operand out of range");
        if (want == 2 && t.operands[1] < t.operands[0])
            throw ConfigError("library product operands not in canonical order");
    }
}

LibrarySpec build_polynomial_spec(std::size_t n_e, std::size_t l, std::size_t q, int degree,
                                  bool include_sine) {
    if (degree != 1 && degree != 2)
        throw ConfigError("unsupported library degree " + std::to_string(degree) +
                          " (supported: 1, 2)");
    const std::size_t v = n_e + l + q;
    if (v == 0) throw ConfigError("library needs at least one channel");

    LibrarySpec spec;
    spec.n_e = n_e;
    spec.l = l;
    spec.q = q;

    spec.terms.push_back({TermKind::constant, {}});
    for (std::size_t i = 0; i < v; ++i)
        spec.terms.push_back({TermKind::linear, {combined_operand(i, n_e, l)}});
    if (degree == 2) {
        for (std::size_t i = 0; i < v; ++i)
            for (std::size_t j = i; j < v; ++j)
                spec.terms.push_back(
                    {TermKind::product, {combined_operand(i, n_e, l), combined_operand(j, n_e, l)}});
    }
    if (include_sine) {
        for (std::size_t i = 0; i < v; ++i)
            spec.terms.push_back({TermKind::sin_linear, {combined_operand(i, n_e, l)}});
        if (degree == 2) {
            for (std::size_t i = 0; i < v; ++i)
                for (std::size_t j = i; j < v; ++j)
                    spec.terms.push_back({TermKind::sin_product,
                                          {combined_operand(i, n_e, l), combined_operand(j, n_e, l)}});
        }
    }
    return spec;
}

FeatureMatrix evaluate_library(const LibrarySpec& spec, const SnapshotSet& snap) {
    spec.validate();
    if (spec.n_e != snap.n_e() || spec.l != snap.Gamma.rows() || spec.q != snap.D.rows())
        throw DataError("library spec dimensions do not match snapshot set");

    const std::size_t m_s = snap.m_s();
    FeatureMatrix fm;
    fm.theta_T = Matrix(spec.p(), m_s);
    fm.column_scales.assign(spec.p(), 1.0);
    fm.library_fingerprint = spec.fingerprint();

    auto source_row = [&](const Operand& op) -> const double* {
        switch (op.block) {
            case Block::state: return snap.X.row(op.channel);
            case Block::control: return snap.Gamma.row(op.channel);
            case Block::exogenous: return snap.D.row(op.channel);
        }
        return nullptr;
    };

    for (std::size_t i = 0; i < spec.p(); ++i) {
        const FeatureTerm& term = spec.terms[i];
        double* out = fm.theta_T.row(i);
        switch (term.kind) {
            case TermKind::constant:
                for (std::size_t j = 0; j < m_s; ++j) out[j] = 1.0;
                break;
            case TermKind::linear: {
                const double* a = source_row(term.operands[0]);
                for (std::size_t j = 0; j < m_s; ++j) out[j] = a[j];
                break;
            }
            case TermKind::product:
                kernels::hadamard(source_row(term.operands[0]), source_row(term.operands[1]), out,
                                  m_s);
                break;
            case TermKind::sin_linear: {
                const double* a = source_row(term.operands[0]);
                for (std::size_t j = 0; j < m_s; ++j) out[j] = std::sin(a[j]);
                break;
            }
            case TermKind::sin_product: {
                const double* a = source_row(term.operands[0]);
                const double* b = source_row(term.operands[1]);
                for (std::size_t j = 0; j < m_s; ++j) out[j] = std::sin(a[j] * b[j]);
                break;
            }
        }
        const double scale = kernels::max_abs(out, m_s);
        fm.column_scales[i] = scale > 0.0 ? scale : 1.0;
    }
    return fm;
}

void evaluate_row(const LibrarySpec& spec, std::span<const double> x_m, std::span<const double> u,
                  std::span<const double> d, std::span<double> out) {
    if (x_m.size() != spec.n_e || u.size() != spec.l || d.size() != spec.q)
        throw DataError("evaluate_row: input lengths do not match library dimensions");
    if (out.size() != spec.p()) throw DataError("evaluate_row: output length must equal p");

    auto value = [&](const Operand& op) -> double {
        switch (op.block) {
            case Block::state: return x_m[op.channel];
            case Block::control: return u[op.channel];
            case Block::exogenous: return d[op.channel];
        }
        return 0.0;
    };

    for (std::size_t i = 0; i < spec.p(); ++i) {
        const FeatureTerm& term = spec.terms[i];
        switch (term.kind) {
            case TermKind::constant: out[i] = 1.0; break;
            case TermKind::linear: out[i] = value(term.operands[0]); break;
            case TermKind::product: out[i] = value(term.operands[0]) * value(term.operands[1]); break;
            case TermKind::sin_linear: out[i] = std::sin(value(term.operands[0])); break;
            case TermKind::sin_product:
                out[i] = std::sin(value(term.operands[0]) * value(term.operands[1]));
                break;
        }
    }
}

FeatureMatrix restrict_features(const FeatureMatrix& full, const std::vector<std::size_t>& keep) {
    FeatureMatrix out;
    out.theta_T = Matrix(keep.size(), full.theta_T.cols());
    out.column_scales.resize(keep.size());
    out.library_fingerprint = full.library_fingerprint;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const std::size_t src = keep[i];
        if (src >= full.theta_T.rows()) throw DataError("restrict_features: index out of range");
        const double* from = full.theta_T.row(src);
        double* to = out.theta_T.row(i);
        for (std::size_t j = 0; j < full.theta_T.cols(); ++j) to[j] = from[j];
        out.column_scales[i] = full.column_scales[src];
    }
    return out;
}

}  // namespace sindy
