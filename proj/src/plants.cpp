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

#include "sindy/plants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sindy/errors.hpp"
#include "sindy/rng.hpp"

namespace sindy::plants {

namespace {

Operand st(std::size_t ch) { return {Block::state, ch}; }
Operand ct(std::size_t ch) { return {Block::control, ch}; }
Operand ex(std::size_t ch) { return {Block::exogenous, ch}; }

PlantTerm constant(double c) { return {{TermKind::constant, {}}, c}; }
PlantTerm linear(Operand a, double c) { return {{TermKind::linear, {a}}, c}; }
PlantTerm product(Operand a, Operand b, double c) {
    if (b < a) std::swap(a, b);
    return {{TermKind::product, {a, b}}, c};
}

PlantSpec make_linear1d() {
    PlantSpec p;
    p.name = "linear1d";
    p.state_dim = 1;
    p.control_dim = 1;
    p.exog_dim = 0;
    p.memory = 0;
    p.rows = {{linear(st(0), 0.9), linear(ct(0), 0.1)}};
    p.state_ranges = {{-5.0, 5.0}};
    p.control_ranges = {{-1.0, 1.0}};
    p.control_hold = {20};
    p.x0 = {0.0};
    p.state_names = {"y1"};
    p.control_names = {"u1"};
    return p;
}

// Two-output surrogate with the paper-style interface (2 controls, 2
// exogenous inputs), second-order oscillatory linear cores and quadratic
// cross-coupling. All true terms live inside the degree-2, delay-1 library.
// Coefficients are frozen; the construction tests assert boundedness and
// exact identifiability.
PlantSpec make_surrogate_airpath() {
    PlantSpec p;
    p.name = "surrogate-airpath";
    p.state_dim = 2;
    p.control_dim = 2;
    p.exog_dim = 2;
    p.memory = 1;

    // Embedded state channels: 0 = y1(t), 1 = y2(t), 2 = y1(t-1), 3 = y2(t-1).
    p.rows = {
        {
            constant(70.5),
            linear(st(0), 1.6314),
            linear(st(2), -0.81),
            linear(st(1), 0.028),
            linear(ct(0), 0.45),
            linear(ex(1), 13.0),
            product(ct(0), ct(1), 0.030),
        },
        {
            constant(-158.0),
            linear(st(1), 1.30),
            linear(st(3), -0.5625),
            linear(st(0), -0.05),
            linear(ct(1), 2.00),
            linear(ex(0), 3.20),
            product(st(0), ct(1), 0.002),
        },
    };

    p.state_ranges = {{-2000.0, 4500.0}, {-1200.0, 1900.0}};
    p.control_ranges = {{30.0, 90.0}, {20.0, 70.0}};
    p.exog_ranges = {{15.0, 55.0}, {0.8, 3.2}};
    p.control_hold = {25, 40};
    p.exog_hold = {60, 80};
    p.x0 = {1200.0, 350.0};
    p.state_names = {"y1", "y2"};
    p.control_names = {"u1", "u2"};
    p.exog_names = {"d1", "d2"};
    return p;
}

const std::map<std::string, PlantSpec>& registry() {
    static const std::map<std::string, PlantSpec> plants = {
        {"linear1d", make_linear1d()},
        {"surrogate-airpath", make_surrogate_airpath()},
    };
    return plants;
}

double term_value(const PlantTerm& pt, const std::vector<double>& x_m, const double* u,
                  const double* d) {
    auto value = [&](const Operand& op) {
        switch (op.block) {
            case Block::state: return x_m[op.channel];
            case Block::control: return u[op.channel];
            case Block::exogenous: return d[op.channel];
        }
        return 0.0;
    };
    switch (pt.term.kind) {
        case TermKind::constant: return pt.coefficient;
        case TermKind::linear: return pt.coefficient * value(pt.term.operands[0]);
        case TermKind::product:
            return pt.coefficient * value(pt.term.operands[0]) * value(pt.term.operands[1]);
        default: throw ConfigError("plant terms must be polynomial");
    }
}

}  // namespace

const PlantSpec& get_plant(const std::string& name) {
    const auto& plants = registry();
    const auto it = plants.find(name);
    if (it == plants.end()) {
        std::ostringstream msg;
        msg << "unknown plant '" << name << "'; available:";
        for (const auto& [key, value] : plants) msg << " " << key;
        throw ConfigError(msg.str());
    }
    return it->second;
}

std::vector<std::string> plant_names() {
    std::vector<std::string> names;
    for (const auto& [key, value] : registry()) names.push_back(key);
    return names;
}

TimeSeries simulate_plant(const PlantSpec& spec, const Matrix& initial_window,
                          const Matrix& controls, const Matrix& exogenous, std::string* warning) {
    const std::size_t n = spec.state_dim;
    if (initial_window.rows() != n || initial_window.cols() != spec.memory + 1)
        throw DataError("simulate_plant: initial window must be n x (memory+1)");
    if (controls.rows() != spec.control_dim || exogenous.rows() != spec.exog_dim)
        throw DataError("simulate_plant: input dimensions do not match plant");
    const std::size_t horizon = controls.cols();
    if (exogenous.cols() != horizon)
        throw DataError("simulate_plant: control/exogenous lengths differ");
    if (horizon < spec.memory + 2)
        throw DataError("simulate_plant: horizon shorter than memory+2");

    if (warning) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= spec.memory; ++j) {
                const double v = initial_window(i, j);
                if (v < spec.state_ranges[i].first || v > spec.state_ranges[i].second) {
                    *warning = "initial state out of operating range for channel " +
                               std::to_string(i + 1);
                }
            }
        }
    }

    TimeSeries ts;
    ts.sample_period = spec.sample_period;
    ts.states = Matrix(n, horizon);
    ts.controls = controls;
    ts.exogenous = exogenous;
    ts.state_names = spec.state_names;
    ts.control_names = spec.control_names;
    ts.exogenous_names = spec.exog_names;

    // Replay the window (oldest first), then roll the update rule.
    for (std::size_t j = 0; j <= spec.memory; ++j)
        for (std::size_t i = 0; i < n; ++i) ts.states(i, j) = initial_window(i, j);

    std::vector<double> x_m(n * (spec.memory + 1));
    std::vector<double> u(spec.control_dim);
    std::vector<double> d(spec.exog_dim);
    for (std::size_t t = spec.memory; t + 1 < horizon; ++t) {
        for (std::size_t b = 0; b <= spec.memory; ++b)
            for (std::size_t i = 0; i < n; ++i) x_m[b * n + i] = ts.states(i, t - b);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = controls(i, t);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = exogenous(i, t);
        for (std::size_t i = 0; i < n; ++i) {
            double next = 0.0;
            for (const PlantTerm& pt : spec.rows[i]) next += term_value(pt, x_m, u.data(), d.data());
            if (!std::isfinite(next))
                throw DataError("plant rollout produced a non-finite state at step " +
                                std::to_string(t + 1));
            ts.states(i, t + 1) = next;
        }
    }
    return ts;
}

std::vector<double> excitation_signal(ExcitationKind kind, double lo, double hi,
                                      std::size_t hold_samples, std::uint64_t seed,
                                      std::size_t horizon) {
    if (!(hi > lo)) throw ConfigError("excitation: empty range");
    if (hold_samples < 1) throw ConfigError("excitation: hold_samples must be >= 1");
    if (horizon < 1) throw ConfigError("excitation: horizon must be >= 1");

    Rng rng(seed);
    std::vector<double> out(horizon);
    if (kind == ExcitationKind::steps) {
        double level = rng.uniform(lo, hi);
        for (std::size_t t = 0; t < horizon; ++t) {
            if (t > 0 && t % hold_samples == 0) level = rng.uniform(lo, hi);
            out[t] = level;
        }
    } else {
        // One-pole smoothing of uniform white noise; convex updates keep the
        // signal inside [lo, hi].
        const double alpha = 1.0 / static_cast<double>(hold_samples);
        double y = rng.uniform(lo, hi);
        for (std::size_t t = 0; t < horizon; ++t) {
            out[t] = y;
            y += alpha * (rng.uniform(lo, hi) - y);
        }
    }
    return out;
}

std::pair<Matrix, Matrix> default_excitation(const PlantSpec& spec, std::uint64_t seed,
                                             std::size_t horizon) {
    Matrix controls(spec.control_dim, horizon);
    Matrix exogenous(spec.exog_dim, horizon);
    for (std::size_t i = 0; i < spec.control_dim; ++i) {
        const auto sig =
            excitation_signal(ExcitationKind::steps, spec.control_ranges[i].first,
                              spec.control_ranges[i].second, spec.control_hold[i],
                              derive_seed(seed, 100 + i), horizon);
        for (std::size_t t = 0; t < horizon; ++t) controls(i, t) = sig[t];
    }
    for (std::size_t i = 0; i < spec.exog_dim; ++i) {
        const auto sig = excitation_signal(ExcitationKind::steps, spec.exog_ranges[i].first,
                                           spec.exog_ranges[i].second, spec.exog_hold[i],
                                           derive_seed(seed, 200 + i), horizon);
        for (std::size_t t = 0; t < horizon; ++t) exogenous(i, t) = sig[t];
    }
    return {std::move(controls), std::move(exogenous)};
}

TimeSeries generate_dataset(const PlantSpec& spec, std::uint64_t seed, std::size_t horizon,
                            std::string* warning) {
    auto [controls, exogenous] = default_excitation(spec, seed, horizon);
    Matrix window(spec.state_dim, spec.memory + 1);
    for (std::size_t i = 0; i < spec.state_dim; ++i)
        for (std::size_t j = 0; j <= spec.memory; ++j) window(i, j) = spec.x0[i];
    return simulate_plant(spec, window, controls, exogenous, warning);
}

CoefficientMatrix true_embedded_coefficients(const PlantSpec& spec, const LibrarySpec& lib,
                                             const CenteringOffsets& offsets) {
    const std::size_t n = spec.state_dim;
    const std::size_t sigma_x = lib.n_e / n - 1;
    if (lib.n_e != n * (sigma_x + 1) || sigma_x < spec.memory)
        throw DataError("library embedding cannot express the plant's memory");
    if (lib.l != spec.control_dim || lib.q != spec.exog_dim)
        throw DataError("library input dimensions do not match plant");

    // Canonical term -> column lookup.
    std::map<std::pair<int, std::vector<std::pair<int, std::size_t>>>, std::size_t> index;
    for (std::size_t i = 0; i < lib.terms.size(); ++i) {
        std::vector<std::pair<int, std::size_t>> ops;
        for (const auto& op : lib.terms[i].operands)
            ops.emplace_back(static_cast<int>(op.block), op.channel);
        index[{static_cast<int>(lib.terms[i].kind), ops}] = i;
    }
    auto column_of = [&](const FeatureTerm& t) {
        std::vector<std::pair<int, std::size_t>> ops;
        for (const auto& op : t.operands) ops.emplace_back(static_cast<int>(op.block), op.channel);
        const auto it = index.find({static_cast<int>(t.kind), ops});
        if (it == index.end())
            throw DataError("plant term '" + t.label() + "' is not expressible in the library");
        return it->second;
    };
    const std::size_t constant_col = column_of({TermKind::constant, {}});

    auto mean_of = [&](const Operand& op) {
        switch (op.block) {
            case Block::state: return offsets.state_means[op.channel % n];
            case Block::control: return offsets.control_means[op.channel];
            case Block::exogenous: return offsets.exogenous_means[op.channel];
        }
        return 0.0;
    };

    CoefficientMatrix out;
    out.xi = Matrix(lib.n_e, lib.p());
    out.library_fingerprint = lib.fingerprint();

    // Head block: the plant's own rows, re-expressed around the offsets.
    for (std::size_t i = 0; i < n; ++i) {
        double* row = out.xi.row(i);
        for (const PlantTerm& pt : spec.rows[i]) {
            switch (pt.term.kind) {
                case TermKind::constant: row[constant_col] += pt.coefficient; break;
                case TermKind::linear:
                    row[column_of(pt.term)] += pt.coefficient;
                    row[constant_col] += pt.coefficient * mean_of(pt.term.operands[0]);
                    break;
                case TermKind::product: {
                    const Operand a = pt.term.operands[0];
                    const Operand b = pt.term.operands[1];
                    row[column_of(pt.term)] += pt.coefficient;
                    row[column_of({TermKind::linear, {a}})] += pt.coefficient * mean_of(b);
                    row[column_of({TermKind::linear, {b}})] += pt.coefficient * mean_of(a);
                    row[constant_col] += pt.coefficient * mean_of(a) * mean_of(b);
                    break;
                }
                default: throw ConfigError("plant terms must be polynomial");
            }
        }
        row[constant_col] -= offsets.state_means[i];  // centered target
    }

    // Delayed blocks shift: block b of x_m(t+1) is block b-1 of x_m(t).
    for (std::size_t b = 1; b <= sigma_x; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t col = column_of({TermKind::linear, {st((b - 1) * n + i)}});
            out.xi((b * n) + i, col) = 1.0;
        }
    }

    out.support_count = CoefficientMatrix::count_nonzeros(out.xi);
    return out;
}

}  // namespace sindy::plants
