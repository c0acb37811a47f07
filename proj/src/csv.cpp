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

#include "sindy/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sindy/errors.hpp"

namespace sindy {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n\"");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n\"");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell, std::size_t data_row, const std::string& column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw DataError("non-numeric value '" + cell + "' in column '" + column + "', data row " +
                        std::to_string(data_row));
    if (!std::isfinite(value))
        throw DataError("non-finite value '" + cell + "' in column '" + column + "', data row " +
                        std::to_string(data_row));
    return value;
}

// Resolve schema names to header indices; every name must match exactly one
// column and no source column may serve two roles.
std::vector<std::size_t> resolve(const std::vector<std::string>& names,
                                 const std::map<std::string, std::size_t>& header_index,
                                 std::vector<bool>& used) {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& name : names) {
        const auto it = header_index.find(name);
        if (it == header_index.end())
            throw DataError("schema error: column '" + name + "' not found in header");
        if (used[it->second])
            throw DataError("schema error: column '" + name + "' mapped more than once");
        used[it->second] = true;
        idx.push_back(it->second);
    }
    return idx;
}

void fill_block(Matrix& block, const std::vector<std::size_t>& idx,
                const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) block(i, j) = rows[j][idx[i]];
}

}  // namespace

TimeSeries load_timeseries(const std::string& path, const CsvSchema& schema) {
    std::ifstream file(path);
    if (!file.is_open()) throw DataError("cannot open file: " + path);
    if (!(schema.sample_period > 0.0)) throw ConfigError("sample period must be positive");

    std::string line;
    if (!std::getline(file, line)) throw DataError("empty file: " + path);
    const std::vector<std::string> header = split_line(line);
    std::map<std::string, std::size_t> header_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i].empty()) continue;
        if (!header_index.emplace(header[i], i).second)
            throw DataError("schema error: duplicate header column '" + header[i] + "'");
    }

    std::vector<bool> used(header.size(), false);
    const auto state_idx = resolve(schema.states, header_index, used);
    const auto control_idx = resolve(schema.controls, header_index, used);
    const auto exog_idx = resolve(schema.exogenous, header_index, used);

    std::vector<std::vector<double>> rows;
    std::size_t data_row = 0;
    while (std::getline(file, line)) {
        if (trim(line).empty()) continue;
        ++data_row;
        const auto cells = split_line(line);
        if (cells.size() != header.size())
            throw DataError("data row " + std::to_string(data_row) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        std::vector<double> parsed(header.size(), 0.0);
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (used[c]) parsed[c] = parse_cell(cells[c], data_row, header[c]);
        rows.push_back(std::move(parsed));
    }

    if (rows.size() < 2)
        throw DataError("insufficient data: need at least 2 samples, got " +
                        std::to_string(rows.size()));

    TimeSeries ts;
    ts.sample_period = schema.sample_period;
    ts.states = Matrix(schema.states.size(), rows.size());
    ts.controls = Matrix(schema.controls.size(), rows.size());
    ts.exogenous = Matrix(schema.exogenous.size(), rows.size());
    fill_block(ts.states, state_idx, rows);
    fill_block(ts.controls, control_idx, rows);
    fill_block(ts.exogenous, exog_idx, rows);
    ts.state_names = schema.states;
    ts.control_names = schema.controls;
    ts.exogenous_names = schema.exogenous;
    ts.validate();
    return ts;
}

void save_timeseries(const std::string& path, const TimeSeries& ts) {
    std::ofstream file(path);
    if (!file.is_open()) throw DataError("cannot open file for writing: " + path);

    auto name_or = [](const std::vector<std::string>& names, std::size_t i, const char* prefix) {
        return i < names.size() && !names[i].empty() ? names[i]
                                                     : std::string(prefix) + std::to_string(i + 1);
    };

    bool first = true;
    auto emit = [&](const std::string& s) {
        if (!first) file << ',';
        file << s;
        first = false;
    };
    for (std::size_t i = 0; i < ts.n(); ++i) emit(name_or(ts.state_names, i, "y"));
    for (std::size_t i = 0; i < ts.l(); ++i) emit(name_or(ts.control_names, i, "u"));
    for (std::size_t i = 0; i < ts.q(); ++i) emit(name_or(ts.exogenous_names, i, "d"));
    file << '\n';

    char buf[40];
    auto emit_value = [&](double v, bool lead) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        if (!lead) file << ',';
        file << buf;
    };
    for (std::size_t j = 0; j < ts.m(); ++j) {
        bool lead = true;
        for (std::size_t i = 0; i < ts.n(); ++i, lead = false) emit_value(ts.states(i, j), lead);
        for (std::size_t i = 0; i < ts.l(); ++i, lead = false) emit_value(ts.controls(i, j), lead);
        for (std::size_t i = 0; i < ts.q(); ++i, lead = false) emit_value(ts.exogenous(i, j), lead);
        file << '\n';
    }
    if (!file.good()) throw DataError("write failed: " + path);
}

}  // namespace sindy
