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

#ifndef SINDY_CSV_HPP
#define SINDY_CSV_HPP

#include <string>
#include <vector>

#include "sindy/timeseries.hpp"

namespace sindy {

/// Column-to-role mapping for CSV ingestion. Each listed name must match a
/// header column exactly once; unlisted columns are ignored.
struct CsvSchema {
    std::vector<std::string> states;
    std::vector<std::string> controls;
    std::vector<std::string> exogenous;
    double sample_period = 0.1;
};

/// Read a header + one-sample-per-row CSV into a TimeSeries.
/// Throws DataError on schema violations, non-numeric or non-finite cells
/// (reported with their 1-based data row), or fewer than 2 data rows.
TimeSeries load_timeseries(const std::string& path, const CsvSchema& schema);

/// Write the series in the same format load_timeseries reads: header row of
/// channel names (states, controls, exogenous in order), one sample per row.
void save_timeseries(const std::string& path, const TimeSeries& ts);

}  // namespace sindy

#endif
