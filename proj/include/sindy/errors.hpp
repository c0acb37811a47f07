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

#ifndef SINDY_ERRORS_HPP
#define SINDY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sindy {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration: invalid flags, out-of-range parameters, unknown names.
/// CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Bad data: schema mismatches, parse failures, insufficient samples,
/// dimension mismatches, non-finite input. CLI exit code 3.
class DataError : public Error {
public:
    using Error::Error;
};

/// The ensemble gathered zero elites within the iteration budget.
/// CLI exit code 4.
class NoModelError : public Error {
public:
    using Error::Error;
};

}  // namespace sindy

#endif
