// SPDX-License-Identifier: Apache-2.0
//
// fdpc-lab: dirty paper coding rates over fading channels with imperfect CSIT
// Copyright (C) 2026 The fdpc-lab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fdpc {

/// Invalid or inconsistent experiment configuration (bad matrix, unsupported combination, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A rate functional could not be evaluated, e.g. a numerically singular block matrix.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, std::size_t sample_index)
        : std::runtime_error(what + " (sample " + std::to_string(sample_index) + ")"),
          sample_index_(sample_index) {}

    std::size_t sample_index() const noexcept { return sample_index_; }

private:
    std::size_t sample_index_;
};

/// An inflation-factor or covariance solver hit a singular system it cannot recover from.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A bracketed 1-D search could not find its target inside the bracket.
class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fdpc
