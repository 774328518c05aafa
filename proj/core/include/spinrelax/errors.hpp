// Copyright 2026 The spinrelax Project Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#pragma once

/// @file
///
/// Exception hierarchy shared by every module. Validation problems
/// (bad input, malformed files, violated preconditions) and
/// computation problems (solver failures, non-convergence) are kept
/// apart so that the command-line tool can map them onto distinct
/// exit codes.

#include <stdexcept>
#include <string>
#include <vector>

namespace spinrelax {
/// Input or precondition violation.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& msg)
        : std::invalid_argument(msg) {
    }
};

/// Argument outside the mathematical domain of a function
/// (e.g. a non-positive phonon energy passed to a Bose factor).
class domain_error : public validation_error {
public:
    explicit domain_error(const std::string& msg) : validation_error(msg) {
    }
};

/// A numerical procedure failed to produce a usable result.
class computation_error : public std::runtime_error {
public:
    explicit computation_error(const std::string& msg)
        : std::runtime_error(msg) {
    }
};

/// Non-fatal anomalies collected along a computation.
using Warnings = std::vector<std::string>;
} // namespace spinrelax
