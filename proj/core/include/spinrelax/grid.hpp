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

#include <cstddef>
#include <vector>

namespace spinrelax {
/// Uniform 1D grid: start, start + step, ..., start + (count - 1) step.
struct UniformGrid {
    double start = 0.;
    double step = 1.;
    std::size_t count = 0;

    double operator[](std::size_t i) const {
        return start + static_cast<double>(i) * step;
    }
    double last() const {
        return count == 0 ? start : (*this)[count - 1];
    }
    std::vector<double> values() const;

    /// Smallest grid from `lo` with spacing `step` whose last point is
    /// >= hi. Throws validation_error for step <= 0 or hi < lo.
    static UniformGrid covering(double lo, double hi, double step);

    bool operator==(const UniformGrid&) const = default;
};

/// `count` points from lo to hi inclusive, evenly spaced on a linear or
/// logarithmic scale. count == 1 gives {lo}.
std::vector<double> spaced_points(double lo,
                                  double hi,
                                  std::size_t count,
                                  bool logarithmic);

/// Trapezoidal integral of samples taken on a uniform grid.
double trapezoid(const std::vector<double>& y, double step);
} // namespace spinrelax
