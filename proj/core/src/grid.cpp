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

#include <spinrelax/grid.hpp>
#include <spinrelax/errors.hpp>

#include <cmath>

namespace spinrelax {
std::vector<double> UniformGrid::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = (*this)[i];
    return v;
}

UniformGrid UniformGrid::covering(double lo, double hi, double step) {
    if (!(step > 0.))
        throw validation_error("grid step must be positive");
    if (!(hi >= lo))
        throw validation_error("grid upper bound below lower bound");
    // The 1e-9 slack keeps hi itself on the grid when (hi - lo) / step is
    // an integer up to rounding.
    const auto intervals =
        static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-9));
    return {lo, step, intervals + 1};
}

std::vector<double> spaced_points(double lo,
                                  double hi,
                                  std::size_t count,
                                  bool logarithmic) {
    if (count == 0)
        throw validation_error("point count must be positive");
    if (!(hi >= lo))
        throw validation_error("upper bound below lower bound");
    if (logarithmic && !(lo > 0.))
        throw validation_error("logarithmic spacing needs a positive lower "
                               "bound");
    std::vector<double> v(count, lo);
    if (count == 1)
        return v;
    const double a = logarithmic ? std::log(lo) : lo;
    const double b = logarithmic ? std::log(hi) : hi;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) /
                                 static_cast<double>(count - 1);
        v[i] = logarithmic ? std::exp(t) : t;
    }
    v.front() = lo;
    v.back() = hi;
    return v;
}

double trapezoid(const std::vector<double>& y, double step) {
    if (y.size() < 2)
        return 0.;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        s += y[i];
    return s * step;
}
} // namespace spinrelax
