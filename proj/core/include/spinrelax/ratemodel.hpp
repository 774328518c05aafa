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
/// Effective-mode rate model
///   Gamma(T) = sum_i A_i n_i (n_i + 1) + A_s,
/// power-law fits and comparison with reference rate tables.

#include <array>
#include <cstddef>
#include <utility>
#include <vector>
#include <spinrelax/errors.hpp>
#include <spinrelax/spinphonon.hpp>

namespace spinrelax {
/// Number of initial mode energies tried per effective mode.
inline constexpr std::size_t fit_start_count = 8;
/// Levenberg-Marquardt function-evaluation cap per start.
inline constexpr int fit_max_evaluations = 500;
/// Relative step tolerance of the fit.
inline constexpr double fit_xtol = 1e-10;

struct EffectiveMode {
    /// [Hz]
    double A = 0.;
    /// [meV]
    double hw = 0.;

    bool operator==(const EffectiveMode&) const = default;
};

struct EffectiveModeModel {
    /// Sorted by hw.
    std::vector<EffectiveMode> modes;
    /// Sample constant [Hz].
    double A_s = 0.;
    /// RMS of ln(model / data) over the fitted points.
    double residual = 0.;

    /// Throws validation_error unless A_i >= 0, hw_i > 0, A_s >= 0.
    void validate() const;
    bool operator==(const EffectiveModeModel&) const = default;
};

/// Exact model value [Hz]; A_s at T = 0.
double eval_model(const EffectiveModeModel& m, double T_K);

struct FitOptions {
    std::size_t n_modes = 1;
    bool fit_As = false;
    /// Upper end of the initial hw range [meV]; starts are log-spaced on
    /// [1, cutoff].
    double cutoff = default_cutoff;
};

/// Nonlinear least squares on ln Gamma, multi-start over hw
/// initializations. For several modes every ascending combination of
/// the start energies is tried. The best residual wins; ties go to the
/// lowest first-mode energy. Throws computation_error carrying the best
/// residual when no start converges.
EffectiveModeModel fit_effective_modes(const std::vector<double>& temperatures,
                                       const std::vector<double>& rates,
                                       const FitOptions& options = {});

EffectiveModeModel fit_effective_modes(const RateCurve& curve,
                                       const FitOptions& options = {});

struct PowerLawFit {
    double exponent = 0.;
    /// [Hz K^-exponent]
    double prefactor = 0.;
    /// [K]
    std::array<double, 2> window{150., 300.};
    /// RMS of the log-space residuals.
    double residual = 0.;
    std::size_t points = 0;
};

/// Linear regression of ln Gamma on ln T over the points with T inside
/// the closed window. Needs at least 4 points, all with Gamma > 0.
PowerLawFit fit_power_law(const std::vector<double>& temperatures,
                          const std::vector<double>& rates,
                          std::array<double, 2> window = {150., 300.});

PowerLawFit fit_power_law(const RateCurve& curve,
                          std::array<double, 2> window = {150., 300.});

/// Tabulated (T, Gamma) data, e.g. measured rates.
struct ReferenceTable {
    /// [K], strictly increasing.
    std::vector<double> temperatures;
    /// [Hz]
    std::vector<double> rates;

    bool operator==(const ReferenceTable&) const = default;
};

struct ComparisonPoint {
    double T = 0.;
    double reference = 0.;
    /// Computed curve at T, log-log interpolated [Hz]; 0 when flagged.
    double computed = 0.;
    /// computed / reference; 0 when flagged.
    double ratio = 0.;
    /// T lies outside the computed curve; not extrapolated.
    bool out_of_range = false;
};

struct ComparisonReport {
    std::vector<ComparisonPoint> points;
    /// RMS of ln(ratio) over the points in range.
    double log_rms = 0.;
    std::size_t flagged = 0;
};

/// Interpolates the computed curve at the reference temperatures and
/// reports computed / reference.
ComparisonReport compare_reference(const std::vector<double>& temperatures,
                                   const std::vector<double>& rates,
                                   const ReferenceTable& reference);

ComparisonReport compare_reference(const RateCurve& curve,
                                   const ReferenceTable& reference);
} // namespace spinrelax
