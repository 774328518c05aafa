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

#include <spinrelax/units.hpp>
#include <spinrelax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spinrelax {
namespace {
double rel_dev(double a, double b) {
    return std::abs(a - b) / std::abs(b);
}
} // namespace

PhysicalConstants derived_constants_check(double& max_relative_deviation) {
    using S = SiConstants;
    using P = PhysicalConstants;
    const double hbar = S::planck_J_s / (2. * std::numbers::pi);
    const double meV = 1e-3 * S::elementary_charge_C;

    const double hbar_meV_s = hbar / meV;
    const double kB = S::boltzmann_J_per_K / meV;
    const double ghz = S::planck_J_s * 1e9 / meV;
    // J m^3 -> GHz A^3: divide by h and 1e9, multiply by 1e30.
    const double dip = S::mu0_over_4pi * S::bohr_magneton_J_per_T *
                       S::bohr_magneton_J_per_T / S::planck_J_s * 1e21;
    const double hb2 = hbar * hbar / (S::atomic_mass_kg * 1e-20) / meV;
    const double hw_unit =
        hbar_meV_s *
        std::sqrt(S::elementary_charge_C / (1e-20 * S::atomic_mass_kg));

    max_relative_deviation = std::max({rel_dev(P::hbar_meV_s, hbar_meV_s),
                                       rel_dev(P::kB_meV_per_K, kB),
                                       rel_dev(P::ghz_to_meV, ghz),
                                       rel_dev(P::dipolar_per_g2_GHz_A3, dip),
                                       rel_dev(P::hbar2_per_amu_A2_meV, hb2),
                                       rel_dev(P::hbar_sqrt_eV_per_A2_amu_meV,
                                               hw_unit)});
    return P{};
}

double bose_occupation(double hw_meV, double T_K) {
    if (!(hw_meV > 0.))
        throw domain_error("bose_occupation: phonon energy must be positive, "
                           "got " +
                           std::to_string(hw_meV) + " meV");
    if (!(T_K >= 0.))
        throw domain_error("bose_occupation: negative temperature " +
                           std::to_string(T_K) + " K");
    if (T_K == 0.)
        return 0.;
    return 1. / std::expm1(hw_meV / (PhysicalConstants::kB_meV_per_K * T_K));
}

double bose_pair_factor(double hw_meV, double T_K) {
    if (!(hw_meV > 0.))
        throw domain_error("bose_pair_factor: phonon energy must be "
                           "positive, got " +
                           std::to_string(hw_meV) + " meV");
    if (!(T_K >= 0.))
        throw domain_error("bose_pair_factor: negative temperature " +
                           std::to_string(T_K) + " K");
    if (T_K == 0.)
        return 0.;
    const double s = std::sinh(
        0.5 * hw_meV / (PhysicalConstants::kB_meV_per_K * T_K));
    // sinh overflows to inf for very cold modes, giving exactly 0.
    return 0.25 / (s * s);
}
} // namespace spinrelax
