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
/// Physical constants, unit conversions and the Bose-Einstein
/// occupation. The internal energy unit is the meV; zero-field
/// splitting quantities live in GHz and are converted at module
/// boundaries.

namespace spinrelax {
/// CODATA 2018 values, expressed in the units used internally.
struct PhysicalConstants {
    /// Reduced Planck constant [meV s].
    static constexpr double hbar_meV_s = 6.582119569509067e-13;
    /// Boltzmann constant [meV / K].
    static constexpr double kB_meV_per_K = 8.617333262145179e-2;
    /// Energy of one GHz, h * (1 GHz) [meV].
    static constexpr double ghz_to_meV = 4.135667696923859e-3;
    /// Free-electron g factor (CODATA 2018 magnitude).
    static constexpr double g_free_electron = 2.00231930436256;
    /// g factor adopted by the toy dipolar model.
    static constexpr double g_default = 2.0023;
    /// (mu0 / 4 pi) mu_B^2 / h [GHz A^3]; multiply by g^2 for the
    /// dipolar prefactor.
    static constexpr double dipolar_per_g2_GHz_A3 = 12.980131631417892;
    /// hbar^2 / (amu A^2) [meV].
    static constexpr double hbar2_per_amu_A2_meV = 4.180159279778998;
    /// hbar * sqrt(eV / (A^2 amu)) [meV]: converts sqrt of a
    /// mass-weighted force constant into a phonon energy.
    static constexpr double hbar_sqrt_eV_per_A2_amu_meV = 64.65415129579073;

    /// (mu0 / 4 pi) g^2 mu_B^2 / h [GHz A^3].
    static constexpr double dipolar_GHz_A3(double g = g_default) {
        return dipolar_per_g2_GHz_A3 * g * g;
    }
};

/// Exact SI defining constants and CODATA 2018 measured values, used
/// by the self-test that re-derives PhysicalConstants.
struct SiConstants {
    static constexpr double planck_J_s = 6.62607015e-34;
    static constexpr double elementary_charge_C = 1.602176634e-19;
    static constexpr double boltzmann_J_per_K = 1.380649e-23;
    static constexpr double bohr_magneton_J_per_T = 9.2740100783e-24;
    static constexpr double mu0_over_4pi = 1.00000000055e-7;
    static constexpr double atomic_mass_kg = 1.66053906660e-27;
};

/// Recomputes every PhysicalConstants entry from SiConstants.
/// Used by tests to guard against typos in the hard-coded table.
PhysicalConstants derived_constants_check(double& max_relative_deviation);

/// Bose-Einstein occupation n = 1 / (exp(hw / kB T) - 1).
///
/// Returns exactly 0 at T = 0. Throws domain_error for hw <= 0 or
/// T < 0; zero-frequency modes must be filtered before calling.
double bose_occupation(double hw_meV, double T_K);

/// n (n + 1), evaluated as 1 / (4 sinh^2(hw / 2 kB T)).
double bose_pair_factor(double hw_meV, double T_K);

inline double ghz_to_mev(double ghz) {
    return ghz * PhysicalConstants::ghz_to_meV;
}

inline double mev_to_ghz(double mev) {
    return mev / PhysicalConstants::ghz_to_meV;
}
} // namespace spinrelax
