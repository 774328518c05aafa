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
/// Synthetic datasets: a boron vacancy in a monolayer, AA' bilayer or
/// ABC bilayer host, its displacement force set under the toy spring
/// model, and ZFS samples from the point-dipole model evaluated along
/// the phonon modes with spin weight 1/3 on each vacancy neighbour.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>
#include <spinrelax/config.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/structures.hpp>
#include <spinrelax/zfs.hpp>

namespace spinrelax {
enum class ToyVariant { monolayer, aa_prime, abc };

/// "monolayer", "aa_prime" or "abc".
std::string_view toy_variant_label(ToyVariant v);
/// Also accepts "aaprime", "AA'", "hbn" and "rbn".
ToyVariant parse_toy_variant(std::string_view label);

/// Smallest accepted in-plane supercell size.
inline constexpr int min_toy_size = 4;

struct ToyGenOptions {
    ToyParams params;
    ResponseMultipliers response;
    /// [A]
    double displacement_step = default_displacement_step;
    /// [A sqrt(amu)]
    double derivative_step = default_derivative_step;
    /// Gaussian jitter of the reference positions [A].
    double jitter = 0.;
    std::uint64_t seed = 0;
};

/// Pristine host: n x n monolayer, or n x n x 2 stack.
Supercell toy_host(ToyVariant variant, int n);

/// Reference D the variant is calibrated to [GHz].
double toy_calibration_target(ToyVariant variant);

/// Spin sites of the vacancy in `displaced`: the three neighbours,
/// weight 1/3 each, with their displacement from `reference` scaled by
/// `response`.
std::vector<SpinSite> vacancy_spin_sites(const Supercell& reference,
                                         const Supercell& displaced,
                                         const VacancyRecord& vacancy,
                                         double response = 1.);

/// Scale that makes the equilibrium dipolar D of the variant equal
/// target_D. D is linear in the scale, so this is exact in one step.
double calibrate_dipolar_scale(ToyVariant variant,
                               double target_D,
                               double g = PhysicalConstants::g_default);

struct ToyCase {
    ToyVariant variant = ToyVariant::monolayer;
    int n = 0;
    ToyGenOptions options;
    DefectCell defect;
    DisplacementForceSet forceset;
    PhononModes modes;
    ZfsSampleSet samples;
    double dipolar_scale = 1.;
    double response = 1.;
    ZfsSummary equilibrium;
    Warnings warnings;
};

/// Deterministic in (variant, n, options). Throws validation_error for
/// n < min_toy_size.
ToyCase generate_case(ToyVariant variant, int n, const ToyGenOptions& options = {});

struct ToyCaseFiles {
    std::filesystem::path forceset;
    std::filesystem::path zfs_samples;
};

/// Writes "<stem>_forceset.json" and "<stem>_zfs_samples.json" into dir.
ToyCaseFiles write_case_files(const ToyCase& c,
                              const std::filesystem::path& dir,
                              const std::string& stem);
} // namespace spinrelax
