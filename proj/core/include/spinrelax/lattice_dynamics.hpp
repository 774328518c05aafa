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
/// Finite-displacement Hessians, acoustic sum rule, phonon modes,
/// density of states and mode-character diagnostics.

#include <array>
#include <cstddef>
#include <vector>
#include <Eigen/Dense>
#include <spinrelax/errors.hpp>
#include <spinrelax/grid.hpp>
#include <spinrelax/structures.hpp>
#include <spinrelax/toy_force_field.hpp>

namespace spinrelax {
/// Default finite-displacement amplitude [A].
inline constexpr double default_displacement_step = 0.01;
/// Modes with |hw| below this are treated as translations [meV].
inline constexpr double zero_mode_threshold = 0.05;
/// Modes closer than this in |hw| form one degenerate group [meV].
inline constexpr double degeneracy_tolerance = 1e-4;

/// Forces recorded after moving one atom along one Cartesian axis.
struct DisplacementRecord {
    std::size_t atom = 0;
    /// 0, 1, 2 for x, y, z.
    int axis = 0;
    /// +1 or -1.
    int sign = +1;
    ForceArray forces;
};

struct DisplacementForceSet {
    Supercell reference;
    /// [A]
    double step = default_displacement_step;
    std::vector<DisplacementRecord> records;

    /// Checks step > 0, force-array shapes and that both signs of every
    /// (atom, axis) are present. The error names every missing record.
    void validate() const;
};

/// Moves each atom by +-step along x, y, z and records the toy forces.
DisplacementForceSet generate_displacement_set(
    const ToyForceField& field, double step = default_displacement_step);

struct Hessian {
    /// 3N x 3N [eV / A^2], row/column 3 i + alpha.
    Eigen::MatrixXd matrix;
    /// [amu]
    std::vector<double> masses;
    /// ||H - H^T|| / ||H|| before symmetrization.
    double raw_asymmetry = 0.;
};

/// Central differences of forces,
/// H[i a, j b] = -(F_jb(+d_ia) - F_jb(-d_ia)) / (2 step),
/// followed by symmetrization.
Hessian build_hessian(const DisplacementForceSet& dset);

/// Makes the three uniform translations exact null vectors while
/// keeping the matrix symmetric: the translation subspace is projected
/// out, then each diagonal block is reset to minus the sum of the
/// off-diagonal blocks of its row.
Hessian enforce_acoustic_sum_rule(const Hessian& H);

/// max_alpha ||H t_alpha|| for unit-norm uniform translations t_alpha.
double translation_residual(const Eigen::MatrixXd& H);

struct PhononModes {
    /// |hw| [meV], in ascending order of the underlying eigenvalue.
    Eigen::VectorXd frequencies;
    /// Mass-weighted orthonormal eigenvectors, one per column.
    Eigen::MatrixXd vectors;
    /// True where the eigenvalue was negative.
    std::vector<bool> imaginary;
    /// [amu], one per atom.
    std::vector<double> masses;

    std::size_t size() const {
        return static_cast<std::size_t>(frequencies.size());
    }
    bool is_zero(std::size_t i) const {
        return frequencies[static_cast<Eigen::Index>(i)] < zero_mode_threshold;
    }
    /// Neither a translation nor imaginary.
    bool usable(std::size_t i) const {
        return !is_zero(i) && !imaginary[i];
    }
    std::size_t zero_count() const;
};

/// Eigen-decomposition of M^{-1/2} H M^{-1/2}. Imaginary modes are
/// kept and flagged; each one adds a warning when `warnings` is given.
PhononModes diagonalize(const Hessian& H, Warnings* warnings = nullptr);

/// build_hessian, enforce_acoustic_sum_rule, diagonalize.
PhononModes modes_from_forceset(const DisplacementForceSet& dset,
                                Warnings* warnings = nullptr);

/// Default DOS grid: 0 to the highest usable mode plus 6 sigma.
UniformGrid default_dos_grid(const PhononModes& modes,
                             double sigma,
                             double step = 0.1);

struct DosCurve {
    std::vector<double> energies;
    /// [states / meV]
    std::vector<double> density;

    bool operator==(const DosCurve&) const = default;
};

/// Gaussian-smeared density of states over the usable modes.
DosCurve phonon_dos(const PhononModes& modes,
                    double sigma,
                    const UniformGrid& grid);

struct ModeCharacter {
    /// Share of the squared amplitude along z, in [0, 1].
    double out_of_plane_fraction = 0.;
    /// Inverse participation ratio of the per-atom weights, in [1/N, 1].
    double localization_ipr = 0.;
    /// Share of the squared amplitude on the three vacancy neighbours.
    double neighbor_fraction = 0.;
    /// Amplitude on each vacancy neighbour relative to the reference.
    std::array<double, 3> neighbor_amplitude{};
};

/// Per-atom amplitude at which neighbor_amplitude reads 1: a mode
/// shared equally by the three neighbours and nothing else.
inline constexpr double equal_share_amplitude = 0.5773502691896258;

/// Diagnostics of a 3N displacement pattern.
ModeCharacter mode_character(const Eigen::VectorXd& pattern,
                             const VacancyRecord& vacancy,
                             double reference_amplitude = equal_share_amplitude);

/// Diagnostics of a mode, with per-atom weights averaged over its
/// degenerate group so the result does not depend on how the solver
/// mixed the partners.
ModeCharacter mode_character(const PhononModes& modes,
                             std::size_t index,
                             const VacancyRecord& vacancy,
                             double reference_amplitude = equal_share_amplitude);

/// Indices of the modes degenerate with `index`, itself included.
std::vector<std::size_t> degenerate_partners(const PhononModes& modes,
                                             std::size_t index);

/// Per-atom squared amplitude of a mode, averaged over its degenerate
/// group. Sums to 1.
std::vector<double> atom_weights(const PhononModes& modes, std::size_t index);

/// The defect mode: usable mode maximising
/// out_of_plane_fraction * neighbor_fraction, optionally restricted to
/// hw <= max_energy. Returns the first index of its degenerate group.
std::size_t locate_defect_mode(const PhononModes& modes,
                               const VacancyRecord& vacancy,
                               double max_energy = 1e300);

/// Usable mode maximising out_of_plane_fraction * localization_ipr.
std::size_t most_localized_out_of_plane_mode(const PhononModes& modes,
                                             const VacancyRecord& vacancy);
} // namespace spinrelax
