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
/// Zero-field-splitting tensors: principal-axis summary, a point-dipole
/// model on weighted spin sites, and finite-difference derivatives of D
/// along phonon normal coordinates.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <spinrelax/errors.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/spin.hpp>
#include <spinrelax/structures.hpp>
#include <spinrelax/units.hpp>

namespace spinrelax {
/// Default step along a normal coordinate [A sqrt(amu)].
inline constexpr double default_derivative_step = 0.1;
/// Largest mode displacement accepted without the force flag
/// [A sqrt(amu)].
inline constexpr double max_mode_displacement = 1.0;

struct ZfsSummary {
    /// Axial constant 3/2 lambda_z [GHz].
    double D = 0.;
    /// Rhombic constant (lambda_x - lambda_y) / 2 >= 0 [GHz].
    double E = 0.;
    /// Principal values (lambda_x, lambda_y, lambda_z) [GHz].
    Eigen::Vector3d principal_values = Eigen::Vector3d::Zero();
    /// Columns are the x, y, z principal axes (a proper rotation).
    Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
};

/// Principal-axis summary. z is the axis of the largest |lambda|; when
/// two values tie in magnitude the positive one is taken. x and y are
/// ordered so that lambda_x >= lambda_y. The zero tensor gives D = E = 0
/// and identity axes.
ZfsSummary diagonalize_dtensor(const DTensor& D);

/// diag(-D/3 + E, -D/3 - E, 2D/3), the traceless tensor with constants
/// D and E along the Cartesian axes.
DTensor axial_dtensor(double D_const, double E_const = 0.);

/// One entry of the supercell-size convergence series of D for the
/// boron vacancy.
struct ZfsReferenceEntry {
    /// "monolayer", "hBN" or "rBN".
    std::string host;
    /// Supercell label, e.g. "6x6x2".
    std::string supercell;
    /// [GHz]
    double D = 0.;
};

/// Reference convergence values of D for the three hosts.
const std::vector<ZfsReferenceEntry>& zfs_reference_table();

/// Converged reference D [GHz] used to calibrate each toy host:
/// the largest monolayer cell and the two-layer stacked cells.
double calibration_target(Stacking stacking);
double calibration_target_monolayer();

struct SpinSite {
    /// [A]
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double weight = 0.;
};

/// Point-dipole spin-spin tensor
///   D_ab = scale C sum_{i<j} w_i w_j (r^2 delta_ab - 3 r_a r_b) / r^5
/// with C = (mu0 / 4 pi) g^2 mu_B^2 / h. Requires at least two sites,
/// weights summing to 1 and all distances above 0.1 A.
DTensor dipolar_dtensor(const std::vector<SpinSite>& sites,
                        double scale = 1.,
                        double g = PhysicalConstants::g_default);

/// Moves atom i by amount e_i / sqrt(m_i), e being the mass-weighted
/// eigenvector of `mode`. |amount| above max_mode_displacement throws
/// unless `force` is set.
Supercell displace_along_mode(const Supercell& cell,
                              const PhononModes& modes,
                              std::size_t mode,
                              double amount,
                              bool force = false);

struct ZfsSample {
    std::size_t mode = 0;
    /// [meV]
    double hw = 0.;
    DTensor D0;
    DTensor Dplus;
    DTensor Dminus;

    bool operator==(const ZfsSample&) const = default;
};

struct ZfsSampleSet {
    /// [A sqrt(amu)]
    double step = default_derivative_step;
    std::vector<ZfsSample> samples;

    /// Checks step > 0 and that no mode appears twice.
    void validate() const;
    bool operator==(const ZfsSampleSet&) const = default;
};

struct ModeDerivative {
    std::size_t mode = 0;
    /// [meV]
    double hw = 0.;
    /// dD/dq in the dimensionless coordinate [GHz].
    DTensor first;
    /// d2D/dq2 in the dimensionless coordinate [GHz].
    DTensor second;
    /// Optional irreducible-representation label.
    std::string symmetry;

    bool operator==(const ModeDerivative&) const = default;
};

struct DTensorDerivatives {
    std::vector<ModeDerivative> modes;
    /// Modes above this were dropped [meV].
    double cutoff = std::numeric_limits<double>::infinity();

    bool operator==(const DTensorDerivatives&) const = default;
};

/// Central differences in the mass-weighted coordinate,
///   dD/dR = (D(+d) - D(-d)) / (2 d),
///   d2D/dR2 = (D(+d) - 2 D(0) + D(-d)) / d^2,
/// converted to the dimensionless coordinate with the mode energy.
/// Every usable mode with hw <= cutoff must have a sample; zero and
/// imaginary modes are skipped with a warning. Sample energies must
/// agree with the modes.
DTensorDerivatives extract_derivatives(
    const ZfsSampleSet& samples,
    const PhononModes& modes,
    double cutoff = std::numeric_limits<double>::infinity(),
    Warnings* warnings = nullptr);
} // namespace spinrelax
