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
/// Harmonic spring model standing in for first-principles forces.
///
/// Every interaction is a harmonic term E = k/2 (sum_a c_a . u_a)^2 over
/// the displacements u_a of a few atoms, with coefficients summing to
/// zero, so the model is translationally invariant and its forces
/// vanish at the reference geometry.
///
/// - Nearest in-plane neighbours: k_bond along the bond, k_shear across
///   it within the sheet and k_flex on the relative z motion.
/// - Out-of-plane site stiffness k_z: an atom with three neighbours
///   pays (z_i - mean_j z_j)^2. Atoms next to a vacancy have only two
///   neighbours and no such term, which makes them soft out of plane.
/// - Adjacent layers: a central spring of strength k_inter to the atom
///   directly above/below. An atom sitting over a hexagon hollow (or
///   over a vacancy) is instead tied to the ring of atoms around that
///   point, k_inter shared equally among them. These oblique springs
///   are what couples in-plane and out-of-plane motion in stackings
///   without a horizontal mirror plane.
/// - Eclipsed interlayer pairs also get in-plane springs k_inter_shear
///   along x and y, so rigid sliding of one layer over another costs
///   energy even when every interlayer spring is vertical.

#include <cstddef>
#include <utility>
#include <vector>
#include <Eigen/Dense>
#include <spinrelax/structures.hpp>

namespace spinrelax {
/// Spring constants [eV / A^2]. The defaults place the out-of-plane
/// band below 40 meV; they set the scale of a toy, not physical values.
struct ToyParams {
    double k_bond = 6.0;
    double k_shear = 1.0;
    double k_z = 0.4;
    double k_flex = 0.1;
    double k_inter = 0.15;
    double k_inter_shear = 0.03;

    bool operator==(const ToyParams&) const = default;
};

/// One harmonic term. Periodic images do not appear explicitly: the
/// displacement of an image equals that of the atom.
struct HarmonicTerm {
    std::vector<std::pair<std::size_t, Eigen::Vector3d>> coefficients;
    /// [eV / A^2]
    double stiffness = 0.;
    bool interlayer = false;
};

/// Forces as an N x 3 array [eV / A].
using ForceArray = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

class ToyForceField {
public:
    ToyForceField(const Supercell& reference, const ToyParams& params);

    const Supercell& reference() const {
        return ref;
    }
    const ToyParams& params() const {
        return p;
    }
    const std::vector<HarmonicTerm>& terms() const {
        return harmonic_terms;
    }

    /// Harmonic forces on the atoms of `displaced`, which must have the
    /// same atoms in the same order as the reference.
    ForceArray forces(const Supercell& displaced) const;
    /// Analytic 3N x 3N Hessian [eV / A^2].
    Eigen::MatrixXd hessian() const;

private:
    Supercell ref;
    ToyParams p;
    std::vector<HarmonicTerm> harmonic_terms;
};

/// Convenience wrapper: forces of `displaced` under the spring model
/// built on `reference`.
ForceArray toy_forces(const Supercell& reference,
                      const Supercell& displaced,
                      const ToyParams& params);
} // namespace spinrelax
