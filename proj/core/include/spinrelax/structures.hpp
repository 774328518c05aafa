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
/// Boron nitride supercells: the honeycomb monolayer, AA' (hBN-like)
/// and ABC (rBN-like) stackings, and the boron vacancy.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>
#include <Eigen/Dense>

namespace spinrelax {
enum class Species { B, N };

std::string_view species_label(Species s);
/// Throws validation_error for anything but "B" or "N".
Species parse_species(std::string_view label);
/// Standard atomic masses [amu]: B 10.811, N 14.007.
double default_mass(Species s);

struct Atom {
    Species species = Species::B;
    /// [amu]
    double mass = 0.;
    /// Cartesian position [A].
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    int layer_index = 0;

    bool operator==(const Atom&) const = default;
};

/// A periodic (or partially periodic) cell of atoms.
struct Supercell {
    /// Cartesian lattice vectors a, b, c [A].
    std::array<Eigen::Vector3d, 3> lattice_vectors{
        Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
        Eigen::Vector3d::UnitZ()};
    /// Which of a, b, c are periodic.
    std::array<bool, 3> periodic{true, true, true};
    std::vector<Atom> atoms;

    std::size_t size() const {
        return atoms.size();
    }
    /// Matrix with the lattice vectors as columns.
    Eigen::Matrix3d lattice_matrix() const;
    /// Shortest periodic image of a separation vector. Ties between
    /// equally short images keep the first one found, scanning image
    /// offsets in lexicographic order.
    Eigen::Vector3d minimum_image(const Eigen::Vector3d& d) const;
    /// Every lattice translation T such that |x_j + T - x_i| <= cutoff,
    /// in lexicographic order of the integer offsets. The trivial
    /// self-image (i == j, T = 0) is never returned.
    std::vector<Eigen::Vector3d> images_within(std::size_t i,
                                               std::size_t j,
                                               double cutoff) const;
    /// Smallest minimum-image distance over all atom pairs [A].
    double min_interatomic_distance() const;
    /// Checks the structural invariants (independent lattice vectors,
    /// positive masses, vacuum for non-periodic directions, no atoms
    /// closer than 0.5 A). Throws validation_error.
    void validate() const;

    bool operator==(const Supercell&) const = default;
};

enum class Stacking { AAprime, ABC };

/// Accepts "AAprime"/"aa_prime" and "ABC"/"abc".
Stacking parse_stacking(std::string_view label);
std::string_view stacking_label(Stacking s);

inline constexpr double default_lattice_constant = 2.51;
inline constexpr double default_interlayer_distance = 3.3;
inline constexpr double default_vacuum = 20.;

/// In-plane B-N bond length of the ideal honeycomb, a0 / sqrt(3).
double bond_length(double a0 = default_lattice_constant);

/// n x m honeycomb BN sheet in the z = 0 plane, c non-periodic.
Supercell build_monolayer(int n,
                          int m,
                          double a0 = default_lattice_constant,
                          double vacuum = default_vacuum);

/// Stack of `layers` n x m sheets, periodic along c.
///
/// AAprime: B above N and N above B in adjacent layers (requires an
/// even layer count for periodicity). ABC: each layer shifted by one
/// B-N bond vector in a fixed direction relative to the one below.
Supercell build_stacked(int n,
                        int m,
                        int layers,
                        Stacking stacking,
                        double d = default_interlayer_distance,
                        double a0 = default_lattice_constant);

/// What is left behind when a boron atom is removed.
struct VacancyRecord {
    /// Index of the removed atom in the original cell.
    std::size_t removed_index = 0;
    /// Cartesian position of the vacant site [A].
    Eigen::Vector3d site = Eigen::Vector3d::Zero();
    int layer_index = 0;
    /// Indices, in the defective cell, of the three nearest in-plane N.
    std::array<std::size_t, 3> neighbors{};
    /// Lattice translations placing each neighbor next to the site.
    std::array<Eigen::Vector3d, 3> neighbor_images{};

    bool operator==(const VacancyRecord&) const = default;
};

struct DefectCell {
    Supercell cell;
    VacancyRecord vacancy;
};

/// Removes the boron atom at site_index. Throws validation_error if
/// the site is not boron or out of range.
DefectCell make_vacancy(const Supercell& cell, std::size_t site_index);

/// Index of the atom of the given species and layer closest to the
/// geometric centre of the in-plane cell (lowest index on ties).
std::size_t central_site(const Supercell& cell, Species species, int layer = 0);

/// Positions of the three vacancy neighbours, unwrapped next to the
/// vacant site.
std::array<Eigen::Vector3d, 3> neighbor_positions(const Supercell& cell,
                                                  const VacancyRecord& v);

/// True if reflecting every atom through the plane (point, normal)
/// lands on an atom of the same species, modulo lattice translations.
bool has_mirror_plane(const Supercell& cell,
                      const Eigen::Vector3d& point,
                      const Eigen::Vector3d& normal,
                      double tol = 1e-6);
} // namespace spinrelax
