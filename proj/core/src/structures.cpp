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

#include <spinrelax/structures.hpp>
#include <spinrelax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spinrelax {
std::string_view species_label(Species s) {
    return s == Species::B ? "B" : "N";
}

Species parse_species(std::string_view label) {
    if (label == "B")
        return Species::B;
    if (label == "N")
        return Species::N;
    throw validation_error("unknown species label '" + std::string(label) +
                           "'");
}

double default_mass(Species s) {
    return s == Species::B ? 10.811 : 14.007;
}

Eigen::Matrix3d Supercell::lattice_matrix() const {
    Eigen::Matrix3d L;
    for (int k = 0; k < 3; ++k)
        L.col(k) = lattice_vectors[k];
    return L;
}

namespace {
/// Integer offset ranges to scan for images within `cutoff` of the
/// separation whose fractional coordinates are `frac`.
std::array<std::array<long, 2>, 3> image_ranges(const Supercell& cell,
                                                const Eigen::Matrix3d& Linv,
                                                const Eigen::Vector3d& frac,
                                                double cutoff) {
    std::array<std::array<long, 2>, 3> r{};
    for (int k = 0; k < 3; ++k) {
        if (!cell.periodic[k]) {
            r[k] = {0, 0};
            continue;
        }
        const long centre = std::lround(-frac[k]);
        const long half = static_cast<long>(
                              std::ceil(cutoff * Linv.row(k).norm())) +
                          1;
        r[k] = {centre - half, centre + half};
    }
    return r;
}
} // namespace

Eigen::Vector3d Supercell::minimum_image(const Eigen::Vector3d& d) const {
    const Eigen::Matrix3d L = lattice_matrix();
    const Eigen::Vector3d frac = L.partialPivLu().solve(d);
    Eigen::Vector3d base = d;
    for (int k = 0; k < 3; ++k)
        if (periodic[k])
            base -= std::round(frac[k]) * lattice_vectors[k];
    // Rounding the fractional coordinates is not enough in skewed
    // cells; scan the neighbouring images as well.
    Eigen::Vector3d best = base;
    double best_norm = base.squaredNorm();
    for (int i = -1; i <= 1; ++i) {
        if (!periodic[0] && i != 0)
            continue;
        for (int j = -1; j <= 1; ++j) {
            if (!periodic[1] && j != 0)
                continue;
            for (int k = -1; k <= 1; ++k) {
                if (!periodic[2] && k != 0)
                    continue;
                const Eigen::Vector3d c = base + i * lattice_vectors[0] +
                                          j * lattice_vectors[1] +
                                          k * lattice_vectors[2];
                const double n = c.squaredNorm();
                if (n < best_norm - 1e-12) {
                    best_norm = n;
                    best = c;
                }
            }
        }
    }
    return best;
}

std::vector<Eigen::Vector3d> Supercell::images_within(std::size_t i,
                                                      std::size_t j,
                                                      double cutoff) const {
    const Eigen::Matrix3d L = lattice_matrix();
    const Eigen::Matrix3d Linv = L.inverse();
    const Eigen::Vector3d d0 = atoms[j].position - atoms[i].position;
    const Eigen::Vector3d frac = Linv * d0;
    const auto r = image_ranges(*this, Linv, frac, cutoff);
    std::vector<Eigen::Vector3d> out;
    for (long a = r[0][0]; a <= r[0][1]; ++a)
        for (long b = r[1][0]; b <= r[1][1]; ++b)
            for (long c = r[2][0]; c <= r[2][1]; ++c) {
                if (i == j && a == 0 && b == 0 && c == 0)
                    continue;
                const Eigen::Vector3d T =
                    static_cast<double>(a) * lattice_vectors[0] +
                    static_cast<double>(b) * lattice_vectors[1] +
                    static_cast<double>(c) * lattice_vectors[2];
                if ((d0 + T).norm() <= cutoff)
                    out.push_back(T);
            }
    return out;
}

double Supercell::min_interatomic_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < atoms.size(); ++i)
        for (std::size_t j = i + 1; j < atoms.size(); ++j)
            best = std::min(
                best,
                minimum_image(atoms[j].position - atoms[i].position).norm());
    return best;
}

void Supercell::validate() const {
    const Eigen::Matrix3d L = lattice_matrix();
    const double scale = L.colwise().norm().prod();
    if (!(scale > 0.) || std::abs(L.determinant()) < 1e-10 * scale)
        throw validation_error("lattice vectors are linearly dependent");
    bool single_layer = !atoms.empty();
    for (const Atom& a : atoms)
        single_layer = single_layer && a.layer_index == atoms[0].layer_index;
    if (single_layer && periodic[2]) {
        double zmin = atoms[0].position.z(), zmax = zmin;
        for (const Atom& a : atoms) {
            zmin = std::min(zmin, a.position.z());
            zmax = std::max(zmax, a.position.z());
        }
        if (std::abs(lattice_vectors[2].z()) - (zmax - zmin) < default_vacuum)
            throw validation_error(
                "a single-layer cell periodic along c needs >= 20 A vacuum");
    }
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if (!(atoms[i].mass > 0.)) {
            std::ostringstream msg;
            msg << "atom " << i << " has non-positive mass " << atoms[i].mass;
            throw validation_error(msg.str());
        }
    if (atoms.size() > 1) {
        const double dmin = min_interatomic_distance();
        if (dmin <= 0.5) {
            std::ostringstream msg;
            msg << "atoms closer than 0.5 A (minimum distance " << dmin
                << " A)";
            throw validation_error(msg.str());
        }
    }
}

Stacking parse_stacking(std::string_view label) {
    if (label == "AAprime" || label == "aa_prime" || label == "AA'")
        return Stacking::AAprime;
    if (label == "ABC" || label == "abc")
        return Stacking::ABC;
    throw validation_error("unknown stacking '" + std::string(label) +
                           "' (expected AAprime or ABC)");
}

std::string_view stacking_label(Stacking s) {
    return s == Stacking::AAprime ? "AAprime" : "ABC";
}

double bond_length(double a0) {
    return a0 / std::sqrt(3.);
}

namespace {
void check_sheet_args(int n, int m, double a0) {
    if (n < 1 || m < 1)
        throw validation_error("supercell multiplicities must be >= 1");
    if (!(a0 > 0.))
        throw validation_error("lattice constant must be positive");
}

Eigen::Vector3d primitive_a1(double a0) {
    return {a0, 0., 0.};
}

Eigen::Vector3d primitive_a2(double a0) {
    return {0.5 * a0, 0.5 * std::sqrt(3.) * a0, 0.};
}

/// B -> N bond vector of the primitive cell, (a1 + a2) / 3.
Eigen::Vector3d bond_vector(double a0) {
    return (primitive_a1(a0) + primitive_a2(a0)) / 3.;
}

void append_sheet(std::vector<Atom>& atoms,
                  int n,
                  int m,
                  double a0,
                  const Eigen::Vector3d& b_offset,
                  const Eigen::Vector3d& n_offset,
                  int layer) {
    const Eigen::Vector3d a1 = primitive_a1(a0);
    const Eigen::Vector3d a2 = primitive_a2(a0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const Eigen::Vector3d R = i * a1 + j * a2;
            atoms.push_back({Species::B, default_mass(Species::B),
                             R + b_offset, layer});
            atoms.push_back({Species::N, default_mass(Species::N),
                             R + n_offset, layer});
        }
}
} // namespace

Supercell build_monolayer(int n, int m, double a0, double vacuum) {
    check_sheet_args(n, m, a0);
    if (!(vacuum > 0.))
        throw validation_error("vacuum size must be positive");
    Supercell cell;
    cell.lattice_vectors = {n * primitive_a1(a0), m * primitive_a2(a0),
                            Eigen::Vector3d(0., 0., vacuum)};
    cell.periodic = {true, true, false};
    append_sheet(cell.atoms, n, m, a0, Eigen::Vector3d::Zero(),
                 bond_vector(a0), 0);
    return cell;
}

Supercell build_stacked(
    int n, int m, int layers, Stacking stacking, double d, double a0) {
    check_sheet_args(n, m, a0);
    if (layers < 2)
        throw validation_error("stacked cells need at least 2 layers");
    if (!(d > 0.))
        throw validation_error("interlayer distance must be positive");
    if (stacking == Stacking::AAprime && layers % 2 != 0)
        throw validation_error(
            "AA' stacking repeats every two layers; use an even layer count");
    const Eigen::Vector3d s = bond_vector(a0);
    const Eigen::Vector3d up(0., 0., d);
    Supercell cell;
    cell.periodic = {true, true, true};
    for (int k = 0; k < layers; ++k) {
        const Eigen::Vector3d z = k * up;
        if (stacking == Stacking::AAprime) {
            // Odd layers are the even ones rotated by pi: N sits where B
            // was and vice versa.
            if (k % 2 == 0)
                append_sheet(cell.atoms, n, m, a0, z, z + s, k);
            else
                append_sheet(cell.atoms, n, m, a0, z + s, z, k);
        } else {
            const Eigen::Vector3d shift = k * s;
            append_sheet(cell.atoms, n, m, a0, z + shift, z + shift + s, k);
        }
    }
    const Eigen::Vector3d c = stacking == Stacking::AAprime
                                  ? Eigen::Vector3d(layers * up)
                                  : Eigen::Vector3d(layers * (up + s));
    cell.lattice_vectors = {n * primitive_a1(a0), m * primitive_a2(a0), c};
    return cell;
}

DefectCell make_vacancy(const Supercell& cell, std::size_t site_index) {
    if (site_index >= cell.size())
        throw validation_error("vacancy site index " +
                               std::to_string(site_index) + " out of range");
    const Atom& removed = cell.atoms[site_index];
    if (removed.species != Species::B)
        throw validation_error("vacancy site " + std::to_string(site_index) +
                               " is not a boron atom");
    DefectCell out;
    out.cell = cell;
    out.cell.atoms.erase(out.cell.atoms.begin() +
                         static_cast<std::ptrdiff_t>(site_index));
    out.vacancy.removed_index = site_index;
    out.vacancy.site = removed.position;
    out.vacancy.layer_index = removed.layer_index;

    // Three nearest N of the same layer, minimum image, ties by index.
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 0; i < out.cell.size(); ++i) {
        const Atom& a = out.cell.atoms[i];
        if (a.species != Species::N || a.layer_index != removed.layer_index)
            continue;
        const double r =
            out.cell.minimum_image(a.position - removed.position).norm();
        candidates.emplace_back(r, i);
    }
    if (candidates.size() < 3)
        throw validation_error("vacancy layer has fewer than three N atoms");
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto& x, const auto& y) {
                         if (std::abs(x.first - y.first) > 1e-9)
                             return x.first < y.first;
                         return x.second < y.second;
                     });
    for (int k = 0; k < 3; ++k) {
        const std::size_t idx = candidates[k].second;
        out.vacancy.neighbors[k] = idx;
        const Eigen::Vector3d raw =
            out.cell.atoms[idx].position - removed.position;
        out.vacancy.neighbor_images[k] = out.cell.minimum_image(raw) - raw;
    }
    return out;
}

std::size_t central_site(const Supercell& cell, Species species, int layer) {
    const Eigen::Vector3d centre =
        0.5 * (cell.lattice_vectors[0] + cell.lattice_vectors[1]);
    std::size_t best = cell.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cell.size(); ++i) {
        const Atom& a = cell.atoms[i];
        if (a.species != species || a.layer_index != layer)
            continue;
        Eigen::Vector3d d = a.position - centre;
        d.z() = 0.;
        const double r = d.norm();
        if (r < best_d - 1e-9) {
            best_d = r;
            best = i;
        }
    }
    if (best == cell.size())
        throw validation_error("no atom of the requested species in layer " +
                               std::to_string(layer));
    return best;
}

std::array<Eigen::Vector3d, 3> neighbor_positions(const Supercell& cell,
                                                  const VacancyRecord& v) {
    std::array<Eigen::Vector3d, 3> out;
    for (int k = 0; k < 3; ++k)
        out[k] = cell.atoms.at(v.neighbors[k]).position + v.neighbor_images[k];
    return out;
}

bool has_mirror_plane(const Supercell& cell,
                      const Eigen::Vector3d& point,
                      const Eigen::Vector3d& normal,
                      double tol) {
    const Eigen::Vector3d nhat = normal.normalized();
    for (const Atom& a : cell.atoms) {
        const Eigen::Vector3d p = a.position;
        const Eigen::Vector3d reflected = p - 2. * (p - point).dot(nhat) * nhat;
        bool found = false;
        for (const Atom& b : cell.atoms) {
            if (b.species != a.species)
                continue;
            if (cell.minimum_image(b.position - reflected).norm() < tol) {
                found = true;
                break;
            }
        }
        if (!found)
            return false;
    }
    return true;
}
} // namespace spinrelax
