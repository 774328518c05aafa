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

#include <spinrelax/toy_force_field.hpp>
#include <spinrelax/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace spinrelax {
namespace {
constexpr double position_tol = 0.1;

using ImageKey = std::tuple<std::size_t, std::size_t, long, long, long>;

struct PendingSpring {
    double stiffness = 0.;
    Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
    int views = 0;
    /// Eclipsed pair: also carries the in-plane shear springs.
    bool on_top = false;
};

double nearest_in_plane_distance(const Supercell& cell) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cell.size(); ++i)
        for (std::size_t j = i + 1; j < cell.size(); ++j) {
            if (cell.atoms[i].layer_index != cell.atoms[j].layer_index)
                continue;
            best = std::min(best, cell.minimum_image(cell.atoms[j].position -
                                                     cell.atoms[i].position)
                                      .norm());
        }
    return best;
}
} // namespace

namespace {
/// Adds c to the coefficient of `atom`, merging repeated atoms.
void add_coefficient(HarmonicTerm& t, std::size_t atom, const Eigen::Vector3d& c) {
    for (auto& [a, v] : t.coefficients)
        if (a == atom) {
            v += c;
            return;
        }
    t.coefficients.emplace_back(atom, c);
}

HarmonicTerm pair_term(std::size_t i,
                       std::size_t j,
                       const Eigen::Vector3d& direction,
                       double k) {
    HarmonicTerm t;
    t.stiffness = k;
    add_coefficient(t, i, direction);
    add_coefficient(t, j, -direction);
    return t;
}
} // namespace

ToyForceField::ToyForceField(const Supercell& reference,
                             const ToyParams& params)
    : ref(reference), p(params) {
    const std::size_t n = ref.size();
    if (n == 0)
        return;
    const double bond = nearest_in_plane_distance(ref);
    const Eigen::Vector3d zhat = Eigen::Vector3d::UnitZ();

    // Nearest neighbours in a layer: stretch, shear and out-of-plane flex.
    std::vector<std::vector<std::size_t>> neighbours(n);
    if (std::isfinite(bond)) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (ref.atoms[i].layer_index != ref.atoms[j].layer_index)
                    continue;
                for (const auto& T : ref.images_within(i, j, 1.1 * bond)) {
                    const Eigen::Vector3d r =
                        ref.atoms[j].position + T - ref.atoms[i].position;
                    if (r.norm() < 0.9 * bond)
                        continue;
                    const Eigen::Vector3d e = r.normalized();
                    const Eigen::Vector3d t = zhat.cross(e).normalized();
                    harmonic_terms.push_back(pair_term(i, j, e, p.k_bond));
                    harmonic_terms.push_back(pair_term(i, j, t, p.k_shear));
                    if (p.k_flex != 0.)
                        harmonic_terms.push_back(pair_term(i, j, zhat, p.k_flex));
                    neighbours[i].push_back(j);
                    neighbours[j].push_back(i);
                }
            }
    }

    // Out-of-plane site stiffness: each fully coordinated atom resists
    // moving out of the plane of its three neighbours.
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = neighbours[i];
        if (nb.size() != 3)
            continue;
        HarmonicTerm t;
        t.stiffness = p.k_z;
        add_coefficient(t, i, zhat);
        for (std::size_t j : nb)
            add_coefficient(t, j, -zhat / 3.);
        harmonic_terms.push_back(std::move(t));
    }

    // Interlayer springs.
    int layers = 0;
    for (const auto& a : ref.atoms)
        layers = std::max(layers, a.layer_index + 1);
    if (layers < 2 || (p.k_inter == 0. && p.k_inter_shear == 0.))
        return;
    std::vector<double> layer_z(layers, 0.);
    std::vector<int> layer_count(layers, 0);
    for (const auto& a : ref.atoms) {
        layer_z[a.layer_index] += a.position.z();
        ++layer_count[a.layer_index];
    }
    for (int k = 0; k < layers; ++k)
        layer_z[k] /= std::max(layer_count[k], 1);

    const Eigen::Matrix3d Linv = ref.lattice_matrix().inverse();
    std::map<ImageKey, PendingSpring> pending;
    for (std::size_t i = 0; i < n; ++i) {
        const int k = ref.atoms[i].layer_index;
        for (int dir : {+1, -1}) {
            int t = k + dir;
            double dz_shift = 0.;
            if (t < 0 || t >= layers) {
                if (!ref.periodic[2])
                    continue;
                t = (t + layers) % layers;
                dz_shift = dir * ref.lattice_vectors[2].z();
            }
            const double dz = layer_z[t] - layer_z[k] + dz_shift;
            const double reach = std::hypot(dz, bond + position_tol);
            struct Candidate {
                std::size_t j;
                Eigen::Vector3d T;
                double rho;
            };
            std::vector<Candidate> found;
            for (std::size_t j = 0; j < n; ++j) {
                if (ref.atoms[j].layer_index != t)
                    continue;
                for (const auto& T : ref.images_within(i, j, reach)) {
                    const Eigen::Vector3d r =
                        ref.atoms[j].position + T - ref.atoms[i].position;
                    if (std::abs(r.z() - dz) > position_tol)
                        continue;
                    found.push_back({j, T, std::hypot(r.x(), r.y())});
                }
            }
            const bool on_top = std::any_of(
                found.begin(), found.end(),
                [](const Candidate& c) { return c.rho < position_tol; });
            std::vector<Candidate> chosen;
            for (const auto& c : found)
                if (on_top ? c.rho < position_tol
                           : c.rho <= bond + position_tol)
                    chosen.push_back(c);
            if (chosen.empty())
                continue;
            const double k_each =
                p.k_inter / static_cast<double>(chosen.size());
            for (const auto& c : chosen) {
                // Canonical orientation: lower index first.
                std::size_t a = i, b = c.j;
                Eigen::Vector3d T = c.T;
                if (a > b) {
                    std::swap(a, b);
                    T = -T;
                }
                const Eigen::Vector3d f = Linv * T;
                const ImageKey key{a, b, std::lround(f[0]), std::lround(f[1]),
                                   std::lround(f[2])};
                auto& slot = pending[key];
                slot.stiffness += k_each;
                slot.direction =
                    (ref.atoms[b].position + T - ref.atoms[a].position)
                        .normalized();
                ++slot.views;
                slot.on_top = on_top;
            }
        }
    }
    for (const auto& [key, ps] : pending) {
        const std::size_t a = std::get<0>(key), b = std::get<1>(key);
        if (a == b)
            continue;
        const double views = static_cast<double>(ps.views);
        if (ps.stiffness != 0.) {
            HarmonicTerm t = pair_term(a, b, ps.direction, ps.stiffness / views);
            t.interlayer = true;
            harmonic_terms.push_back(std::move(t));
        }
        if (ps.on_top && p.k_inter_shear != 0.) {
            for (const Eigen::Vector3d& e :
                 {Eigen::Vector3d(1., 0., 0.), Eigen::Vector3d(0., 1., 0.)}) {
                HarmonicTerm t = pair_term(a, b, e, p.k_inter_shear);
                t.interlayer = true;
                harmonic_terms.push_back(std::move(t));
            }
        }
    }
}

ForceArray ToyForceField::forces(const Supercell& displaced) const {
    if (displaced.size() != ref.size())
        throw validation_error("displaced cell has " +
                               std::to_string(displaced.size()) +
                               " atoms, reference has " +
                               std::to_string(ref.size()));
    const std::size_t n = ref.size();
    ForceArray F = ForceArray::Zero(static_cast<Eigen::Index>(n), 3);
    for (const HarmonicTerm& t : harmonic_terms) {
        double s = 0.;
        for (const auto& [a, c] : t.coefficients)
            s += c.dot(displaced.atoms[a].position - ref.atoms[a].position);
        for (const auto& [a, c] : t.coefficients)
            F.row(static_cast<Eigen::Index>(a)) -= (t.stiffness * s) * c.transpose();
    }
    return F;
}

Eigen::MatrixXd ToyForceField::hessian() const {
    const auto n = static_cast<Eigen::Index>(ref.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (const HarmonicTerm& t : harmonic_terms)
        for (const auto& [a, ca] : t.coefficients)
            for (const auto& [b, cb] : t.coefficients)
                H.block<3, 3>(static_cast<Eigen::Index>(3 * a),
                              static_cast<Eigen::Index>(3 * b)) +=
                    t.stiffness * ca * cb.transpose();
    return H;
}

ForceArray toy_forces(const Supercell& reference,
                      const Supercell& displaced,
                      const ToyParams& params) {
    return ToyForceField(reference, params).forces(displaced);
}
} // namespace spinrelax
