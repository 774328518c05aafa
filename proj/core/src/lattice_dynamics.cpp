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

#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/parallel.hpp>
#include <spinrelax/units.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace spinrelax {
namespace {
constexpr char axis_name[3] = {'x', 'y', 'z'};

/// Position of the (atom, axis, sign) record in the canonical ordering.
std::size_t record_slot(std::size_t atom, int axis, int sign) {
    return 6 * atom + 2 * static_cast<std::size_t>(axis) + (sign > 0 ? 0 : 1);
}
} // namespace

void DisplacementForceSet::validate() const {
    if (!(step > 0.))
        throw validation_error("displacement step must be positive");
    const std::size_t n = reference.size();
    std::vector<const DisplacementRecord*> slots(6 * n, nullptr);
    for (const auto& r : records) {
        std::ostringstream where;
        where << "(atom " << r.atom << ", " << axis_name[r.axis % 3] << ", "
              << (r.sign > 0 ? '+' : '-') << ")";
        if (r.atom >= n || r.axis < 0 || r.axis > 2 ||
            (r.sign != 1 && r.sign != -1))
            throw validation_error("invalid displacement record " +
                                   where.str());
        if (static_cast<std::size_t>(r.forces.rows()) != n)
            throw validation_error(
                "record " + where.str() + " has " +
                std::to_string(r.forces.rows()) + " force rows, expected " +
                std::to_string(n));
        auto& slot = slots[record_slot(r.atom, r.axis, r.sign)];
        if (slot != nullptr)
            throw validation_error("duplicate displacement record " +
                                   where.str());
        slot = &r;
    }
    std::ostringstream missing;
    std::size_t n_missing = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (int axis = 0; axis < 3; ++axis)
            for (int sign : {+1, -1})
                if (slots[record_slot(a, axis, sign)] == nullptr) {
                    missing << (n_missing++ ? ", " : "") << "(atom " << a
                            << ", " << axis_name[axis] << ", "
                            << (sign > 0 ? '+' : '-') << ")";
                }
    if (n_missing > 0)
        throw validation_error("missing displacement records: " +
                               missing.str());
}

DisplacementForceSet generate_displacement_set(const ToyForceField& field,
                                               double step) {
    if (!(step > 0.))
        throw validation_error("displacement step must be positive");
    DisplacementForceSet out;
    out.reference = field.reference();
    out.step = step;
    const std::size_t n = out.reference.size();
    out.records.resize(6 * n);
    parallel_for(6 * n, [&](std::size_t k) {
        DisplacementRecord r;
        r.atom = k / 6;
        r.axis = static_cast<int>((k % 6) / 2);
        r.sign = (k % 2 == 0) ? +1 : -1;
        Supercell moved = out.reference;
        moved.atoms[r.atom].position[r.axis] += r.sign * step;
        r.forces = field.forces(moved);
        out.records[k] = std::move(r);
    });
    return out;
}

Hessian build_hessian(const DisplacementForceSet& dset) {
    dset.validate();
    const std::size_t n = dset.reference.size();
    std::vector<const DisplacementRecord*> slots(6 * n, nullptr);
    for (const auto& r : dset.records)
        slots[record_slot(r.atom, r.axis, r.sign)] = &r;

    const auto dim = static_cast<Eigen::Index>(3 * n);
    Hessian H;
    H.matrix.resize(dim, dim);
    H.masses.reserve(n);
    for (const auto& a : dset.reference.atoms)
        H.masses.push_back(a.mass);

    parallel_for(3 * n, [&](std::size_t row) {
        const std::size_t atom = row / 3;
        const int axis = static_cast<int>(row % 3);
        const auto& plus = slots[record_slot(atom, axis, +1)]->forces;
        const auto& minus = slots[record_slot(atom, axis, -1)]->forces;
        for (std::size_t j = 0; j < n; ++j)
            for (int b = 0; b < 3; ++b) {
                const auto jj = static_cast<Eigen::Index>(j);
                H.matrix(static_cast<Eigen::Index>(row),
                         static_cast<Eigen::Index>(3 * j + b)) =
                    -(plus(jj, b) - minus(jj, b)) / (2. * dset.step);
            }
    });
    const double norm = H.matrix.norm();
    H.raw_asymmetry =
        norm > 0. ? (H.matrix - H.matrix.transpose()).norm() / norm : 0.;
    H.matrix = 0.5 * (H.matrix + H.matrix.transpose()).eval();
    return H;
}

namespace {
Eigen::MatrixXd translation_basis(Eigen::Index dim) {
    const Eigen::Index n = dim / 3;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, 3);
    const double w = 1. / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            T(3 * i + a, a) = w;
    return T;
}
} // namespace

Hessian enforce_acoustic_sum_rule(const Hessian& H) {
    const Eigen::Index dim = H.matrix.rows();
    if (H.matrix.cols() != dim || dim % 3 != 0)
        throw validation_error("Hessian must be square with 3N rows");
    Hessian out = H;
    if (dim == 0)
        return out;
    const Eigen::MatrixXd T = translation_basis(dim);
    // P H P with P = 1 - T T^T, expanded to avoid forming P.
    const Eigen::MatrixXd HT = H.matrix * T;
    const Eigen::Matrix3d THT = T.transpose() * HT;
    Eigen::MatrixXd M = H.matrix - T * HT.transpose() - HT * T.transpose() +
                        T * THT * T.transpose();

    const Eigen::Index n = dim / 3;
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i)
                sum += M.block<3, 3>(3 * i, 3 * j);
        M.block<3, 3>(3 * i, 3 * i) = -0.5 * (sum + sum.transpose());
    }
    out.matrix = std::move(M);
    return out;
}

double translation_residual(const Eigen::MatrixXd& H) {
    if (H.rows() == 0)
        return 0.;
    return (H * translation_basis(H.rows())).colwise().norm().maxCoeff();
}

std::size_t PhononModes::zero_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < size(); ++i)
        c += is_zero(i) ? 1 : 0;
    return c;
}

PhononModes diagonalize(const Hessian& H, Warnings* warnings) {
    const Eigen::Index dim = H.matrix.rows();
    if (H.matrix.cols() != dim ||
        static_cast<std::size_t>(dim) != 3 * H.masses.size())
        throw validation_error("Hessian shape does not match the mass list");
    Eigen::VectorXd inv_sqrt_m(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double m = H.masses[static_cast<std::size_t>(k / 3)];
        if (!(m > 0.))
            throw validation_error("non-positive mass for atom " +
                                   std::to_string(k / 3));
        inv_sqrt_m[k] = 1. / std::sqrt(m);
    }
    const Eigen::MatrixXd Dm =
        inv_sqrt_m.asDiagonal() * H.matrix * inv_sqrt_m.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Dm);
    if (solver.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "eigensolver failed on the " << dim << "x" << dim
            << " dynamical matrix (norm " << Dm.norm() << ", asymmetry "
            << (Dm - Dm.transpose()).norm() << ", finite "
            << (Dm.allFinite() ? "yes" : "no") << ")";
        throw computation_error(msg.str());
    }
    PhononModes out;
    out.masses = H.masses;
    out.vectors = solver.eigenvectors();
    out.frequencies.resize(dim);
    out.imaginary.resize(static_cast<std::size_t>(dim));
    std::size_t imaginary = 0;
    double largest = 0.;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double lambda = solver.eigenvalues()[k];
        out.frequencies[k] =
            PhysicalConstants::hbar_sqrt_eV_per_A2_amu_meV *
            std::sqrt(std::abs(lambda));
        out.imaginary[static_cast<std::size_t>(k)] = lambda < 0.;
        // Fix the sign of each eigenvector: largest component positive.
        Eigen::Index arg = 0;
        out.vectors.col(k).cwiseAbs().maxCoeff(&arg);
        if (out.vectors(arg, k) < 0.)
            out.vectors.col(k) *= -1.;
        if (lambda < 0. && out.frequencies[k] >= zero_mode_threshold) {
            ++imaginary;
            largest = std::max(largest, out.frequencies[k]);
        }
    }
    if (warnings && imaginary > 0) {
        std::ostringstream msg;
        msg << imaginary << " imaginary modes (largest |hw| = " << largest
            << " meV); excluded from spectral sums";
        warnings->push_back(msg.str());
    }
    return out;
}

PhononModes modes_from_forceset(const DisplacementForceSet& dset,
                                Warnings* warnings) {
    return diagonalize(enforce_acoustic_sum_rule(build_hessian(dset)), warnings);
}

UniformGrid default_dos_grid(const PhononModes& modes, double sigma, double step) {
    double top = 0.;
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes.usable(i))
            top = std::max(top, modes.frequencies[static_cast<Eigen::Index>(i)]);
    return UniformGrid::covering(0., top + 6. * sigma, step);
}

DosCurve phonon_dos(const PhononModes& modes,
                    double sigma,
                    const UniformGrid& grid) {
    if (!(sigma > 0.))
        throw validation_error("DOS smearing must be positive");
    std::vector<double> centres;
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes.usable(i))
            centres.push_back(modes.frequencies[static_cast<Eigen::Index>(i)]);
    DosCurve out;
    out.energies = grid.values();
    out.density.assign(grid.count, 0.);
    const double norm = 1. / (sigma * std::sqrt(2. * std::numbers::pi));
    parallel_for(grid.count, [&](std::size_t g) {
        double s = 0.;
        for (double w : centres) {
            const double x = (out.energies[g] - w) / sigma;
            s += std::exp(-0.5 * x * x);
        }
        out.density[g] = norm * s;
    });
    return out;
}

namespace {
/// Per-atom squared amplitude and its z part for one pattern.
void accumulate_weights(const Eigen::VectorXd& pattern,
                        std::vector<double>& weight,
                        std::vector<double>& weight_z) {
    if (pattern.size() % 3 != 0)
        throw validation_error("mode pattern length is not a multiple of 3");
    const std::size_t n = static_cast<std::size_t>(pattern.size() / 3);
    weight.resize(n, 0.);
    weight_z.resize(n, 0.);
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<Eigen::Index>(3 * i);
        weight[i] += pattern.segment<3>(k).squaredNorm();
        weight_z[i] += pattern[k + 2] * pattern[k + 2];
    }
}

ModeCharacter character_from_weights(const std::vector<double>& weight,
                                     const std::vector<double>& weight_z,
                                     const VacancyRecord& vacancy,
                                     double reference_amplitude) {
    ModeCharacter c;
    double total = 0., z2 = 0., w2 = 0.;
    for (std::size_t i = 0; i < weight.size(); ++i) {
        total += weight[i];
        z2 += weight_z[i];
        w2 += weight[i] * weight[i];
    }
    for (std::size_t nb : vacancy.neighbors)
        if (nb >= weight.size())
            throw validation_error("vacancy neighbour outside the mode");
    if (total == 0.)
        return c;
    c.out_of_plane_fraction = z2 / total;
    c.localization_ipr = w2 / (total * total);
    for (int k = 0; k < 3; ++k) {
        const double share = weight[vacancy.neighbors[k]] / total;
        c.neighbor_fraction += share;
        c.neighbor_amplitude[k] = std::sqrt(share) / reference_amplitude;
    }
    return c;
}
} // namespace

std::vector<std::size_t> degenerate_partners(const PhononModes& modes,
                                             std::size_t index) {
    if (index >= modes.size())
        throw validation_error("mode index " + std::to_string(index) +
                               " out of range");
    const double w = modes.frequencies[static_cast<Eigen::Index>(index)];
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < modes.size(); ++j)
        if (modes.imaginary[j] == modes.imaginary[index] &&
            std::abs(modes.frequencies[static_cast<Eigen::Index>(j)] - w) <
                degeneracy_tolerance)
            out.push_back(j);
    return out;
}

std::vector<double> atom_weights(const PhononModes& modes, std::size_t index) {
    std::vector<double> weight, weight_z;
    const auto group = degenerate_partners(modes, index);
    for (std::size_t j : group)
        accumulate_weights(modes.vectors.col(static_cast<Eigen::Index>(j)),
                           weight, weight_z);
    for (double& w : weight)
        w /= static_cast<double>(group.size());
    return weight;
}

ModeCharacter mode_character(const Eigen::VectorXd& pattern,
                             const VacancyRecord& vacancy,
                             double reference_amplitude) {
    std::vector<double> weight, weight_z;
    accumulate_weights(pattern, weight, weight_z);
    return character_from_weights(weight, weight_z, vacancy,
                                  reference_amplitude);
}

ModeCharacter mode_character(const PhononModes& modes,
                             std::size_t index,
                             const VacancyRecord& vacancy,
                             double reference_amplitude) {
    std::vector<double> weight, weight_z;
    const auto group = degenerate_partners(modes, index);
    for (std::size_t j : group)
        accumulate_weights(modes.vectors.col(static_cast<Eigen::Index>(j)),
                           weight, weight_z);
    for (std::size_t i = 0; i < weight.size(); ++i) {
        weight[i] /= static_cast<double>(group.size());
        weight_z[i] /= static_cast<double>(group.size());
    }
    return character_from_weights(weight, weight_z, vacancy,
                                  reference_amplitude);
}

std::size_t locate_defect_mode(const PhononModes& modes,
                               const VacancyRecord& vacancy,
                               double max_energy) {
    std::size_t best = modes.size();
    double best_score = -1.;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!modes.usable(i) ||
            modes.frequencies[static_cast<Eigen::Index>(i)] > max_energy)
            continue;
        const auto c = mode_character(modes, i, vacancy);
        const double score = c.out_of_plane_fraction * c.neighbor_fraction;
        // Strict comparison keeps the lowest index of a degenerate group.
        if (score > best_score * (1. + 1e-9)) {
            best_score = score;
            best = i;
        }
    }
    if (best == modes.size())
        throw validation_error("no usable mode to inspect");
    return best;
}

std::size_t most_localized_out_of_plane_mode(const PhononModes& modes,
                                             const VacancyRecord& vacancy) {
    std::size_t best = modes.size();
    double best_score = -1.;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (!modes.usable(i))
            continue;
        const auto c = mode_character(modes, i, vacancy);
        const double score = c.out_of_plane_fraction * c.localization_ipr;
        if (score > best_score * (1. + 1e-9)) {
            best_score = score;
            best = i;
        }
    }
    if (best == modes.size())
        throw validation_error("no usable mode to inspect");
    return best;
}
} // namespace spinrelax
