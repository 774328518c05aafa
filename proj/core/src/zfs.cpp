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

#include <spinrelax/parallel.hpp>
#include <spinrelax/zfs.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace spinrelax {
ZfsSummary diagonalize_dtensor(const DTensor& D) {
    ZfsSummary out;
    if (D.components.norm() == 0.)
        return out;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(D.symmetrized().components);
    if (solver.info() != Eigen::Success)
        throw computation_error("D-tensor diagonalization failed");
    const Eigen::Vector3d lam = solver.eigenvalues();
    const Eigen::Matrix3d vec = solver.eigenvectors();

    const double tie = 1e-9 * lam.cwiseAbs().maxCoeff();
    int z = 0;
    for (int k = 1; k < 3; ++k) {
        const double a = std::abs(lam[k]), b = std::abs(lam[z]);
        if (a > b + tie || (std::abs(a - b) <= tie && lam[k] > lam[z]))
            z = k;
    }
    std::array<int, 2> xy{};
    for (int k = 0, m = 0; k < 3; ++k)
        if (k != z)
            xy[m++] = k;
    if (lam[xy[0]] < lam[xy[1]])
        std::swap(xy[0], xy[1]);

    out.principal_values = {lam[xy[0]], lam[xy[1]], lam[z]};
    out.axes.col(0) = vec.col(xy[0]);
    out.axes.col(1) = vec.col(xy[1]);
    out.axes.col(2) = vec.col(z);
    if (out.axes.determinant() < 0.)
        out.axes.col(2) *= -1.;
    out.D = 1.5 * out.principal_values[2];
    out.E = 0.5 * (out.principal_values[0] - out.principal_values[1]);
    return out;
}

DTensor axial_dtensor(double D_const, double E_const) {
    return DTensor::diagonal(-D_const / 3. + E_const, -D_const / 3. - E_const,
                             2. * D_const / 3.);
}

const std::vector<ZfsReferenceEntry>& zfs_reference_table() {
    static const std::vector<ZfsReferenceEntry> table = {
        {"monolayer", "5x5", 2.92},   {"monolayer", "6x6", 2.83},
        {"monolayer", "7x7", 2.79},   {"monolayer", "9x9", 2.75},
        {"monolayer", "11x11", 2.74}, {"monolayer", "12x12", 2.74},
        {"hBN", "5x5x1", 2.64},       {"hBN", "6x6x1", 2.56},
        {"hBN", "7x7x1", 2.52},       {"hBN", "9x9x1", 2.48},
        {"hBN", "6x6x2", 2.84},       {"hBN", "6x6x3", 2.89},
        {"rBN", "5x5x1", 2.83},       {"rBN", "6x6x1", 2.77},
        {"rBN", "7x7x1", 2.73},       {"rBN", "9x9x1", 2.70},
        {"rBN", "6x6x2", 2.88},       {"rBN", "6x6x3", 2.91},
    };
    return table;
}

namespace {
double reference_value(const std::string& host, const std::string& cell) {
    for (const auto& e : zfs_reference_table())
        if (e.host == host && e.supercell == cell)
            return e.D;
    throw validation_error("no reference entry for " + host + " " + cell);
}
} // namespace

double calibration_target_monolayer() {
    return reference_value("monolayer", "12x12");
}

double calibration_target(Stacking stacking) {
    return stacking == Stacking::AAprime ? reference_value("hBN", "6x6x2")
                                         : reference_value("rBN", "6x6x2");
}

DTensor dipolar_dtensor(const std::vector<SpinSite>& sites,
                        double scale,
                        double g) {
    if (sites.size() < 2)
        throw validation_error("dipolar tensor needs at least two spin sites");
    double wsum = 0.;
    for (const auto& s : sites)
        wsum += s.weight;
    if (std::abs(wsum - 1.) > 1e-9)
        throw validation_error("spin-site weights sum to " +
                               std::to_string(wsum) + ", expected 1");
    const double C = scale * PhysicalConstants::dipolar_GHz_A3(g);
    Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = i + 1; j < sites.size(); ++j) {
            const Eigen::Vector3d r = sites[j].position - sites[i].position;
            const double r2 = r.squaredNorm();
            if (r2 < 0.01)
                throw validation_error("spin sites " + std::to_string(i) +
                                       " and " + std::to_string(j) +
                                       " are closer than 0.1 A");
            const double r5 = r2 * r2 * std::sqrt(r2);
            D += (sites[i].weight * sites[j].weight / r5) *
                 (r2 * Eigen::Matrix3d::Identity() - 3. * r * r.transpose());
        }
    // Symmetrize so rounding in the outer products leaves no skew part.
    return DTensor(C * D).symmetrized();
}

Supercell displace_along_mode(const Supercell& cell,
                              const PhononModes& modes,
                              std::size_t mode,
                              double amount,
                              bool force) {
    if (mode >= modes.size())
        throw validation_error("mode index " + std::to_string(mode) +
                               " out of range");
    if (modes.masses.size() != cell.size())
        throw validation_error("mode set describes " +
                               std::to_string(modes.masses.size()) +
                               " atoms, cell has " +
                               std::to_string(cell.size()));
    if (!force && std::abs(amount) > max_mode_displacement)
        throw domain_error("mode displacement " + std::to_string(amount) +
                           " A sqrt(amu) exceeds the harmonic guard of " +
                           std::to_string(max_mode_displacement));
    Supercell out = cell;
    const auto e = modes.vectors.col(static_cast<Eigen::Index>(mode));
    for (std::size_t i = 0; i < cell.size(); ++i)
        out.atoms[i].position +=
            (amount / std::sqrt(modes.masses[i])) *
            e.segment<3>(static_cast<Eigen::Index>(3 * i));
    return out;
}

void ZfsSampleSet::validate() const {
    if (!(step > 0.))
        throw validation_error("ZFS sample step must be positive");
    std::map<std::size_t, int> seen;
    for (const auto& s : samples)
        if (++seen[s.mode] > 1)
            throw validation_error("duplicate ZFS sample for mode " +
                                   std::to_string(s.mode));
}

DTensorDerivatives extract_derivatives(const ZfsSampleSet& samples,
                                       const PhononModes& modes,
                                       double cutoff,
                                       Warnings* warnings) {
    samples.validate();
    if (!(cutoff > 0.))
        throw validation_error("derivative cutoff must be positive");
    std::map<std::size_t, const ZfsSample*> by_mode;
    for (const auto& s : samples.samples) {
        if (s.mode >= modes.size())
            throw validation_error("ZFS sample for mode " +
                                   std::to_string(s.mode) + " but only " +
                                   std::to_string(modes.size()) +
                                   " modes exist");
        by_mode[s.mode] = &s;
    }

    std::vector<std::size_t> wanted;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double hw = modes.frequencies[static_cast<Eigen::Index>(i)];
        if (!modes.usable(i)) {
            ++skipped;
            continue;
        }
        if (hw > cutoff)
            continue;
        const auto it = by_mode.find(i);
        if (it == by_mode.end())
            throw validation_error("missing ZFS sample for mode " +
                                   std::to_string(i));
        if (std::abs(it->second->hw - hw) > 1e-6 * std::max(1., hw)) {
            std::ostringstream msg;
            msg << "ZFS sample for mode " << i << " has hw = "
                << it->second->hw << " meV but the mode set gives " << hw
                << " meV";
            throw validation_error(msg.str());
        }
        wanted.push_back(i);
    }
    if (warnings && skipped > 0)
        warnings->push_back("skipped " + std::to_string(skipped) +
                            " zero or imaginary modes");

    DTensorDerivatives out;
    out.cutoff = cutoff;
    out.modes.resize(wanted.size());
    const double d = samples.step;
    parallel_for(wanted.size(), [&](std::size_t k) {
        const std::size_t i = wanted[k];
        const ZfsSample& s = *by_mode.at(i);
        const double hw = modes.frequencies[static_cast<Eigen::Index>(i)];
        const Eigen::Matrix3d Dp = s.Dplus.symmetrized().components;
        const Eigen::Matrix3d Dm = s.Dminus.symmetrized().components;
        const Eigen::Matrix3d D0 = s.D0.symmetrized().components;
        ModeDerivative md;
        md.mode = i;
        md.hw = hw;
        md.first = dimensionless_first_derivative(DTensor((Dp - Dm) / (2. * d)), hw);
        md.second = dimensionless_second_derivative(
            DTensor((Dp - 2. * D0 + Dm) / (d * d)), hw);
        out.modes[k] = std::move(md);
    });
    return out;
}
} // namespace spinrelax
