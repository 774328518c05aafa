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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/parallel.hpp>
#include <spinrelax/units.hpp>

using namespace spinrelax;

namespace {
/// Two atoms in a box with a spring k along x.
DisplacementForceSet diatomic_set(double k, double step) {
    DisplacementForceSet d;
    d.reference.lattice_vectors = {Eigen::Vector3d(30., 0., 0.), Eigen::Vector3d(0., 30., 0.),
                                   Eigen::Vector3d(0., 0., 30.)};
    d.reference.periodic = {false, false, false};
    d.reference.atoms = {{Species::B, 10.811, Eigen::Vector3d(0., 0., 0.), 0},
                         {Species::N, 14.007, Eigen::Vector3d(1.45, 0., 0.), 0}};
    d.step = step;
    for (std::size_t atom = 0; atom < 2; ++atom) {
        for (int axis = 0; axis < 3; ++axis) {
            for (int sign : {+1, -1}) {
                DisplacementRecord r{atom, axis, sign, ForceArray::Zero(2, 3)};
                if (axis == 0) {
                    const double u = sign * step;
                    const double stretch = atom == 1 ? u : -u;
                    r.forces(0, 0) = k * stretch;
                    r.forces(1, 0) = -k * stretch;
                }
                d.records.push_back(r);
            }
        }
    }
    return d;
}

Hessian diatomic_hessian(double k) {
    Hessian h;
    h.matrix = Eigen::MatrixXd::Zero(6, 6);
    h.matrix(0, 0) = h.matrix(3, 3) = k;
    h.matrix(0, 3) = h.matrix(3, 0) = -k;
    h.masses = {10.811, 14.007};
    return h;
}

DefectCell monolayer_defect(int n) {
    const Supercell host = build_monolayer(n, n);
    return make_vacancy(host, central_site(host, Species::B));
}

DefectCell stacked_defect(int n, Stacking s) {
    const Supercell host = build_stacked(n, n, 2, s);
    return make_vacancy(host, central_site(host, Species::B, 0));
}

PhononModes toy_modes(const Supercell& cell, const ToyParams& p = {}) {
    const ToyForceField field(cell, p);
    return modes_from_forceset(generate_displacement_set(field));
}

PhononModes stick_modes(const std::vector<double>& hw) {
    PhononModes m;
    const auto n = static_cast<Eigen::Index>(hw.size());
    m.frequencies = Eigen::Map<const Eigen::VectorXd>(hw.data(), n);
    m.vectors = Eigen::MatrixXd::Identity(n, n);
    m.imaginary.assign(hw.size(), false);
    return m;
}
} // namespace

TEST_CASE("toy forces vanish at the reference geometry") {
    const DefectCell dc = monolayer_defect(4);
    const ForceArray f = toy_forces(dc.cell, dc.cell, ToyParams{});
    CHECK(f.cwiseAbs().maxCoeff() == 0.);
}

TEST_CASE("single z displacement: restoring force and reactions") {
    const Supercell cell = build_monolayer(4, 4);
    Supercell moved = cell;
    moved.atoms[5].position.z() += 0.01;
    const ForceArray f = toy_forces(cell, moved, ToyParams{});
    CHECK(f(5, 2) < 0.);
    CHECK(std::abs(f.colwise().sum().norm()) < 1e-14);
    int pushed = 0;
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        pushed += (i != 5 && f(i, 2) > 0.) ? 1 : 0;
    CHECK(pushed >= 3);
}

TEST_CASE("AA' stacking: in-plane forces unchanged, z gains an interlayer term") {
    const Supercell mono = build_monolayer(4, 4);
    const Supercell aa = build_stacked(4, 4, 2, Stacking::AAprime);
    const ToyParams p;
    ToyParams vertical_only = p;
    vertical_only.k_inter_shear = 0.;
    for (int axis : {0, 1}) {
        Supercell m = mono, s = aa;
        m.atoms[3].position[axis] += 0.01;
        s.atoms[3].position[axis] += 0.01;
        const ForceArray fm = toy_forces(mono, m, p);
        const ForceArray fs = toy_forces(aa, s, vertical_only);
        CHECK((fm - fs.topRows(mono.size())).cwiseAbs().maxCoeff() < 1e-14);

        // The sliding springs tie atom 3 to its partner above and below.
        ForceArray diff = toy_forces(aa, s, p) - fs;
        CHECK(diff(3, axis) == doctest::Approx(-2. * p.k_inter_shear * 0.01).epsilon(1e-12));
        CHECK(diff.colwise().sum().norm() < 1e-15);
        diff(3, axis) = 0.;
        CHECK(diff.topRows(mono.size()).cwiseAbs().maxCoeff() < 1e-15);
    }
    Supercell m = mono, s = aa;
    m.atoms[3].position.z() += 0.01;
    s.atoms[3].position.z() += 0.01;
    const double fz_mono = toy_forces(mono, m, p)(3, 2);
    const double fz_aa = toy_forces(aa, s, p)(3, 2);
    CHECK(fz_aa < fz_mono - 0.5 * p.k_inter * 0.01);
}

TEST_CASE("two-atom spring Hessian") {
    const DisplacementForceSet d = diatomic_set(2.5, 0.01);
    const Hessian h = build_hessian(d);
    CHECK((h.matrix - diatomic_hessian(2.5).matrix).norm() < 1e-12);
    CHECK(h.raw_asymmetry < 1e-12);
}

TEST_CASE("missing displacement record is named") {
    DisplacementForceSet d = diatomic_set(1., 0.01);
    d.records.erase(std::remove_if(d.records.begin(), d.records.end(),
                                   [](const DisplacementRecord& r) {
                                       return r.atom == 1 && r.axis == 1 && r.sign < 0;
                                   }),
                    d.records.end());
    try {
        build_hessian(d);
        FAIL("expected an error");
    } catch (const validation_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("atom 1") != std::string::npos);
        CHECK(msg.find("y") != std::string::npos);
        CHECK(msg.find("-") != std::string::npos);
    }
}

TEST_CASE("numerical Hessian equals the analytic spring Hessian") {
    for (const Supercell& cell :
         {build_monolayer(2, 2), build_stacked(2, 2, 2, Stacking::AAprime),
          build_stacked(2, 2, 2, Stacking::ABC), monolayer_defect(4).cell}) {
        const ToyForceField field(cell, ToyParams{});
        const Eigen::MatrixXd analytic = field.hessian();
        for (double step : {0.01, 0.003}) {
            const Hessian h = build_hessian(generate_displacement_set(field, step));
            CHECK((h.matrix - analytic).norm() <= 1e-6 * analytic.norm());
            CHECK(h.raw_asymmetry < 1e-6);
        }
    }
}

TEST_CASE("acoustic sum rule") {
    const ToyForceField field(build_monolayer(3, 3), ToyParams{});
    Hessian exact{field.hessian(), std::vector<double>(18, 12.), 0.};
    const Hessian same = enforce_acoustic_sum_rule(exact);
    CHECK((same.matrix - exact.matrix).cwiseAbs().maxCoeff() < 1e-12);

    Hessian noisy = exact;
    for (Eigen::Index i = 0; i < noisy.matrix.rows(); ++i)
        noisy.matrix(i, i) += 1e-3;
    CHECK(translation_residual(noisy.matrix) > 1e-4);
    const Hessian fixed = enforce_acoustic_sum_rule(noisy);
    CHECK(translation_residual(fixed.matrix) < 1e-12);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd r(12, 12);
    for (Eigen::Index i = 0; i < 12; ++i)
        for (Eigen::Index j = 0; j < 12; ++j)
            r(i, j) = normal(rng);
    Hessian random{(r + r.transpose()) / 2., std::vector<double>(4, 1.), 0.};
    const Hessian out = enforce_acoustic_sum_rule(random);
    CHECK((out.matrix - out.matrix.transpose()).norm() < 1e-12);
    CHECK(translation_residual(out.matrix) < 1e-12);
}

TEST_CASE("diatomic closed form") {
    const double k = 1.;
    const PhononModes m = diagonalize(diatomic_hessian(k));
    const double mu = 10.811 * 14.007 / (10.811 + 14.007);
    const double expected = PhysicalConstants::hbar_sqrt_eV_per_A2_amu_meV * std::sqrt(k / mu);
    CHECK(m.frequencies.maxCoeff() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(m.zero_count() == 5);
}

TEST_CASE("toy monolayer modes") {
    const PhononModes m = toy_modes(monolayer_defect(6).cell);
    CHECK(m.size() == 213);
    CHECK(m.zero_count() == 3);
    const Eigen::MatrixXd gram = m.vectors.transpose() * m.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(213, 213)).cwiseAbs().maxCoeff() < 1e-8);
    for (Eigen::Index i = 1; i < m.frequencies.size(); ++i)
        if (!m.imaginary[static_cast<std::size_t>(i)] && !m.imaginary[static_cast<std::size_t>(i - 1)])
            CHECK(m.frequencies[i] >= m.frequencies[i - 1]);
}

TEST_CASE("translations stay exact null vectors") {
    const PhononModes m = toy_modes(stacked_defect(4, Stacking::ABC).cell);
    CHECK(m.zero_count() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(m.frequencies[static_cast<Eigen::Index>(i)] < zero_mode_threshold);
}

TEST_CASE("interlayer sliding springs remove the layer-sliding zero modes") {
    const Supercell aa = build_stacked(4, 4, 2, Stacking::AAprime);
    CHECK(toy_modes(aa).zero_count() == 3);
    ToyParams vertical_only;
    vertical_only.k_inter_shear = 0.;
    // Two rigid in-plane slides of one layer over the other cost nothing.
    CHECK(toy_modes(aa, vertical_only).zero_count() == 5);
}

TEST_CASE("DOS of a single mode") {
    const PhononModes m = stick_modes({0., 10.});
    const UniformGrid g = UniformGrid::covering(0., 20., 0.01);
    const DosCurve dos = phonon_dos(m, 1., g);
    const auto peak = std::max_element(dos.density.begin(), dos.density.end());
    CHECK(*peak == doctest::Approx(1. / std::sqrt(2. * std::numbers::pi)).epsilon(1e-6));
    CHECK(dos.energies[static_cast<std::size_t>(peak - dos.density.begin())] ==
          doctest::Approx(10.).epsilon(1e-9));
    CHECK(trapezoid(dos.density, g.step) == doctest::Approx(1.).epsilon(1e-3));
}

TEST_CASE("DOS integral counts modes; defect barely changes it") {
    const PhononModes defect = toy_modes(monolayer_defect(6).cell);
    const PhononModes pristine = toy_modes(build_monolayer(6, 6));
    const double sigma = 1.;
    const UniformGrid g = UniformGrid::covering(0., std::max(defect.frequencies.maxCoeff(),
                                                             pristine.frequencies.maxCoeff()) +
                                                       6. * sigma,
                                                0.05);
    const DosCurve a = phonon_dos(defect, sigma, g);
    const DosCurve b = phonon_dos(pristine, sigma, g);
    const double usable = static_cast<double>(defect.size() - defect.zero_count());
    // Low acoustic modes lose part of their Gaussian below 0 meV.
    CHECK(trapezoid(a.density, g.step) == doctest::Approx(usable).epsilon(0.01));
    const UniformGrid dflt = default_dos_grid(defect, sigma);
    CHECK(dflt.start == 0.);
    CHECK(dflt.last() >= defect.frequencies.maxCoeff() + 6. * sigma);

    const double na = static_cast<double>(defect.size());
    const double nb = static_cast<double>(pristine.size());
    double peak = 0., diff = 0.;
    for (std::size_t i = 0; i < g.count; ++i) {
        peak = std::max(peak, b.density[i] / nb);
        diff = std::max(diff, std::abs(a.density[i] / na - b.density[i] / nb));
    }
    CHECK(diff < 0.25 * peak);
}

TEST_CASE("mode character of simple patterns") {
    const DefectCell dc = monolayer_defect(4);
    const std::size_t N = dc.cell.size();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * N));
    Eigen::VectorXd x = z;
    for (std::size_t i = 0; i < N; ++i) {
        z[static_cast<Eigen::Index>(3 * i + 2)] = 1.;
        x[static_cast<Eigen::Index>(3 * i)] = 1.;
    }
    z.normalize();
    x.normalize();
    const ModeCharacter cz = mode_character(z, dc.vacancy);
    CHECK(cz.out_of_plane_fraction == doctest::Approx(1.));
    CHECK(cz.localization_ipr == doctest::Approx(1. / static_cast<double>(N)));
    CHECK(cz.neighbor_fraction == doctest::Approx(3. / static_cast<double>(N)));
    CHECK(mode_character(x, dc.vacancy).out_of_plane_fraction == doctest::Approx(0.));

    Eigen::VectorXd local = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(3 * N));
    for (std::size_t k : dc.vacancy.neighbors)
        local[static_cast<Eigen::Index>(3 * k + 2)] = 1.;
    local.normalize();
    const ModeCharacter cl = mode_character(local, dc.vacancy);
    for (double a : cl.neighbor_amplitude)
        CHECK(a == doctest::Approx(1.));
    CHECK(cl.neighbor_fraction == doctest::Approx(1.));
}

TEST_CASE("monolayer: the most localized out-of-plane mode sits on the neighbours") {
    const DefectCell dc = monolayer_defect(6);
    const PhononModes m = toy_modes(dc.cell);
    const std::size_t idx = most_localized_out_of_plane_mode(m, dc.vacancy);
    const ModeCharacter ch = mode_character(m, idx, dc.vacancy);
    CHECK(ch.out_of_plane_fraction > 0.9);
    const std::vector<double> w = atom_weights(m, idx);
    CHECK(std::accumulate(w.begin(), w.end(), 0.) == doctest::Approx(1.));
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                      [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::vector<std::size_t> top(order.begin(), order.begin() + 3);
    std::vector<std::size_t> nb(dc.vacancy.neighbors.begin(), dc.vacancy.neighbors.end());
    std::sort(top.begin(), top.end());
    std::sort(nb.begin(), nb.end());
    CHECK(top == nb);

    const std::size_t dm = locate_defect_mode(m, dc.vacancy);
    const ModeCharacter dch = mode_character(m, dm, dc.vacancy);
    CHECK(dch.out_of_plane_fraction > 0.9);
    CHECK(dch.neighbor_amplitude[0] == doctest::Approx(dch.neighbor_amplitude[1]));
    CHECK(dch.neighbor_amplitude[0] == doctest::Approx(dch.neighbor_amplitude[2]));
}

TEST_CASE("interlayer springs blue-shift the defect mode") {
    for (Stacking s : {Stacking::AAprime, Stacking::ABC}) {
        const DefectCell dc = stacked_defect(6, s);
        ToyParams off;
        off.k_inter = 0.;
        const PhononModes soft = toy_modes(dc.cell, off);
        const PhononModes stiff = toy_modes(dc.cell);
        const double hw_soft =
            soft.frequencies[static_cast<Eigen::Index>(locate_defect_mode(soft, dc.vacancy))];
        const double hw_stiff =
            stiff.frequencies[static_cast<Eigen::Index>(locate_defect_mode(stiff, dc.vacancy))];
        CHECK(hw_stiff > hw_soft);
    }
}

TEST_CASE("results do not depend on the worker count") {
    const ToyForceField field(stacked_defect(4, Stacking::ABC).cell, ToyParams{});
    const DisplacementForceSet d = generate_displacement_set(field);
    PhononModes one, many;
    {
        const ThreadLimit limit(1);
        one = modes_from_forceset(d);
    }
    {
        const ThreadLimit limit(4);
        many = modes_from_forceset(d);
    }
    CHECK(one.frequencies == many.frequencies);
    CHECK(one.vectors == many.vectors);
    const UniformGrid g = default_dos_grid(one, 1.);
    DosCurve a, b;
    {
        const ThreadLimit limit(1);
        a = phonon_dos(one, 1., g);
    }
    {
        const ThreadLimit limit(4);
        b = phonon_dos(one, 1., g);
    }
    CHECK(a == b);
}
