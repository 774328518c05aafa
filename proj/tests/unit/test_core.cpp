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

#include <cmath>
#include <numbers>
#include <spinrelax/errors.hpp>
#include <spinrelax/grid.hpp>
#include <spinrelax/spin.hpp>
#include <spinrelax/units.hpp>

using namespace spinrelax;
using C = PhysicalConstants;

namespace {
Eigen::Matrix3d rotation(double angle, const Eigen::Vector3d& axis) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}
} // namespace

TEST_CASE("constants re-derive from SI values") {
    double dev = 1.;
    const PhysicalConstants derived = derived_constants_check(dev);
    (void)derived;
    CHECK(dev < 1e-5);
    CHECK(C::hbar_meV_s == doctest::Approx(6.582119569509067e-13).epsilon(1e-12));
    CHECK(C::dipolar_GHz_A3() == doctest::Approx(52.04).epsilon(1e-4));
    CHECK(C::hbar2_per_amu_A2_meV == doctest::Approx(4.180).epsilon(1e-3));
}

TEST_CASE("kB at 1 K exceeds h at 1 GHz") {
    CHECK(C::kB_meV_per_K * 1.0 > C::ghz_to_meV * 1.0);
    CHECK(C::kB_meV_per_K == doctest::Approx(0.0862).epsilon(1e-3));
    CHECK(ghz_to_mev(mev_to_ghz(3.7)) == doctest::Approx(3.7).epsilon(1e-15));
}

TEST_CASE("bose occupation examples") {
    CHECK(bose_occupation(10., 0.) == 0.);
    const double kT = C::kB_meV_per_K * 300.;
    CHECK(bose_occupation(kT, 300.) == doctest::Approx(1. / (std::numbers::e - 1.)).epsilon(1e-12));
    CHECK(bose_occupation(25.852, 300.) == doctest::Approx(0.58198).epsilon(1e-4));
    const double n1 = bose_occupation(1., 300.);
    CHECK(n1 == doctest::Approx(25.35).epsilon(2e-3));
    CHECK(std::abs(n1 - (kT - 0.5)) / n1 < 5e-3);
    CHECK_THROWS_AS(bose_occupation(0., 300.), domain_error);
    CHECK_THROWS_AS(bose_occupation(-1., 300.), domain_error);
    CHECK_THROWS_AS(bose_occupation(10., -1.), domain_error);
}

TEST_CASE("bose occupation increases with temperature") {
    double prev = 0.;
    for (double T = 1.; T <= 1000.; T *= 1.3) {
        const double n = bose_occupation(15., T);
        CHECK(n >= prev);
        prev = n;
    }
}

TEST_CASE("pair factor matches n(n+1) and the sinh form") {
    CHECK(bose_pair_factor(15., 300.) == doctest::Approx(2.888388).epsilon(1e-6));
    for (double hw : {0.5, 3., 15., 40., 120.}) {
        for (double T : {5., 50., 150., 300., 400.}) {
            const double n = bose_occupation(hw, T);
            const double x = hw / (2. * C::kB_meV_per_K * T);
            const double sinh_form = 1. / (4. * std::sinh(x) * std::sinh(x));
            const double pair = bose_pair_factor(hw, T);
            if (n * (n + 1.) > 1e-250)
                CHECK(std::abs(n * (n + 1.) - sinh_form) <= 1e-12 * sinh_form);
            if (pair > 1e-250)
                CHECK(std::abs(pair - sinh_form) <= 1e-12 * sinh_form);
        }
    }
    CHECK(bose_pair_factor(15., 0.) == 0.);
}

TEST_CASE("spin one algebra") {
    const auto& S = spin_one();
    const std::complex<double> i(0., 1.);
    CHECK((S.Sx * S.Sy - S.Sy * S.Sx - i * S.Sz).norm() < 1e-14);
    CHECK((S.Sy * S.Sz - S.Sz * S.Sy - i * S.Sx).norm() < 1e-14);
    CHECK((S.Sz * S.Sx - S.Sx * S.Sz - i * S.Sy).norm() < 1e-14);
    const Matrix3c S2 = S.Sx * S.Sx + S.Sy * S.Sy + S.Sz * S.Sz;
    CHECK((S2 - 2. * Matrix3c::Identity()).norm() < 1e-14);
    for (int a = 0; a < 3; ++a)
        CHECK((S[a] - S[a].adjoint()).norm() < 1e-15);
    CHECK(S.Sz(0, 0).real() == 1.);
    CHECK(S.Sz(1, 1).real() == 0.);
    CHECK(S.Sz(2, 2).real() == -1.);
    CHECK(basis_index(SpinState::plus) == 0);
    CHECK(basis_index(SpinState::zero) == 1);
    CHECK(basis_index(SpinState::minus) == 2);
}

TEST_CASE("spin matrix elements of simple tensors") {
    const double D0 = 2.74;
    const DTensor axial = DTensor::diagonal(-D0 / 3., -D0 / 3., 2. * D0 / 3.);
    CHECK(std::abs(spin_matrix_element(axial, SpinState::plus, SpinState::minus)) < 1e-15);
    const auto pp = spin_matrix_element(axial, SpinState::plus, SpinState::plus);
    const auto zz = spin_matrix_element(axial, SpinState::zero, SpinState::zero);
    CHECK((pp - zz).real() == doctest::Approx(D0).epsilon(1e-14));
    CHECK(std::abs((pp - zz).imag()) < 1e-15);

    const double E = 0.37;
    const DTensor rhombic = DTensor::diagonal(E, -E, 0.);
    const auto pm = spin_matrix_element(rhombic, SpinState::plus, SpinState::minus);
    CHECK(pm.real() == doctest::Approx(E).epsilon(1e-14));
    CHECK(std::abs(pm.imag()) < 1e-15);

    Eigen::Matrix3d asym = Eigen::Matrix3d::Zero();
    asym(0, 1) = 1.;
    CHECK_THROWS_AS(spin_matrix_element(DTensor(asym), SpinState::plus, SpinState::minus),
                    validation_error);
}

TEST_CASE("spin operator is hermitian and transforms with rotations") {
    Eigen::Matrix3d m;
    m << 0.3, -0.2, 0.7, -0.2, -1.1, 0.05, 0.7, 0.05, 0.8;
    const DTensor D(m);
    const Matrix3c V = spin_operator(D);
    CHECK((V - V.adjoint()).norm() < 1e-14);

    const DTensor rhombic = DTensor::diagonal(0.5, -0.2, -0.3);
    const DTensor rotated = rhombic.rotated(rotation(std::numbers::pi / 2., Eigen::Vector3d::UnitZ()));
    CHECK(rotated(0, 0) == doctest::Approx(-0.2));
    CHECK(rotated(1, 1) == doctest::Approx(0.5));
    const auto before = spin_matrix_element(rhombic, SpinState::plus, SpinState::minus);
    const auto after = spin_matrix_element(rotated, SpinState::plus, SpinState::minus);
    CHECK(after.real() == doctest::Approx(-before.real()).epsilon(1e-12));
}

TEST_CASE("dtensor helpers") {
    const DTensor d = DTensor::diagonal(1., -0.5, -0.5);
    CHECK(d.asymmetry() == 0.);
    CHECK(d.relative_trace() < 1e-16);
    CHECK(DTensor().asymmetry() == 0.);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = 1e-3;
    const DTensor a(m);
    CHECK(a.asymmetry() > 1e-4);
    CHECK_THROWS_AS(a.require_symmetric(), validation_error);
    CHECK(a.symmetrized().asymmetry() == 0.);
}

TEST_CASE("dimensionless derivatives") {
    const DTensor X = DTensor::diagonal(1., -2., 1.);
    const DTensor one = dimensionless_second_derivative(X, C::hbar2_per_amu_A2_meV);
    CHECK((one.components - X.components).norm() < 1e-14);
    const DTensor half = dimensionless_second_derivative(X, 2. * C::hbar2_per_amu_A2_meV);
    CHECK((half.components - 0.5 * X.components).norm() < 1e-14);
    CHECK(dimensionless_second_derivative(DTensor(), 7.).components.norm() == 0.);
    const DTensor first = dimensionless_first_derivative(X, 4. * C::hbar2_per_amu_A2_meV);
    CHECK((first.components - 0.5 * X.components).norm() < 1e-14);
    CHECK_THROWS_AS(dimensionless_second_derivative(X, 0.), domain_error);
    CHECK_THROWS_AS(dimensionless_first_derivative(X, -1.), domain_error);
}

TEST_CASE("grids") {
    const auto lin = spaced_points(10., 400., 40, false);
    REQUIRE(lin.size() == 40);
    CHECK(lin.front() == 10.);
    CHECK(lin.back() == 400.);
    const auto lg = spaced_points(10., 400., 40, true);
    CHECK(lg.front() == 10.);
    CHECK(lg.back() == 400.);
    CHECK(lg[1] / lg[0] == doctest::Approx(lg[39] / lg[38]).epsilon(1e-12));
    CHECK(spaced_points(3., 5., 1, true) == std::vector<double>{3.});

    const UniformGrid g = UniformGrid::covering(0., 1., 0.3);
    CHECK(g.count == 5);
    CHECK(g.last() >= 1.);
    CHECK_THROWS_AS(UniformGrid::covering(0., 1., 0.), validation_error);
    CHECK_THROWS_AS(UniformGrid::covering(1., 0., 0.1), validation_error);

    std::vector<double> y;
    const UniformGrid fine = UniformGrid::covering(0., 2., 0.001);
    for (double x : fine.values())
        y.push_back(x * x);
    const double top = fine.last();
    CHECK(trapezoid(y, fine.step) == doctest::Approx(top * top * top / 3.).epsilon(1e-6));
}
