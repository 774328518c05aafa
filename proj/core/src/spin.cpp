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

#include <spinrelax/spin.hpp>
#include <spinrelax/errors.hpp>
#include <spinrelax/units.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace spinrelax {
const SpinMatrices& spin_one() {
    static const SpinMatrices matrices = [] {
        using c = std::complex<double>;
        const double r = 1. / std::numbers::sqrt2;
        const c I(0., 1.);
        SpinMatrices m;
        m.Sx << 0., r, 0., r, 0., r, 0., r, 0.;
        m.Sy << 0., -I * r, 0., I * r, 0., -I * r, 0., I * r, 0.;
        m.Sz << 1., 0., 0., 0., 0., 0., 0., 0., -1.;
        return m;
    }();
    return matrices;
}

double DTensor::asymmetry() const {
    const double n = components.norm();
    if (n == 0.)
        return 0.;
    return (components - components.transpose()).norm() / n;
}

double DTensor::relative_trace() const {
    const double n = components.norm();
    if (n == 0.)
        return 0.;
    return std::abs(components.trace()) / n;
}

void DTensor::require_symmetric(double tol) const {
    const double a = asymmetry();
    if (a > tol) {
        std::ostringstream msg;
        msg << "D tensor is not symmetric (relative asymmetry " << a
            << " > " << tol << ")";
        throw validation_error(msg.str());
    }
}

DTensor DTensor::symmetrized() const {
    return DTensor(0.5 * (components + components.transpose()));
}

DTensor DTensor::rotated(const Eigen::Matrix3d& R) const {
    return DTensor(R * components * R.transpose());
}

Matrix3c spin_operator(const DTensor& D) {
    D.require_symmetric();
    const auto& S = spin_one();
    Matrix3c V = Matrix3c::Zero();
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (D(a, b) != 0.)
                V += D(a, b) * (S[a] * S[b]);
    return V;
}

std::complex<double> spin_matrix_element(const DTensor& D,
                                         SpinState ms,
                                         SpinState ms2) {
    return spin_operator(D)(basis_index(ms2), basis_index(ms));
}

DTensor dimensionless_second_derivative(const DTensor& d2D_dR2,
                                        double hw_meV) {
    if (!(hw_meV > 0.))
        throw domain_error("dimensionless_second_derivative: mode energy "
                           "must be positive");
    return DTensor(d2D_dR2.components *
                   (PhysicalConstants::hbar2_per_amu_A2_meV / hw_meV));
}

DTensor dimensionless_first_derivative(const DTensor& dD_dR, double hw_meV) {
    if (!(hw_meV > 0.))
        throw domain_error("dimensionless_first_derivative: mode energy "
                           "must be positive");
    return DTensor(dD_dR.components *
                   std::sqrt(PhysicalConstants::hbar2_per_amu_A2_meV / hw_meV));
}
} // namespace spinrelax
