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
/// S = 1 spin algebra and the zero-field-splitting tensor type.
///
/// The basis order is fixed everywhere as |+1>, |0>, |-1>, so that
/// matrix index 0 is m_s = +1, index 1 is m_s = 0 and index 2 is
/// m_s = -1.

#include <complex>
#include <Eigen/Dense>

namespace spinrelax {
using Matrix3c = Eigen::Matrix3cd;

/// Spin projection quantum number of an S = 1 state.
enum class SpinState : int { plus = +1, zero = 0, minus = -1 };

/// Row/column of a spin state in the fixed basis.
constexpr int basis_index(SpinState m) {
    return 1 - static_cast<int>(m);
}

/// Cartesian spin operators for S = 1.
struct SpinMatrices {
    Matrix3c Sx;
    Matrix3c Sy;
    Matrix3c Sz;

    /// Access by Cartesian index 0, 1, 2.
    const Matrix3c& operator[](int a) const {
        return a == 0 ? Sx : (a == 1 ? Sy : Sz);
    }
};

/// The S = 1 matrices, built once.
const SpinMatrices& spin_one();

/// Symmetric 3x3 interaction kernel in GHz.
///
/// Also used for derivatives of the kernel along normal coordinates,
/// which share units and symmetry.
struct DTensor {
    Eigen::Matrix3d components = Eigen::Matrix3d::Zero();

    DTensor() = default;
    explicit DTensor(const Eigen::Matrix3d& c) : components(c) {
    }

    static DTensor diagonal(double xx, double yy, double zz) {
        return DTensor(Eigen::Vector3d(xx, yy, zz).asDiagonal());
    }

    /// Relative asymmetry ||D - D^T|| / ||D|| (0 for the zero tensor).
    double asymmetry() const;
    /// |tr D| / ||D|| (0 for the zero tensor).
    double relative_trace() const;
    /// Throws validation_error when asymmetry() > tol.
    void require_symmetric(double tol = 1e-12) const;
    /// (D + D^T) / 2.
    DTensor symmetrized() const;
    /// R D R^T.
    DTensor rotated(const Eigen::Matrix3d& R) const;

    double operator()(int a, int b) const {
        return components(a, b);
    }
    bool operator==(const DTensor&) const = default;
};

/// V = sum_ab D_ab S_a S_b in the |+1>, |0>, |-1> basis, in the units
/// of D. Validates symmetry first.
Matrix3c spin_operator(const DTensor& D);

/// <ms2| V |ms> for V = sum_ab D_ab S_a S_b.
std::complex<double> spin_matrix_element(const DTensor& D,
                                         SpinState ms,
                                         SpinState ms2);

/// Converts a second derivative with respect to the mass-weighted
/// coordinate R [A sqrt(amu)] into the dimensionless convention
/// q = R / sqrt(hbar / omega), i.e. multiplies by
/// hbar^2 / (amu A^2) / hw. hw in meV, must be positive.
DTensor dimensionless_second_derivative(const DTensor& d2D_dR2, double hw_meV);

/// First-derivative counterpart: multiplies by
/// sqrt(hbar^2 / (amu A^2) / hw).
DTensor dimensionless_first_derivative(const DTensor& dD_dR, double hw_meV);
} // namespace spinrelax
