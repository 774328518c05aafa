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
/// Spin-phonon couplings, channel-resolved spectral functions and
/// two-phonon relaxation rates.
///
/// The two phonons of a Raman event are taken to carry the same energy
/// (the GHz spin splitting is neglected against meV phonons), so the
/// spectral function is evaluated on its diagonal. Each mode's smeared
/// delta enters squared:
///   F(hw) = sum_i |Phi_i|^2 g_sigma(hw - hw_i)^2,
/// with g_sigma the unit-normalized Gaussian. An isolated mode therefore
/// contributes |Phi|^2 / (2 sqrt(pi) sigma) to the integral of F and its
/// rate falls as 1 / sigma.
///
/// Rates follow the golden rule
///   Gamma(T) = (4 pi / hbar) int d(hw) n(hw, T) (n(hw, T) + 1) F(hw).

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>
#include <spinrelax/errors.hpp>
#include <spinrelax/grid.hpp>
#include <spinrelax/spin.hpp>
#include <spinrelax/zfs.hpp>

namespace spinrelax {
/// Default Gaussian smearing [meV].
inline constexpr double default_sigma = 1.0;
/// Default upper limit on the phonon energies retained [meV].
inline constexpr double default_cutoff = 40.0;
/// Relative deviation of the refined-grid self-check that triggers a
/// warning.
inline constexpr double quadrature_tolerance = 0.01;

enum class Channel {
    /// |+1> <-> |-1>
    double_quantum,
    /// |0> <-> |+-1>
    single_quantum,
    /// Fluctuation of the |0> <-> |+1> splitting.
    dephasing,
};

inline constexpr std::array<Channel, 3> all_channels = {
    Channel::double_quantum, Channel::single_quantum, Channel::dephasing};

/// "double", "single" or "dephase".
std::string_view channel_label(Channel c);
/// Accepts the short labels and the enumerator names.
Channel parse_channel(std::string_view label);

/// Which Taylor term of V(q) defines the coupling.
enum class CouplingOrder {
    /// Phi = 1/2 d2V/dq2, the two-phonon coupling.
    second,
    /// Phi = dV/dq. Exploration only; the rate formula is unchanged.
    first,
};

struct ModeCoupling {
    std::size_t mode = 0;
    /// [meV]
    double hw = 0.;
    /// Hermitian spin operator in the |+1>, |0>, |-1> basis [meV].
    Matrix3c phi = Matrix3c::Zero();
};

struct CouplingSet {
    std::vector<ModeCoupling> modes;
    /// [meV]
    double cutoff = default_cutoff;
};

/// Phi_i = 1/2 sum_ab (d2D_ab / dq_i^2) S_a S_b, converted to meV. Modes
/// above `cutoff` are dropped; modes with hw below the zero-mode
/// threshold are dropped with a warning.
CouplingSet build_couplings(const DTensorDerivatives& derivs,
                            double cutoff = default_cutoff,
                            Warnings* warnings = nullptr,
                            CouplingOrder order = CouplingOrder::second);

/// Squared coupling [meV^2]:
///   double_quantum  |<+1|Phi|-1>|^2
///   single_quantum  |<0|Phi|+1>|^2 + |<0|Phi|-1>|^2
///   dephasing       |<+1|Phi|+1> - <0|Phi|0>|^2
double channel_coefficient(const Matrix3c& phi, Channel channel);

struct SpectralFunction {
    Channel channel = Channel::double_quantum;
    /// [meV]
    double sigma = default_sigma;
    /// Energies [meV].
    UniformGrid grid;
    std::vector<double> values;
    /// (hw_i [meV], |Phi_i|^2 [meV^2]) per retained mode.
    std::vector<std::pair<double, double>> sticks;
};

/// Trapezoid grid from 0 to cutoff + 6 sigma in steps of sigma / 10.
UniformGrid default_spectral_grid(double sigma = default_sigma,
                                  double cutoff = default_cutoff);

/// F on `grid`, which must start at hw >= 0.
SpectralFunction spectral_function(const CouplingSet& couplings,
                                   Channel channel,
                                   double sigma,
                                   const UniformGrid& grid);

/// Golden-rule rate [Hz] by trapezoid quadrature on F's grid. The
/// hw = 0 point contributes nothing. When the same integral on a grid
/// of half the step differs by more than quadrature_tolerance, a
/// warning is added.
double relaxation_rate(const SpectralFunction& F,
                       double T_K,
                       Warnings* warnings = nullptr);

/// Closed form of each mode's Gaussian-squared integral with the Bose
/// factor taken at the mode energy:
///   (4 pi / hbar) sum_i |Phi_i|^2 n_i (n_i + 1) / (2 sqrt(pi) sigma).
double direct_sum_rate(const CouplingSet& couplings,
                       Channel channel,
                       double sigma,
                       double T_K);

struct RateCurve {
    Channel channel = Channel::double_quantum;
    /// [K]
    std::vector<double> temperatures;
    /// [Hz]
    std::vector<double> rates;
    /// [meV]
    double sigma = default_sigma;
    /// [meV]
    double cutoff = default_cutoff;
    std::string source;
    /// Quadrature self-check failures, one summary line per curve.
    Warnings warnings;

    /// 1 / Gamma per point [s], infinity where Gamma = 0.
    std::vector<double> t1() const;
};

RateCurve rate_curve(const SpectralFunction& F,
                     const std::vector<double>& temperatures);

RateCurve rate_curve(const CouplingSet& couplings,
                     Channel channel,
                     double sigma,
                     const std::vector<double>& temperatures);
} // namespace spinrelax
