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
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/units.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

namespace spinrelax {
namespace {
constexpr double rate_prefactor =
    4. * std::numbers::pi / PhysicalConstants::hbar_meV_s;

/// Unit-normalized Gaussian squared.
double gaussian_squared(double x, double sigma) {
    const double g = std::exp(-0.5 * (x / sigma) * (x / sigma)) /
                     (sigma * std::sqrt(2. * std::numbers::pi));
    return g * g;
}

std::vector<double> evaluate_sticks(
    const std::vector<std::pair<double, double>>& sticks,
    double sigma,
    const UniformGrid& grid) {
    std::vector<double> v(grid.count, 0.);
    parallel_for(grid.count, [&](std::size_t g) {
        const double e = grid[g];
        double s = 0.;
        for (const auto& [hw, w] : sticks)
            s += w * gaussian_squared(e - hw, sigma);
        v[g] = s;
    });
    return v;
}

double integrate_rate(const std::vector<double>& F,
                      const UniformGrid& grid,
                      double T_K) {
    std::vector<double> y(grid.count, 0.);
    for (std::size_t g = 0; g < grid.count; ++g) {
        const double e = grid[g];
        if (e > 0. && F[g] != 0.) {
            const double n = bose_occupation(e, T_K);
            y[g] = n * (n + 1.) * F[g];
        }
    }
    return rate_prefactor * trapezoid(y, grid.step);
}
} // namespace

std::string_view channel_label(Channel c) {
    switch (c) {
    case Channel::double_quantum:
        return "double";
    case Channel::single_quantum:
        return "single";
    case Channel::dephasing:
        return "dephase";
    }
    return "?";
}

Channel parse_channel(std::string_view label) {
    if (label == "double" || label == "double_quantum")
        return Channel::double_quantum;
    if (label == "single" || label == "single_quantum")
        return Channel::single_quantum;
    if (label == "dephase" || label == "dephasing")
        return Channel::dephasing;
    throw validation_error("unknown channel '" + std::string(label) +
                           "' (expected double, single or dephase)");
}

CouplingSet build_couplings(const DTensorDerivatives& derivs,
                            double cutoff,
                            Warnings* warnings,
                            CouplingOrder order) {
    if (!(cutoff > 0.))
        throw validation_error("cutoff must be positive");
    CouplingSet out;
    out.cutoff = cutoff;
    std::size_t dropped = 0;
    for (const auto& m : derivs.modes) {
        if (!(m.hw >= zero_mode_threshold)) {
            ++dropped;
            continue;
        }
        if (m.hw > cutoff)
            continue;
        ModeCoupling c;
        c.mode = m.mode;
        c.hw = m.hw;
        const double factor = order == CouplingOrder::second ? 0.5 : 1.;
        const DTensor& T = order == CouplingOrder::second ? m.second : m.first;
        c.phi = (factor * PhysicalConstants::ghz_to_meV) *
                spin_operator(T.symmetrized());
        out.modes.push_back(std::move(c));
    }
    if (warnings) {
        if (dropped > 0)
            warnings->push_back("dropped " + std::to_string(dropped) +
                                " zero-frequency modes from the couplings");
        if (out.modes.empty()) {
            std::ostringstream msg;
            msg << "no modes at or below the " << cutoff
                << " meV cutoff; all rates are zero";
            warnings->push_back(msg.str());
        }
    }
    return out;
}

double channel_coefficient(const Matrix3c& phi, Channel channel) {
    const int p = basis_index(SpinState::plus);
    const int z = basis_index(SpinState::zero);
    const int m = basis_index(SpinState::minus);
    switch (channel) {
    case Channel::double_quantum:
        return std::norm(phi(p, m));
    case Channel::single_quantum:
        return std::norm(phi(z, p)) + std::norm(phi(z, m));
    case Channel::dephasing:
        return std::norm(phi(p, p) - phi(z, z));
    }
    return 0.;
}

UniformGrid default_spectral_grid(double sigma, double cutoff) {
    if (!(sigma > 0.))
        throw validation_error("sigma must be positive");
    if (!(cutoff > 0.))
        throw validation_error("cutoff must be positive");
    return UniformGrid::covering(0., cutoff + 6. * sigma, sigma / 10.);
}

SpectralFunction spectral_function(const CouplingSet& couplings,
                                   Channel channel,
                                   double sigma,
                                   const UniformGrid& grid) {
    if (!(sigma > 0.))
        throw validation_error("sigma must be positive");
    if (!(grid.step > 0.) || grid.count < 2)
        throw validation_error("spectral grid needs a positive step and at "
                               "least two points");
    if (grid.start < 0.)
        throw validation_error("spectral grid starts below 0 meV");
    SpectralFunction F;
    F.channel = channel;
    F.sigma = sigma;
    F.grid = grid;
    F.sticks.reserve(couplings.modes.size());
    for (const auto& m : couplings.modes)
        F.sticks.emplace_back(m.hw, channel_coefficient(m.phi, channel));
    F.values = evaluate_sticks(F.sticks, sigma, grid);
    return F;
}

double relaxation_rate(const SpectralFunction& F,
                       double T_K,
                       Warnings* warnings) {
    if (!(T_K >= 0.))
        throw domain_error("temperature must be non-negative");
    if (F.values.size() != F.grid.count)
        throw validation_error("spectral values do not match the grid");
    if (T_K == 0.)
        return 0.;
    const double rate = integrate_rate(F.values, F.grid, T_K);
    if (warnings && rate > 0.) {
        UniformGrid fine{F.grid.start, F.grid.step / 2.,
                         2 * F.grid.count - 1};
        const double refined =
            integrate_rate(evaluate_sticks(F.sticks, F.sigma, fine), fine, T_K);
        const double dev = std::abs(rate - refined) / refined;
        if (dev > quadrature_tolerance) {
            std::ostringstream msg;
            msg << "quadrature at T = " << T_K << " K changes by " << dev * 100.
                << "% on a grid of half the step; refine the energy grid";
            warnings->push_back(msg.str());
        }
    }
    return rate;
}

double direct_sum_rate(const CouplingSet& couplings,
                       Channel channel,
                       double sigma,
                       double T_K) {
    if (!(sigma > 0.))
        throw validation_error("sigma must be positive");
    if (!(T_K >= 0.))
        throw domain_error("temperature must be non-negative");
    double s = 0.;
    for (const auto& m : couplings.modes) {
        const double n = bose_occupation(m.hw, T_K);
        s += channel_coefficient(m.phi, channel) * n * (n + 1.);
    }
    return rate_prefactor * s / (2. * std::sqrt(std::numbers::pi) * sigma);
}

std::vector<double> RateCurve::t1() const {
    std::vector<double> out(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        out[i] = rates[i] > 0. ? 1. / rates[i]
                               : std::numeric_limits<double>::infinity();
    return out;
}

RateCurve rate_curve(const SpectralFunction& F,
                     const std::vector<double>& temperatures) {
    RateCurve out;
    out.channel = F.channel;
    out.sigma = F.sigma;
    out.temperatures = temperatures;
    out.rates.resize(temperatures.size());
    std::vector<Warnings> per_point(temperatures.size());
    parallel_for(temperatures.size(), [&](std::size_t i) {
        out.rates[i] = relaxation_rate(F, temperatures[i], &per_point[i]);
    });
    std::size_t affected = 0;
    std::string first;
    for (auto& w : per_point) {
        if (w.empty())
            continue;
        if (affected++ == 0)
            first = w.front();
    }
    if (affected > 0) {
        std::string msg = std::string(channel_label(F.channel)) + ": " + first;
        if (affected > 1)
            msg += " (" + std::to_string(affected - 1) + " more temperatures affected)";
        out.warnings.push_back(std::move(msg));
    }
    return out;
}

RateCurve rate_curve(const CouplingSet& couplings,
                     Channel channel,
                     double sigma,
                     const std::vector<double>& temperatures) {
    const auto F = spectral_function(couplings, channel, sigma,
                                     default_spectral_grid(sigma, couplings.cutoff));
    RateCurve out = rate_curve(F, temperatures);
    out.cutoff = couplings.cutoff;
    return out;
}
} // namespace spinrelax
