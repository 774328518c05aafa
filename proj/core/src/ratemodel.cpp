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
#include <spinrelax/ratemodel.hpp>
#include <spinrelax/units.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>

namespace spinrelax {
namespace {
/// n (n + 1) and its derivative with respect to hw.
std::pair<double, double> pair_factor_and_slope(double hw, double T_K) {
    const double kT = PhysicalConstants::kB_meV_per_K * T_K;
    const double x = hw / kT;
    if (x > 600.) {
        const double e = std::exp(-x);
        return {e, -e / kT};
    }
    const double s = std::sinh(0.5 * x), c = std::cosh(0.5 * x);
    return {0.25 / (s * s), -0.25 * c / (s * s * s) / kT};
}

constexpr double model_floor = 1e-300;

/// Parameters: for each mode (a, w) with A = a^2, hw = exp(w); then s
/// with A_s = s^2 when fitted.
struct LogRateFunctor : Eigen::DenseFunctor<double> {
    const std::vector<double>& T;
    std::vector<double> log_rate;
    std::size_t n_modes;
    bool fit_As;

    LogRateFunctor(const std::vector<double>& temps,
                   const std::vector<double>& rates,
                   std::size_t n,
                   bool with_As)
        : Eigen::DenseFunctor<double>(
              static_cast<int>(2 * n + (with_As ? 1 : 0)),
              static_cast<int>(temps.size())),
          T(temps), n_modes(n), fit_As(with_As) {
        for (double r : rates)
            log_rate.push_back(std::log(r));
    }

    double model(const InputType& x, std::size_t k) const {
        double m = fit_As ? x[2 * n_modes] * x[2 * n_modes] : 0.;
        for (std::size_t i = 0; i < n_modes; ++i) {
            const auto j = static_cast<Eigen::Index>(2 * i);
            m += x[j] * x[j] * pair_factor_and_slope(std::exp(x[j + 1]), T[k]).first;
        }
        return std::max(m, model_floor);
    }

    int operator()(const InputType& x, ValueType& f) const {
        for (std::size_t k = 0; k < T.size(); ++k)
            f[static_cast<Eigen::Index>(k)] = std::log(model(x, k)) - log_rate[k];
        return 0;
    }

    int df(const InputType& x, JacobianType& J) const {
        for (std::size_t k = 0; k < T.size(); ++k) {
            const auto row = static_cast<Eigen::Index>(k);
            const double m = model(x, k);
            for (std::size_t i = 0; i < n_modes; ++i) {
                const auto j = static_cast<Eigen::Index>(2 * i);
                const double hw = std::exp(x[j + 1]);
                const auto [P, dP] = pair_factor_and_slope(hw, T[k]);
                J(row, j) = 2. * x[j] * P / m;
                J(row, j + 1) = x[j] * x[j] * dP * hw / m;
            }
            if (fit_As) {
                const auto j = static_cast<Eigen::Index>(2 * n_modes);
                J(row, j) = 2. * x[j] / m;
            }
        }
        return 0;
    }
};

struct StartResult {
    EffectiveModeModel model;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
};

void combinations(std::size_t n,
                  std::size_t k,
                  std::size_t first,
                  std::vector<std::size_t>& current,
                  std::vector<std::vector<std::size_t>>& out) {
    if (current.size() == k) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = first; i < n; ++i) {
        current.push_back(i);
        combinations(n, k, i + 1, current, out);
        current.pop_back();
    }
}

void require_curve(const std::vector<double>& T, const std::vector<double>& rates) {
    if (T.size() != rates.size())
        throw validation_error("temperature and rate lists differ in length");
    for (std::size_t k = 0; k < T.size(); ++k)
        if (!(T[k] > 0.) || !std::isfinite(T[k]))
            throw validation_error("temperatures must be positive and finite");
}
} // namespace

void EffectiveModeModel::validate() const {
    for (const auto& m : modes)
        if (!(m.A >= 0.) || !(m.hw > 0.))
            throw validation_error("effective modes need A >= 0 and hw > 0");
    if (!(A_s >= 0.))
        throw validation_error("sample constant A_s must be non-negative");
}

double eval_model(const EffectiveModeModel& m, double T_K) {
    if (!(T_K >= 0.))
        throw domain_error("temperature must be non-negative");
    double g = m.A_s;
    for (const auto& mode : m.modes)
        g += mode.A * bose_pair_factor(mode.hw, T_K);
    return g;
}

EffectiveModeModel fit_effective_modes(const std::vector<double>& T,
                                       const std::vector<double>& rates,
                                       const FitOptions& options) {
    require_curve(T, rates);
    const std::size_t n = options.n_modes;
    if (n == 0)
        throw validation_error("n_modes must be at least 1");
    if (T.size() < 2 * n + 1)
        throw validation_error("fit needs at least " + std::to_string(2 * n + 1) +
                               " points, got " + std::to_string(T.size()));
    for (double r : rates)
        if (!(r > 0.) || !std::isfinite(r))
            throw validation_error("effective-mode fit needs positive rates");
    if (!(options.cutoff > 1.))
        throw validation_error("fit cutoff must exceed 1 meV");

    const auto starts = spaced_points(1., options.cutoff, fit_start_count, true);
    std::vector<std::vector<std::size_t>> combos;
    std::vector<std::size_t> current;
    combinations(starts.size(), n, 0, current, combos);

    double mean_log_rate = 0.;
    for (double r : rates)
        mean_log_rate += std::log(r);
    mean_log_rate /= static_cast<double>(rates.size());
    const double min_rate = *std::min_element(rates.begin(), rates.end());

    std::vector<StartResult> results(combos.size());
    parallel_for(combos.size(), [&](std::size_t c) {
        LogRateFunctor f(T, rates, n, options.fit_As);
        Eigen::VectorXd x(f.inputs());
        // Amplitudes matched to the mean log rate of the data.
        double mean_log_P = 0.;
        for (double t : T) {
            double P = 0.;
            for (std::size_t i : combos[c])
                P += pair_factor_and_slope(starts[i], t).first;
            mean_log_P += std::log(std::max(P, model_floor));
        }
        mean_log_P /= static_cast<double>(T.size());
        const double A0 = std::exp(mean_log_rate - mean_log_P);
        for (std::size_t i = 0; i < n; ++i) {
            x[static_cast<Eigen::Index>(2 * i)] = std::sqrt(A0);
            x[static_cast<Eigen::Index>(2 * i + 1)] = std::log(starts[combos[c][i]]);
        }
        if (options.fit_As)
            x[static_cast<Eigen::Index>(2 * n)] = std::sqrt(0.1 * min_rate);

        Eigen::LevenbergMarquardt<LogRateFunctor> lm(f);
        lm.setXtol(fit_xtol);
        lm.setFtol(1e-14);
        lm.setMaxfev(fit_max_evaluations);
        const auto status = lm.minimize(x);

        StartResult& r = results[c];
        r.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                      status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                      x.allFinite();
        Eigen::VectorXd fv(f.values());
        f(x, fv);
        r.residual = std::sqrt(fv.squaredNorm() / static_cast<double>(fv.size()));
        if (!std::isfinite(r.residual))
            r.converged = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = x[static_cast<Eigen::Index>(2 * i)];
            r.model.modes.push_back(
                {a * a, std::exp(x[static_cast<Eigen::Index>(2 * i + 1)])});
        }
        std::sort(r.model.modes.begin(), r.model.modes.end(),
                  [](const EffectiveMode& a, const EffectiveMode& b) {
                      return a.hw < b.hw;
                  });
        if (options.fit_As) {
            const double s = x[static_cast<Eigen::Index>(2 * n)];
            r.model.A_s = s * s;
        }
        r.model.residual = r.residual;
    });

    const StartResult* best = nullptr;
    double best_any = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
        best_any = std::min(best_any, r.residual);
        if (!r.converged)
            continue;
        if (best == nullptr || r.residual < best->residual * (1. - 1e-12) ||
            (r.residual <= best->residual * (1. + 1e-12) &&
             r.model.modes.front().hw < best->model.modes.front().hw))
            best = &r;
    }
    if (best == nullptr) {
        std::ostringstream msg;
        msg << "effective-mode fit did not converge from any of "
            << combos.size() << " starts (best log-RMS residual " << best_any
            << ")";
        throw computation_error(msg.str());
    }
    return best->model;
}

EffectiveModeModel fit_effective_modes(const RateCurve& curve,
                                       const FitOptions& options) {
    return fit_effective_modes(curve.temperatures, curve.rates, options);
}

PowerLawFit fit_power_law(const std::vector<double>& T,
                          const std::vector<double>& rates,
                          std::array<double, 2> window) {
    require_curve(T, rates);
    if (!(window[0] > 0.) || !(window[1] > window[0]))
        throw validation_error("power-law window must satisfy 0 < Tmin < Tmax");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < T.size(); ++k) {
        if (T[k] < window[0] || T[k] > window[1])
            continue;
        if (!(rates[k] > 0.)) {
            std::ostringstream msg;
            msg << "non-positive rate " << rates[k] << " Hz at T = " << T[k]
                << " K inside the power-law window";
            throw validation_error(msg.str());
        }
        x.push_back(std::log(T[k]));
        y.push_back(std::log(rates[k]));
    }
    if (x.size() < 4) {
        std::ostringstream msg;
        msg << "power-law fit needs at least 4 points in [" << window[0]
            << ", " << window[1] << "] K, found " << x.size();
        throw validation_error(msg.str());
    }
    const auto m = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(m, 2);
    Eigen::VectorXd b(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        A(k, 0) = x[static_cast<std::size_t>(k)];
        A(k, 1) = 1.;
        b[k] = y[static_cast<std::size_t>(k)];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    PowerLawFit out;
    out.exponent = c[0];
    out.prefactor = std::exp(c[1]);
    out.window = window;
    out.points = x.size();
    out.residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(m));
    return out;
}

PowerLawFit fit_power_law(const RateCurve& curve, std::array<double, 2> window) {
    return fit_power_law(curve.temperatures, curve.rates, window);
}

ComparisonReport compare_reference(const std::vector<double>& T,
                                   const std::vector<double>& rates,
                                   const ReferenceTable& reference) {
    require_curve(T, rates);
    if (T.empty())
        throw validation_error("computed curve is empty");
    for (std::size_t k = 1; k < T.size(); ++k)
        if (!(T[k] > T[k - 1]))
            throw validation_error("computed curve temperatures must increase");
    if (reference.temperatures.size() != reference.rates.size())
        throw validation_error("reference table columns differ in length");
    for (std::size_t k = 1; k < reference.temperatures.size(); ++k)
        if (!(reference.temperatures[k] > reference.temperatures[k - 1]))
            throw validation_error("reference temperatures must increase");

    ComparisonReport out;
    double sum = 0.;
    std::size_t used = 0;
    for (std::size_t p = 0; p < reference.temperatures.size(); ++p) {
        ComparisonPoint cp;
        cp.T = reference.temperatures[p];
        cp.reference = reference.rates[p];
        const auto hi = std::lower_bound(T.begin(), T.end(), cp.T);
        if (hi == T.end() || (*hi != cp.T && hi == T.begin())) {
            cp.out_of_range = true;
            ++out.flagged;
            out.points.push_back(cp);
            continue;
        }
        const auto k = static_cast<std::size_t>(hi - T.begin());
        if (*hi == cp.T) {
            cp.computed = rates[k];
        } else {
            const double t0 = T[k - 1], t1 = T[k];
            const double g0 = rates[k - 1], g1 = rates[k];
            if (g0 > 0. && g1 > 0.) {
                const double u = std::log(cp.T / t0) / std::log(t1 / t0);
                cp.computed = std::exp(std::log(g0) + u * std::log(g1 / g0));
            } else {
                const double u = (cp.T - t0) / (t1 - t0);
                cp.computed = g0 + u * (g1 - g0);
            }
        }
        if (cp.reference > 0.)
            cp.ratio = cp.computed / cp.reference;
        if (cp.ratio > 0.) {
            sum += std::log(cp.ratio) * std::log(cp.ratio);
            ++used;
        }
        out.points.push_back(cp);
    }
    out.log_rms = used > 0 ? std::sqrt(sum / static_cast<double>(used)) : 0.;
    return out;
}

ComparisonReport compare_reference(const RateCurve& curve,
                                   const ReferenceTable& reference) {
    return compare_reference(curve.temperatures, curve.rates, reference);
}
} // namespace spinrelax
