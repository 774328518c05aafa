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

/// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
/// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>
#include <spinrelax/io_formats.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/ratemodel.hpp>
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/toygen.hpp>
#include <spinrelax/units.hpp>
#include <spinrelax/zfs.hpp>

#include "support.hpp"

using namespace spinrelax;

namespace {
struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    /// Records a failed check; passing checks stay silent.
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed: " << what << "] ";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Second-derivative tensor with |<+1|Phi|-1>|^2 = 1 meV^2.
DTensorDerivatives unit_mode(double hw) {
    const double E = 2. / PhysicalConstants::ghz_to_meV;
    DTensorDerivatives d;
    d.modes.push_back({0, hw, DTensor(), DTensor::diagonal(E, -E, 0.), ""});
    return d;
}

RateCurve toy_curve(const ToyCase& c, Channel ch, const std::vector<double>& T) {
    const CouplingSet cs = build_couplings(extract_derivatives(c.samples, c.modes));
    return rate_curve(cs, ch, default_sigma, T);
}

const ToyCase& toy(ToyVariant v) {
    static const ToyCase mono = generate_case(ToyVariant::monolayer, 6);
    static const ToyCase aa = generate_case(ToyVariant::aa_prime, 6);
    static const ToyCase abc = generate_case(ToyVariant::abc, 6);
    return v == ToyVariant::monolayer ? mono : v == ToyVariant::aa_prime ? aa : abc;
}

// 1 ---------------------------------------------------------------------

void zfs_fixtures(Outcome& o) {
    const auto t0 = Clock::now();
    double worst = 0.;
    for (const auto& e : zfs_reference_table()) {
        const ZfsSummary s = diagonalize_dtensor(axial_dtensor(e.D));
        worst = std::max({worst, std::abs(s.D - e.D), std::abs(s.E)});
    }
    const double dt = seconds_since(t0);
    o.require(worst <= 1e-9, "|D - table| <= 1e-9 GHz");
    o.require(dt < 1., "runtime < 1 s");
    o.detail << zfs_reference_table().size() << " entries, max deviation " << worst
             << " GHz, " << dt << " s";
}

// 2 ---------------------------------------------------------------------

void selection_rules(Outcome& o) {
    const auto t0 = Clock::now();
    const auto T = TemperatureGridSpec{}.values();
    const RateCurve mdq = toy_curve(toy(ToyVariant::monolayer), Channel::double_quantum, T);
    const RateCurve msq = toy_curve(toy(ToyVariant::monolayer), Channel::single_quantum, T);
    const RateCurve adq = toy_curve(toy(ToyVariant::abc), Channel::double_quantum, T);
    const RateCurve asq = toy_curve(toy(ToyVariant::abc), Channel::single_quantum, T);
    double mono_worst = 0., abc_min = 1e300, abc_max = 0.;
    for (std::size_t i = 0; i < T.size(); ++i) {
        mono_worst = std::max(mono_worst, msq.rates[i] / mdq.rates[i]);
        abc_min = std::min(abc_min, asq.rates[i] / adq.rates[i]);
        abc_max = std::max(abc_max, asq.rates[i] / adq.rates[i]);
        o.require(msq.rates[i] < 1e-6 * mdq.rates[i], "monolayer single < 1e-6 double");
        o.require(asq.rates[i] > 0. && asq.rates[i] < adq.rates[i],
                  "ABC 0 < single < double");
    }
    const double dt = seconds_since(t0);
    o.require(dt < 300., "runtime < 5 min");
    o.detail << "n=6, " << T.size() << " temperatures; monolayer max single/double "
             << mono_worst << "; ABC single/double in [" << abc_min << ", " << abc_max
             << "]; " << dt << " s";
}

// 3 ---------------------------------------------------------------------

void power_law(Outcome& o) {
    const auto t0 = Clock::now();
    const auto T = spaced_points(10., 400., 79, false);
    for (ToyVariant v : {ToyVariant::monolayer, ToyVariant::aa_prime, ToyVariant::abc}) {
        const PowerLawFit p = fit_power_law(toy_curve(toy(v), Channel::double_quantum, T));
        o.require(p.exponent >= 1.9 && p.exponent <= 2.3,
                  std::string(toy_variant_label(v)) + " exponent in [1.9, 2.3]");
        o.detail << toy_variant_label(v) << " " << p.exponent << "; ";
    }

    // Single 15 meV mode: the local slope x coth(x/2), x = hw / kT, at the window ends.
    EffectiveModeModel single;
    single.modes = {{1., 15.}};
    const auto slope = [](double T_K) {
        const double x = 15. / (PhysicalConstants::kB_meV_per_K * T_K);
        return x / std::tanh(x / 2.);
    };
    const auto exponent_near = [&](double T_K) {
        std::vector<double> Ts, g;
        for (double t : spaced_points(0.95 * T_K, 1.05 * T_K, 11, false)) {
            Ts.push_back(t);
            g.push_back(eval_model(single, t));
        }
        return fit_power_law(Ts, g, {0.95 * T_K, 1.05 * T_K}).exponent;
    };
    for (double T_K : {150., 300.}) {
        const double fitted = exponent_near(T_K);
        o.require(std::abs(fitted - slope(T_K)) <= 0.05,
                  "single-mode exponent near " + std::to_string(int(T_K)) + " K");
        o.detail << "single mode at " << T_K << " K: fitted " << fitted << " vs analytic "
                 << slope(T_K) << "; ";
    }
    std::vector<double> g;
    const auto Tw = spaced_points(150., 300., 31, false);
    for (double t : Tw)
        g.push_back(eval_model(single, t));
    const double window = fit_power_law(Tw, g).exponent;
    o.require(window >= slope(300.) - 0.05 && window <= slope(150.) + 0.05,
              "single-mode 150-300 K exponent between the end slopes");
    const double dt = seconds_since(t0);
    o.require(dt < 10., "runtime < 10 s");
    o.detail << "150-300 K window " << window << "; " << dt << " s";
}

// 4 ---------------------------------------------------------------------

void golden_rule_oracle(Outcome& o) {
    const CouplingSet cs = build_couplings(unit_mode(15.));
    double worst = 0.;
    std::string where;
    for (double sigma : {0.5, 1., 2.}) {
        for (double step : {sigma / 5., sigma / 10.}) {
            const UniformGrid grid = UniformGrid::covering(0., cs.cutoff + 6. * sigma, step);
            const SpectralFunction F =
                spectral_function(cs, Channel::double_quantum, sigma, grid);
            for (double T : {50., 150., 300.}) {
                const double quad = relaxation_rate(F, T);
                const double direct = direct_sum_rate(cs, Channel::double_quantum, sigma, T);
                const double dev = std::abs(quad - direct) / direct;
                if (dev > 0.01) {
                    std::ostringstream w;
                    w << "sigma " << sigma << " step " << step << " T " << T << ": "
                      << dev * 100. << "%";
                    o.require(false, w.str());
                }
                if (dev > worst) {
                    worst = dev;
                    std::ostringstream w;
                    w << "sigma " << sigma << " meV, T " << T << " K";
                    where = w.str();
                }
            }
        }
    }
    o.detail << "15 meV mode, max relative deviation " << worst * 100. << "% at " << where;
}

// 5 ---------------------------------------------------------------------

void single_mode_closed_form(Outcome& o) {
    // Oracle from the constants: (4 pi / hbar) n(n+1) / (2 sqrt(pi) sigma), |Phi|^2 = 1 meV^2.
    const double n = 1. / std::expm1(15. / (PhysicalConstants::kB_meV_per_K * 300.));
    const double oracle = 4. * std::numbers::pi / PhysicalConstants::hbar_meV_s * n * (n + 1.) /
                          (2. * std::sqrt(std::numbers::pi));
    const CouplingSet cs = build_couplings(unit_mode(15.));
    const SpectralFunction F =
        spectral_function(cs, Channel::double_quantum, 1., default_spectral_grid(1., cs.cutoff));
    const double quad = relaxation_rate(F, 300.);
    const double direct = direct_sum_rate(cs, Channel::double_quantum, 1., 300.);
    o.require(std::abs(oracle / 1.556e13 - 1.) <= 0.01, "oracle within 1% of 1.556e13 Hz");
    o.require(std::abs(quad / 1.556e13 - 1.) <= 0.01, "quadrature within 1%");
    o.require(std::abs(direct / 1.556e13 - 1.) <= 0.01, "closed form within 1%");
    o.detail << "oracle " << oracle << " Hz, quadrature " << quad << " Hz, closed form "
             << direct << " Hz";
}

// 6 ---------------------------------------------------------------------

void lattice_hygiene(Outcome& o) {
    std::vector<std::pair<std::string, Supercell>> cells;
    for (int n : {4, 5, 6}) {
        const Supercell host = build_monolayer(n, n);
        cells.emplace_back("monolayer " + std::to_string(n), host);
        cells.emplace_back("monolayer V_B " + std::to_string(n),
                           make_vacancy(host, central_site(host, Species::B)).cell);
    }
    for (Stacking s : {Stacking::AAprime, Stacking::ABC}) {
        for (int n : {4, 6}) {
            const Supercell host = build_stacked(n, n, 2, s);
            const std::string label =
                std::string(s == Stacking::ABC ? "ABC " : "AA' ") + std::to_string(n);
            cells.emplace_back(label, host);
            cells.emplace_back(label + " V_B",
                               make_vacancy(host, central_site(host, Species::B, 0)).cell);
        }
    }
    double worst_orth = 0., worst_hess = 0.;
    for (const auto& [label, cell] : cells) {
        const ToyForceField field(cell, ToyParams{});
        const Hessian h = build_hessian(generate_displacement_set(field));
        const Eigen::MatrixXd analytic = field.hessian();
        const double rel = (h.matrix - analytic).norm() / analytic.norm();
        const PhononModes m = modes_from_forceset(generate_displacement_set(field));
        const auto dim = m.vectors.cols();
        const double orth =
            (m.vectors.transpose() * m.vectors - Eigen::MatrixXd::Identity(dim, dim))
                .cwiseAbs()
                .maxCoeff();
        worst_orth = std::max(worst_orth, orth);
        worst_hess = std::max(worst_hess, rel);
        o.require(m.zero_count() == 3, label + ": 3 zero modes (found " +
                                           std::to_string(m.zero_count()) + ")");
        o.require(orth <= 1e-8, label + ": orthonormality");
        o.require(rel <= 1e-6, label + ": numerical vs analytic Hessian");
    }
    o.detail << cells.size() << " cells, 3 zero modes each; max orthonormality error "
             << worst_orth << ", max Hessian relative error " << worst_hess;
}

// 7 ---------------------------------------------------------------------

void blueshift(Outcome& o) {
    const auto defect_hw = [](const ToyCase& c) {
        return c.modes.frequencies[static_cast<Eigen::Index>(
            locate_defect_mode(c.modes, c.defect.vacancy))];
    };
    const double mono = defect_hw(toy(ToyVariant::monolayer));
    const double aa = defect_hw(toy(ToyVariant::aa_prime));
    const double abc = defect_hw(toy(ToyVariant::abc));
    o.require(ToyParams{}.k_inter > 0., "k_inter > 0");
    o.require(aa > mono, "AA' above monolayer");
    o.require(abc > mono, "ABC above monolayer");
    o.detail << "defect out-of-plane mode: monolayer " << mono << " meV, AA' " << aa
             << " meV, ABC " << abc << " meV";
}

// 8 ---------------------------------------------------------------------

void round_trips(Outcome& o) {
    using test::run;
    const test::TempDir dir("accept_rt"), again("accept_rt_again");
    const std::string out = dir.str();
    const auto p = [&](const std::string& f) { return (dir / f).string(); };
    o.require(run({"toy-gen", "--variant", "abc", "--n", "4", "--out", out}).code == 0, "toy-gen");
    o.require(run({"phonons", "--forceset", p("abc_4_forceset.json"), "--out", out}).code == 0,
              "phonons");
    o.require(run({"zfs-derivs", "--samples", p("abc_4_zfs_samples.json"), "--modes",
                   p("abc_4_modes.json"), "--out", out})
                      .code == 0,
              "zfs-derivs");
    o.require(run({"rates", "--derivatives", p("abc_4_derivatives.json"), "--out", out}).code ==
                  0,
              "rates");
    const RateTable rt = parse_rate_csv(read_text(p("abc_4_rates.csv")));
    write_text(p("ref.csv"), format_reference_csv({{300.}, {rt.gamma_double.back()}}));
    o.require(run({"fit", "--rates", p("abc_4_rates.csv"), "--reference", p("ref.csv"), "--out",
                   out})
                      .code == 0,
              "fit");

    // Parse and re-serialize every written file.
    std::size_t files = 0;
    const auto check = [&](const std::string& name, const std::function<std::string(const std::string&)>& cycle) {
        const std::string text = read_text(p(name));
        o.require(cycle(text) == text, name + " byte-identical");
        ++files;
    };
    check("abc_4_forceset.json", [](const std::string& t) {
        std::optional<VacancyRecord> d;
        const auto f = parse_forceset(t, &d);
        return format_forceset(f, d);
    });
    check("abc_4_zfs_samples.json",
          [](const std::string& t) { return format_zfs_samples(parse_zfs_samples(t)); });
    check("abc_4_modes.json", [](const std::string& t) {
        std::optional<VacancyRecord> d;
        const auto m = parse_modes(t, &d);
        return format_modes(m, d);
    });
    check("abc_4_derivatives.json",
          [](const std::string& t) { return format_derivatives(parse_derivatives(t)); });
    check("abc_4_dos.csv", [](const std::string& t) { return format_dos_csv(parse_dos_csv(t)); });
    check("abc_4_spectral.csv",
          [](const std::string& t) { return format_spectral_csv(parse_spectral_csv(t)); });
    check("abc_4_rates.csv", [](const std::string& t) { return format_rate_csv(parse_rate_csv(t)); });
    check("ref.csv", [](const std::string& t) { return format_reference_csv(parse_reference_csv(t)); });
    write_text(p("structure.json"), format_structure(toy(ToyVariant::abc).defect.cell));
    check("structure.json", [](const std::string& t) { return format_structure(parse_structure(t)); });

    std::size_t reruns = 0;
    for (const char* cmd : {"toy-gen", "phonons", "zfs-derivs", "rates", "fit"}) {
        const std::string manifest = p(std::string("abc_4_") + cmd + "_manifest.json");
        check(std::string("abc_4_") + cmd + "_manifest.json",
              [](const std::string& t) { return format_manifest(parse_manifest(t)); });
        const auto r = run({"rerun", "--manifest", manifest, "--out", again.str()});
        o.require(r.code == 0, std::string("rerun ") + cmd + ": " + r.err);
        for (const auto& f : parse_manifest(read_text(manifest)).outputs)
            o.require(sha256_file(p(f.path)) == sha256_file(again / f.path),
                      std::string("rerun ") + cmd + " reproduces " + f.path);
        ++reruns;
    }
    o.detail << files << " files re-serialized byte-identically; " << reruns
             << " manifests rerun with identical outputs";
}

// 9 ---------------------------------------------------------------------

void reference_comparison(Outcome& o) {
    const ComparisonReport rep =
        compare_reference({250., 300., 350.}, {4.9e4, 7e4, 9.5e4}, ReferenceTable{{300.}, {5e4}});
    const double ratio = rep.points.at(0).ratio;
    o.require(std::abs(ratio - 1.40) <= 0.01, "ratio 1.40 +- 0.01");
    o.detail << "computed 7e4 Hz vs reference 5e4 Hz at 300 K: ratio " << ratio;
}

// 10 --------------------------------------------------------------------

void fit_round_trip(Outcome& o) {
    const auto T = spaced_points(10., 400., 40, true);
    double worst_A = 0., worst_hw = 0.;
    for (double A : {1e3, 1e5, 1e7}) {
        for (double hw : {5., 15., 30.}) {
            EffectiveModeModel truth;
            truth.modes = {{A, hw}};
            std::vector<double> g;
            for (double t : T)
                g.push_back(eval_model(truth, t));
            const EffectiveModeModel fit = fit_effective_modes(T, g);
            const double dA = std::abs(fit.modes.at(0).A / A - 1.);
            const double dhw = std::abs(fit.modes.at(0).hw - hw);
            worst_A = std::max(worst_A, dA);
            worst_hw = std::max(worst_hw, dhw);
            o.require(dA <= 0.01 && dhw <= 0.1, "recover A = " + std::to_string(A) +
                                                    ", hw = " + std::to_string(hw));
        }
    }
    o.detail << "9 curves, max A error " << worst_A * 100. << "%, max hw error " << worst_hw
             << " meV";
}
} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"ZFS fixtures", zfs_fixtures},
        {"selection rules", selection_rules},
        {"power law", power_law},
        {"golden-rule quadrature vs closed form", golden_rule_oracle},
        {"single-mode closed form", single_mode_closed_form},
        {"lattice-dynamics hygiene", lattice_hygiene},
        {"blueshift mechanism", blueshift},
        {"round trips and reruns", round_trips},
        {"reference comparison", reference_comparison},
        {"fit round trip", fit_round_trip},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first
                  << ": " << o.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
