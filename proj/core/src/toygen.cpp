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

#include <spinrelax/io_formats.hpp>
#include <spinrelax/parallel.hpp>
#include <spinrelax/toygen.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace spinrelax {
std::string_view toy_variant_label(ToyVariant v) {
    switch (v) {
    case ToyVariant::monolayer:
        return "monolayer";
    case ToyVariant::aa_prime:
        return "aa_prime";
    case ToyVariant::abc:
        return "abc";
    }
    return "?";
}

ToyVariant parse_toy_variant(std::string_view label) {
    if (label == "monolayer")
        return ToyVariant::monolayer;
    if (label == "aa_prime" || label == "aaprime" || label == "AA'" || label == "hbn")
        return ToyVariant::aa_prime;
    if (label == "abc" || label == "ABC" || label == "rbn")
        return ToyVariant::abc;
    throw validation_error("unknown toy variant '" + std::string(label) +
                           "' (expected monolayer, aa_prime or abc)");
}

Supercell toy_host(ToyVariant variant, int n) {
    if (n < min_toy_size)
        throw validation_error("toy supercell size must be at least " +
                               std::to_string(min_toy_size) + ", got " +
                               std::to_string(n));
    switch (variant) {
    case ToyVariant::monolayer:
        return build_monolayer(n, n);
    case ToyVariant::aa_prime:
        return build_stacked(n, n, 2, Stacking::AAprime);
    case ToyVariant::abc:
        return build_stacked(n, n, 2, Stacking::ABC);
    }
    throw validation_error("unknown toy variant");
}

double toy_calibration_target(ToyVariant variant) {
    switch (variant) {
    case ToyVariant::monolayer:
        return calibration_target_monolayer();
    case ToyVariant::aa_prime:
        return calibration_target(Stacking::AAprime);
    case ToyVariant::abc:
        return calibration_target(Stacking::ABC);
    }
    throw validation_error("unknown toy variant");
}

namespace {
double response_for(ToyVariant v, const ResponseMultipliers& r) {
    switch (v) {
    case ToyVariant::monolayer:
        return r.monolayer;
    case ToyVariant::aa_prime:
        return r.aa_prime;
    case ToyVariant::abc:
        return r.abc;
    }
    return 1.;
}

DefectCell toy_defect(ToyVariant variant, int n) {
    const Supercell host = toy_host(variant, n);
    return make_vacancy(host, central_site(host, Species::B, 0));
}
} // namespace

std::vector<SpinSite> vacancy_spin_sites(const Supercell& reference,
                                         const Supercell& displaced,
                                         const VacancyRecord& vacancy,
                                         double response) {
    std::vector<SpinSite> sites;
    for (int k = 0; k < 3; ++k) {
        const std::size_t a = vacancy.neighbors[k];
        if (a >= reference.size() || a >= displaced.size())
            throw validation_error("vacancy neighbour outside the cell");
        const Eigen::Vector3d r0 = reference.atoms[a].position + vacancy.neighbor_images[k];
        const Eigen::Vector3d u = displaced.atoms[a].position - reference.atoms[a].position;
        sites.push_back({r0 + response * u, 1. / 3.});
    }
    return sites;
}

double calibrate_dipolar_scale(ToyVariant variant, double target_D, double g) {
    if (!(target_D > 0.))
        throw validation_error("calibration target must be positive");
    const DefectCell dc = toy_defect(variant, 6);
    const auto sites = vacancy_spin_sites(dc.cell, dc.cell, dc.vacancy);
    const double D = diagonalize_dtensor(dipolar_dtensor(sites, 1., g)).D;
    if (std::abs(D) < 1e-12)
        throw computation_error("unscaled dipolar D vanishes; cannot calibrate");
    return target_D / D;
}

ToyCase generate_case(ToyVariant variant, int n, const ToyGenOptions& options) {
    ToyCase c;
    c.variant = variant;
    c.n = n;
    c.options = options;
    c.defect = toy_defect(variant, n);
    if (options.jitter < 0.)
        throw validation_error("jitter must be non-negative");
    if (options.jitter > 0.) {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> normal(0., options.jitter);
        for (auto& a : c.defect.cell.atoms)
            for (int k = 0; k < 3; ++k)
                a.position[k] += normal(rng);
    }
    const ToyForceField field(c.defect.cell, options.params);
    c.forceset = generate_displacement_set(field, options.displacement_step);
    c.modes = modes_from_forceset(c.forceset, &c.warnings);
    if (c.modes.zero_count() != 3) {
        std::ostringstream msg;
        msg << c.modes.zero_count() << " modes below " << zero_mode_threshold
            << " meV (expected 3 translations)";
        c.warnings.push_back(msg.str());
    }

    c.dipolar_scale = calibrate_dipolar_scale(variant, toy_calibration_target(variant));
    c.response = response_for(variant, options.response);
    const Supercell& ref = c.defect.cell;
    const VacancyRecord& vac = c.defect.vacancy;
    const DTensor D0 =
        dipolar_dtensor(vacancy_spin_sites(ref, ref, vac), c.dipolar_scale);
    c.equilibrium = diagonalize_dtensor(D0);

    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < c.modes.size(); ++i)
        if (c.modes.usable(i))
            usable.push_back(i);
    c.samples.step = options.derivative_step;
    c.samples.samples.resize(usable.size());
    parallel_for(usable.size(), [&](std::size_t k) {
        const std::size_t i = usable[k];
        ZfsSample s;
        s.mode = i;
        s.hw = c.modes.frequencies[static_cast<Eigen::Index>(i)];
        s.D0 = D0;
        for (int sign : {+1, -1}) {
            const Supercell moved = displace_along_mode(
                ref, c.modes, i, sign * options.derivative_step);
            const DTensor D = dipolar_dtensor(
                vacancy_spin_sites(ref, moved, vac, c.response), c.dipolar_scale);
            (sign > 0 ? s.Dplus : s.Dminus) = D;
        }
        c.samples.samples[k] = std::move(s);
    });
    return c;
}

ToyCaseFiles write_case_files(const ToyCase& c,
                              const std::filesystem::path& dir,
                              const std::string& stem) {
    ToyCaseFiles f{dir / (stem + "_forceset.json"), dir / (stem + "_zfs_samples.json")};
    write_text(f.forceset, format_forceset(c.forceset, c.defect.vacancy));
    write_text(f.zfs_samples, format_zfs_samples(c.samples));
    return f;
}
} // namespace spinrelax
