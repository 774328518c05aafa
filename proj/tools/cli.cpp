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

#include "cli.hpp"

#include <spinrelax/config.hpp>
#include <spinrelax/errors.hpp>
#include <spinrelax/io_formats.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/parallel.hpp>
#include <spinrelax/ratemodel.hpp>
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/toygen.hpp>
#include <spinrelax/zfs.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace spinrelax::cli {
namespace {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Shortest text that reads back to the same double.
std::string num(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0.;
    const char* end = text.data() + text.size();
    const auto r = std::from_chars(text.data(), end, v);
    if (text.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
        throw validation_error(what + ": expected a number, got '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& p : split(text, ','))
        out.push_back(parse_number(p, what));
    return out;
}

std::string join(const std::vector<double>& v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? std::string(1, sep) : "") + num(v[i]);
    return s;
}

/// Temperatures from "min:max:points[:log|linear]" or "T1,T2,...".
struct TemperatureSpec {
    std::optional<TemperatureGridSpec> grid;
    std::vector<double> list;

    std::vector<double> values() const { return grid ? grid->values() : list; }
    std::string text() const {
        if (!grid)
            return join(list, ',');
        return num(grid->min) + ":" + num(grid->max) + ":" + std::to_string(grid->points) +
               ":" + (grid->logarithmic ? "log" : "linear");
    }
};

TemperatureSpec parse_temps(const std::string& text) {
    TemperatureSpec t;
    if (text.find(':') != std::string::npos) {
        const auto p = split(text, ':');
        if (p.size() != 3 && p.size() != 4)
            throw validation_error("--temps: expected min:max:points[:log|linear], got '" +
                                   text + "'");
        TemperatureGridSpec g;
        g.min = parse_number(p[0], "--temps min");
        g.max = parse_number(p[1], "--temps max");
        const double n = parse_number(p[2], "--temps points");
        if (n < 2 || n != std::floor(n))
            throw validation_error("--temps: points must be an integer >= 2");
        g.points = static_cast<std::size_t>(n);
        if (p.size() == 4) {
            if (p[3] == "log")
                g.logarithmic = true;
            else if (p[3] == "linear")
                g.logarithmic = false;
            else
                throw validation_error("--temps: spacing must be log or linear, got '" +
                                       p[3] + "'");
        }
        if (!(g.min > 0.) || !(g.max > g.min))
            throw validation_error("--temps: needs 0 < min < max");
        t.grid = g;
        return t;
    }
    t.list = parse_list(text, "--temps");
    for (std::size_t i = 0; i < t.list.size(); ++i) {
        if (!(t.list[i] > 0.))
            throw validation_error("--temps: temperatures must be positive");
        if (i > 0 && !(t.list[i] > t.list[i - 1]))
            throw validation_error("--temps: temperatures must increase");
    }
    return t;
}

std::vector<Channel> parse_channels(const std::string& text) {
    std::vector<Channel> out;
    for (const auto& p : split(text, ',')) {
        const Channel c = parse_channel(p);
        if (std::find(out.begin(), out.end(), c) != out.end())
            throw validation_error("--channel: '" + p + "' given twice");
        out.push_back(c);
    }
    return out;
}

std::string channels_text(const std::vector<Channel>& cs) {
    std::string s;
    for (std::size_t i = 0; i < cs.size(); ++i)
        s += (i ? "," : "") + std::string(channel_label(cs[i]));
    return s;
}

std::string absolute(const fs::path& p) {
    return fs::absolute(p).lexically_normal().string();
}

/// File stem with a known pipeline suffix removed, so outputs of one
/// step carry the name of the case they came from.
std::string case_stem(const std::string& path) {
    std::string s = fs::path(path).stem().string();
    for (const char* suffix : {"_forceset", "_zfs_samples", "_modes", "_derivatives", "_rates"}) {
        const std::string x = suffix;
        if (s.size() > x.size() && s.compare(s.size() - x.size(), x.size(), x) == 0)
            return s.substr(0, s.size() - x.size());
    }
    return s;
}

/// Options every subcommand accepts.
struct Common {
    std::string config;
    std::size_t threads = 0;
    std::string out;
    std::string stem;
    CLI::Option* out_opt = nullptr;
    CLI::Option* stem_opt = nullptr;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config, "YAML config file")->check(CLI::ExistingFile);
        sub->add_option("--threads", threads, "Worker limit (0: default)");
        out_opt = sub->add_option("--out", out, "Output directory");
        stem_opt = sub->add_option("--stem", stem, "Output file name stem");
    }
};

/// Collects inputs, outputs and warnings of one run and writes its
/// manifest.
class Run {
public:
    Run(std::string command, RunConfig& cfg, const Common& common, std::string default_stem)
        : command_(std::move(command)) {
        out_dir_ = absolute(common.out_opt->count() ? common.out : cfg.output_dir);
        stem_ = common.stem_opt->count() ? common.stem : std::move(default_stem);
        if (stem_.empty() || stem_.find('/') != std::string::npos)
            throw validation_error("--stem must be a non-empty file name, got '" + stem_ + "'");
        manifest_.tool_version = SPINRELAX_VERSION;
        manifest_.command = command_;
        args_.push_back(command_);
    }

    void arg(const std::string& flag, const std::string& value) {
        args_.push_back(flag);
        args_.push_back(value);
    }

    json& params() { return params_; }

    std::string input(const std::string& path) {
        const std::string p = absolute(path);
        const std::string text = read_text(p);
        manifest_.inputs.push_back({p, sha256_hex(text)});
        return text;
    }

    void output(const std::string& suffix, const std::string& text) {
        const std::string name = stem_ + "_" + suffix;
        write_text(fs::path(out_dir_) / name, text);
        manifest_.outputs.push_back({name, sha256_hex(text)});
    }

    void warn(const Warnings& w) {
        manifest_.warnings.insert(manifest_.warnings.end(), w.begin(), w.end());
    }

    const std::string& stem() const { return stem_; }

    /// Writes the manifest; returns its path.
    fs::path finish(std::ostream& out, std::ostream& err) {
        arg("--out", out_dir_);
        arg("--stem", stem_);
        manifest_.arguments = args_;
        manifest_.parameters_json = params_.dump();
        const fs::path path = fs::path(out_dir_) / (stem_ + "_" + command_ + "_manifest.json");
        write_text(path, format_manifest(manifest_));
        for (const auto& w : manifest_.warnings)
            err << "warning: " << w << "\n";
        for (const auto& f : manifest_.outputs)
            out << "wrote " << (fs::path(out_dir_) / f.path).string() << "\n";
        out << "manifest: " << path.string() << "\n";
        return path;
    }

private:
    std::string command_;
    std::string out_dir_;
    std::string stem_;
    std::vector<std::string> args_;
    json params_ = json::object();
    Manifest manifest_;
};

RunConfig base_config(const Common& c) {
    return c.config.empty() ? RunConfig{} : load_config(c.config);
}

std::string required_input(const CLI::Option* flag,
                           const std::string& value,
                           const std::string& from_config,
                           const std::string& name) {
    if (flag->count())
        return value;
    if (!from_config.empty())
        return from_config;
    throw validation_error("missing input: pass " + name + " or set it under 'inputs' in the config");
}

// toy-gen ------------------------------------------------------------

struct ToyGenArgs {
    Common common;
    std::string variant = "monolayer";
    int n = 6;
    double k_bond = 0., k_shear = 0., k_z = 0., k_flex = 0., k_inter = 0., k_inter_shear = 0.;
    double r_mono = 0., r_aa = 0., r_abc = 0.;
    double displacement_step = 0., derivative_step = 0., jitter = 0.;
    std::uint64_t seed = 0;
    std::map<std::string, CLI::Option*> opts;

    void attach(CLI::App* sub) {
        common.attach(sub);
        sub->add_option("--variant", variant, "monolayer, aa_prime or abc")->required();
        sub->add_option("--n", n, "In-plane supercell size (>= 4)")->required();
        opts["k_bond"] = sub->add_option("--k-bond", k_bond, "Bond stretch stiffness [eV/A^2]");
        opts["k_shear"] = sub->add_option("--k-shear", k_shear, "Bond shear stiffness [eV/A^2]");
        opts["k_z"] = sub->add_option("--k-z", k_z, "Out-of-plane site stiffness [eV/A^2]");
        opts["k_flex"] = sub->add_option("--k-flex", k_flex, "Out-of-plane bond stiffness [eV/A^2]");
        opts["k_inter"] = sub->add_option("--k-inter", k_inter, "Interlayer stiffness [eV/A^2]");
        opts["k_inter_shear"] = sub->add_option("--k-inter-shear", k_inter_shear,
                                                "Interlayer sliding stiffness [eV/A^2]");
        opts["r_mono"] = sub->add_option("--response-monolayer", r_mono, "Dipolar response multiplier");
        opts["r_aa"] = sub->add_option("--response-aa-prime", r_aa, "Dipolar response multiplier");
        opts["r_abc"] = sub->add_option("--response-abc", r_abc, "Dipolar response multiplier");
        opts["displacement_step"] =
            sub->add_option("--displacement-step", displacement_step, "Finite displacement [A]");
        opts["derivative_step"] =
            sub->add_option("--derivative-step", derivative_step, "Mode step [A sqrt(amu)]");
        opts["jitter"] = sub->add_option("--jitter", jitter, "Position jitter [A]");
        opts["seed"] = sub->add_option("--seed", seed, "Jitter seed");
    }

    template <class T>
    void take(const char* key, const T& value, T& target) const {
        if (opts.at(key)->count())
            target = value;
    }
};

int cmd_toy_gen(const ToyGenArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(a.common);
    a.take("k_bond", a.k_bond, cfg.toy.params.k_bond);
    a.take("k_shear", a.k_shear, cfg.toy.params.k_shear);
    a.take("k_z", a.k_z, cfg.toy.params.k_z);
    a.take("k_flex", a.k_flex, cfg.toy.params.k_flex);
    a.take("k_inter", a.k_inter, cfg.toy.params.k_inter);
    a.take("k_inter_shear", a.k_inter_shear, cfg.toy.params.k_inter_shear);
    a.take("r_mono", a.r_mono, cfg.toy.response.monolayer);
    a.take("r_aa", a.r_aa, cfg.toy.response.aa_prime);
    a.take("r_abc", a.r_abc, cfg.toy.response.abc);
    a.take("displacement_step", a.displacement_step, cfg.displacement_step);
    a.take("derivative_step", a.derivative_step, cfg.derivative_step);
    a.take("jitter", a.jitter, cfg.toy.jitter);
    a.take("seed", a.seed, cfg.toy.seed);
    cfg.validate();

    const ToyVariant variant = parse_toy_variant(a.variant);
    const std::string label(toy_variant_label(variant));
    Run run("toy-gen", cfg, a.common, label + "_" + std::to_string(a.n));

    ToyGenOptions o;
    o.params = cfg.toy.params;
    o.response = cfg.toy.response;
    o.displacement_step = cfg.displacement_step;
    o.derivative_step = cfg.derivative_step;
    o.jitter = cfg.toy.jitter;
    o.seed = cfg.toy.seed;
    const ToyCase c = generate_case(variant, a.n, o);

    run.arg("--variant", label);
    run.arg("--n", std::to_string(a.n));
    run.arg("--k-bond", num(o.params.k_bond));
    run.arg("--k-shear", num(o.params.k_shear));
    run.arg("--k-z", num(o.params.k_z));
    run.arg("--k-flex", num(o.params.k_flex));
    run.arg("--k-inter", num(o.params.k_inter));
    run.arg("--k-inter-shear", num(o.params.k_inter_shear));
    run.arg("--response-monolayer", num(o.response.monolayer));
    run.arg("--response-aa-prime", num(o.response.aa_prime));
    run.arg("--response-abc", num(o.response.abc));
    run.arg("--displacement-step", num(o.displacement_step));
    run.arg("--derivative-step", num(o.derivative_step));
    run.arg("--jitter", num(o.jitter));
    run.arg("--seed", std::to_string(o.seed));

    json& p = run.params();
    p["format_version"] = format_version;
    p["variant"] = label;
    p["n"] = a.n;
    p["atoms"] = c.defect.cell.size();
    p["toy"] = {{"k_bond", o.params.k_bond},       {"k_shear", o.params.k_shear},
                {"k_z", o.params.k_z},             {"k_flex", o.params.k_flex},
                {"k_inter", o.params.k_inter},     {"k_inter_shear", o.params.k_inter_shear}};
    p["response"] = c.response;
    p["displacement_step_A"] = o.displacement_step;
    p["derivative_step"] = o.derivative_step;
    p["jitter_A"] = o.jitter;
    p["seed"] = o.seed;
    p["dipolar_scale"] = c.dipolar_scale;
    p["calibration_target_GHz"] = toy_calibration_target(variant);
    p["equilibrium_D_GHz"] = c.equilibrium.D;
    p["equilibrium_E_GHz"] = c.equilibrium.E;

    run.output("forceset.json", format_forceset(c.forceset, c.defect.vacancy));
    run.output("zfs_samples.json", format_zfs_samples(c.samples));
    run.warn(c.warnings);
    out << "toy-gen: " << label << " n=" << a.n << ", " << c.defect.cell.size()
        << " atoms, " << c.samples.samples.size() << " sampled modes, D = " << c.equilibrium.D
        << " GHz, E = " << c.equilibrium.E << " GHz\n";
    run.finish(out, err);
    return exit_ok;
}

// phonons ------------------------------------------------------------

struct PhononArgs {
    Common common;
    std::string forceset;
    double sigma = 0.;
    std::string dos_grid;
    CLI::Option *forceset_opt = nullptr, *sigma_opt = nullptr, *grid_opt = nullptr;

    void attach(CLI::App* sub) {
        common.attach(sub);
        forceset_opt = sub->add_option("--forceset", forceset, "Force-set JSON");
        sigma_opt = sub->add_option("--sigma", sigma, "DOS smearing [meV]");
        grid_opt = sub->add_option("--dos-grid", dos_grid, "min:max:step [meV]; max 0 = auto");
    }
};

int cmd_phonons(const PhononArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(a.common);
    if (a.sigma_opt->count())
        cfg.sigma = a.sigma;
    if (a.grid_opt->count()) {
        const auto p = split(a.dos_grid, ':');
        if (p.size() != 3)
            throw validation_error("--dos-grid: expected min:max:step, got '" + a.dos_grid + "'");
        cfg.dos_grid = {parse_number(p[0], "--dos-grid min"), parse_number(p[1], "--dos-grid max"),
                        parse_number(p[2], "--dos-grid step")};
    }
    cfg.validate();
    const std::string path =
        required_input(a.forceset_opt, a.forceset, cfg.inputs.forceset, "--forceset");
    Run run("phonons", cfg, a.common, case_stem(path));
    const std::string text = run.input(path);

    std::optional<VacancyRecord> defect;
    const DisplacementForceSet dset = parse_forceset(text, &defect);
    Warnings w;
    const PhononModes modes = modes_from_forceset(dset, &w);
    if (modes.zero_count() != 3)
        w.push_back(std::to_string(modes.zero_count()) + " modes below " + num(zero_mode_threshold) +
                    " meV (expected 3 translations)");
    const UniformGrid auto_grid = default_dos_grid(modes, cfg.sigma, cfg.dos_grid.step);
    const double hi = cfg.dos_grid.max > 0. ? cfg.dos_grid.max : auto_grid.last();
    const UniformGrid grid = UniformGrid::covering(cfg.dos_grid.min, hi, cfg.dos_grid.step);
    const DosCurve dos = phonon_dos(modes, cfg.sigma, grid);

    run.arg("--forceset", absolute(path));
    run.arg("--sigma", num(cfg.sigma));
    run.arg("--dos-grid", num(cfg.dos_grid.min) + ":" + num(cfg.dos_grid.max) + ":" +
                              num(cfg.dos_grid.step));
    json& p = run.params();
    p["format_version"] = format_version;
    p["sigma_meV"] = cfg.sigma;
    p["dos_grid_meV"] = {{"min", grid.start}, {"max", grid.last()}, {"step", grid.step}};
    p["modes"] = modes.size();
    p["zero_modes"] = modes.zero_count();

    std::size_t imaginary = 0;
    for (std::size_t i = 0; i < modes.size(); ++i)
        imaginary += (modes.imaginary[i] && !modes.is_zero(i)) ? 1 : 0;
    out << "phonons: " << modes.size() << " modes, " << modes.zero_count() << " zero, "
        << imaginary << " imaginary\n";
    bool any_usable = false;
    for (std::size_t i = 0; i < modes.size(); ++i)
        any_usable = any_usable || modes.usable(i);
    if (defect && !any_usable)
        w.push_back("no real non-zero mode; defect-mode analysis skipped");
    if (defect && any_usable) {
        const std::size_t dm = locate_defect_mode(modes, *defect);
        const ModeCharacter ch = mode_character(modes, dm, *defect);
        const double hw = modes.frequencies[static_cast<Eigen::Index>(dm)];
        p["defect_mode"] = {{"index", dm},
                            {"hw_meV", hw},
                            {"out_of_plane_fraction", ch.out_of_plane_fraction},
                            {"neighbor_fraction", ch.neighbor_fraction}};
        out << "defect mode " << dm << ": " << hw << " meV, out-of-plane fraction "
            << ch.out_of_plane_fraction << ", neighbour fraction " << ch.neighbor_fraction << "\n";
    }
    run.output("modes.json", format_modes(modes, defect));
    run.output("dos.csv", format_dos_csv(dos));
    run.warn(w);
    run.finish(out, err);
    return exit_ok;
}

// zfs-derivs ---------------------------------------------------------

struct DerivArgs {
    Common common;
    std::string samples, modes, cutoff;
    double step = 0.;
    CLI::Option *samples_opt = nullptr, *modes_opt = nullptr, *step_opt = nullptr,
                *cutoff_opt = nullptr;

    void attach(CLI::App* sub) {
        common.attach(sub);
        samples_opt = sub->add_option("--samples", samples, "ZFS samples JSON");
        modes_opt = sub->add_option("--modes", modes, "Modes JSON");
        step_opt = sub->add_option("--step", step, "Override the sample step [A sqrt(amu)]");
        cutoff_opt = sub->add_option("--cutoff", cutoff, "Highest mode to require [meV] or none");
    }
};

int cmd_zfs_derivs(const DerivArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(a.common);
    const std::string spath =
        required_input(a.samples_opt, a.samples, cfg.inputs.zfs_samples, "--samples");
    const std::string mpath = required_input(a.modes_opt, a.modes, cfg.inputs.modes, "--modes");
    double cutoff = std::numeric_limits<double>::infinity();
    if (a.cutoff_opt->count() && a.cutoff != "none") {
        cutoff = parse_number(a.cutoff, "--cutoff");
        if (!(cutoff > 0.))
            throw validation_error("--cutoff must be positive");
    }
    Run run("zfs-derivs", cfg, a.common, case_stem(spath));
    Warnings w;
    ZfsSampleSet samples = parse_zfs_samples(run.input(spath), &w);
    const PhononModes modes = parse_modes(run.input(mpath));
    if (a.step_opt->count()) {
        if (!(a.step > 0.))
            throw validation_error("--step must be positive");
        samples.step = a.step;
    }
    const DTensorDerivatives d = extract_derivatives(samples, modes, cutoff, &w);

    run.arg("--samples", absolute(spath));
    run.arg("--modes", absolute(mpath));
    run.arg("--step", num(samples.step));
    run.arg("--cutoff", std::isinf(cutoff) ? "none" : num(cutoff));
    json& p = run.params();
    p["format_version"] = format_version;
    p["step"] = samples.step;
    p["cutoff_meV"] = std::isinf(cutoff) ? json(nullptr) : json(cutoff);
    p["derivatives"] = d.modes.size();

    out << "zfs-derivs: " << d.modes.size() << " modes from " << samples.samples.size()
        << " samples, step " << samples.step << "\n";
    run.output("derivatives.json", format_derivatives(d));
    run.warn(w);
    run.finish(out, err);
    return exit_ok;
}

// rates --------------------------------------------------------------

struct RateArgs {
    Common common;
    std::string derivatives, channel, temps, sweep;
    double sigma = 0., cutoff = 0.;
    CLI::Option *deriv_opt = nullptr, *sigma_opt = nullptr, *cutoff_opt = nullptr,
                *channel_opt = nullptr, *temps_opt = nullptr, *sweep_opt = nullptr;

    void attach(CLI::App* sub) {
        common.attach(sub);
        deriv_opt = sub->add_option("--derivatives", derivatives, "Derivatives JSON");
        sigma_opt = sub->add_option("--sigma", sigma, "Gaussian width [meV]");
        cutoff_opt = sub->add_option("--cutoff", cutoff, "Highest mode kept [meV]");
        channel_opt = sub->add_option("--channel", channel,
                                      "Channels reported and checked: double,single,dephase");
        temps_opt = sub->add_option("--temps", temps, "min:max:points[:log|linear] or T1,T2,...");
        sweep_opt = sub->add_option("--sigma-sweep", sweep, "Comma list of widths [meV]");
        sweep_opt->excludes(sigma_opt);
    }
};

int cmd_rates(const RateArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(a.common);
    if (a.sigma_opt->count())
        cfg.sigma = a.sigma;
    if (a.cutoff_opt->count())
        cfg.cutoff = a.cutoff;
    if (a.channel_opt->count())
        cfg.channels = parse_channels(a.channel);
    TemperatureSpec temps{cfg.temperatures, {}};
    if (a.temps_opt->count())
        temps = parse_temps(a.temps);
    if (temps.grid)
        cfg.temperatures = *temps.grid;
    cfg.validate();
    std::vector<double> sigmas{cfg.sigma};
    if (a.sweep_opt->count()) {
        sigmas = parse_list(a.sweep, "--sigma-sweep");
        for (double s : sigmas)
            if (!(s > 0.))
                throw validation_error("--sigma-sweep: widths must be positive");
    }
    const std::string path =
        required_input(a.deriv_opt, a.derivatives, cfg.inputs.derivatives, "--derivatives");
    Run run("rates", cfg, a.common, case_stem(path));
    const DTensorDerivatives d = parse_derivatives(run.input(path));
    const std::vector<double> T = temps.values();

    Warnings w;
    const CouplingSet couplings = build_couplings(d, cfg.cutoff, &w);
    json& p = run.params();
    p["format_version"] = format_version;
    p["cutoff_meV"] = cfg.cutoff;
    p["channels"] = channels_text(cfg.channels);
    p["temperatures_K"] = T;
    p["modes_retained"] = couplings.modes.size();
    json runs = json::array();
    for (double sigma : sigmas) {
        const UniformGrid grid = default_spectral_grid(sigma, cfg.cutoff);
        std::array<SpectralFunction, 3> F;
        std::array<RateCurve, 3> curves;
        for (std::size_t k = 0; k < 3; ++k) {
            F[k] = spectral_function(couplings, all_channels[k], sigma, grid);
            curves[k] = rate_curve(F[k], T);
            curves[k].cutoff = cfg.cutoff;
        }
        const std::string tag = a.sweep_opt->count() ? "_sigma" + num(sigma) : "";
        run.output("spectral" + tag + ".csv",
                   format_spectral_csv(make_spectral_table(F[0], F[1], F[2])));
        run.output("rates" + tag + ".csv",
                   format_rate_csv(make_rate_table(curves[0], curves[1], curves[2])));
        json r = {{"sigma_meV", sigma}, {"grid_step_meV", grid.step}, {"grid_points", grid.count}};
        for (Channel c : cfg.channels) {
            const RateCurve& curve = curves[static_cast<std::size_t>(
                std::find(all_channels.begin(), all_channels.end(), c) - all_channels.begin())];
            for (const auto& msg : curve.warnings)
                run.warn({"sigma " + num(sigma) + " meV, " + msg});
            out << "sigma " << sigma << " meV, " << channel_label(c) << ": Gamma("
                << T.back() << " K) = " << curve.rates.back() << " Hz\n";
            r["gamma_at_Tmax_Hz"][std::string(channel_label(c))] = curve.rates.back();
        }
        runs.push_back(r);
    }
    p["runs"] = runs;

    run.arg("--derivatives", absolute(path));
    if (a.sweep_opt->count())
        run.arg("--sigma-sweep", join(sigmas, ','));
    else
        run.arg("--sigma", num(cfg.sigma));
    run.arg("--cutoff", num(cfg.cutoff));
    run.arg("--channel", channels_text(cfg.channels));
    run.arg("--temps", temps.text());
    run.warn(w);
    run.finish(out, err);
    return exit_ok;
}

// fit ----------------------------------------------------------------

struct FitArgs {
    Common common;
    std::string rates, channel, window, reference;
    std::size_t n_modes = 1;
    bool fit_as = false;
    double cutoff = 0.;
    CLI::Option *rates_opt = nullptr, *channel_opt = nullptr, *window_opt = nullptr,
                *ref_opt = nullptr, *n_opt = nullptr, *as_opt = nullptr, *cutoff_opt = nullptr;

    void attach(CLI::App* sub) {
        common.attach(sub);
        rates_opt = sub->add_option("--rates", rates, "Rate CSV");
        channel_opt = sub->add_option("--channel", channel, "double, single or dephase");
        window_opt = sub->add_option("--window", window, "Power-law window low:high [K]");
        n_opt = sub->add_option("--n-modes", n_modes, "Effective modes");
        as_opt = sub->add_option("--fit-as", fit_as, "Fit a constant offset A_s (true or false)");
        cutoff_opt = sub->add_option("--cutoff", cutoff, "Top of the initial hw range [meV]");
        ref_opt = sub->add_option("--reference", reference, "Reference CSV (T_K,gamma_Hz)");
    }
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig cfg = base_config(a.common);
    Channel channel = cfg.channels.front();
    if (a.channel_opt->count())
        channel = parse_channel(a.channel);
    if (a.window_opt->count()) {
        const auto p = split(a.window, ':');
        if (p.size() != 2)
            throw validation_error("--window: expected low:high, got '" + a.window + "'");
        cfg.fit.window = {parse_number(p[0], "--window low"), parse_number(p[1], "--window high")};
    }
    if (a.n_opt->count())
        cfg.fit.n_modes = a.n_modes;
    if (a.as_opt->count())
        cfg.fit.fit_As = a.fit_as;
    if (a.cutoff_opt->count())
        cfg.cutoff = a.cutoff;
    cfg.validate();
    const std::string path = required_input(a.rates_opt, a.rates, cfg.inputs.rates, "--rates");
    std::string ref_path = a.ref_opt->count() ? a.reference : cfg.inputs.reference;
    Run run("fit", cfg, a.common, case_stem(path));

    const RateTable table = parse_rate_csv(run.input(path));
    const std::vector<double>& rates = table.column(channel);
    const PowerLawFit power = fit_power_law(table.temperatures, rates, cfg.fit.window);
    FitOptions fo;
    fo.n_modes = cfg.fit.n_modes;
    fo.fit_As = cfg.fit.fit_As;
    fo.cutoff = cfg.cutoff;
    // A failed effective-mode fit leaves the power law valid: report it and warn.
    std::optional<EffectiveModeModel> model;
    try {
        model = fit_effective_modes(table.temperatures, rates, fo);
    } catch (const computation_error& e) {
        run.warn({std::string("effective-mode fit: ") + e.what()});
    }
    std::optional<ComparisonReport> cmp;
    if (!ref_path.empty())
        cmp = compare_reference(table.temperatures, rates,
                                parse_reference_csv(run.input(ref_path)));

    run.arg("--rates", absolute(path));
    run.arg("--channel", std::string(channel_label(channel)));
    run.arg("--window", num(cfg.fit.window[0]) + ":" + num(cfg.fit.window[1]));
    run.arg("--n-modes", std::to_string(cfg.fit.n_modes));
    run.arg("--fit-as", cfg.fit.fit_As ? "true" : "false");
    run.arg("--cutoff", num(cfg.cutoff));
    if (!ref_path.empty())
        run.arg("--reference", absolute(ref_path));
    json& p = run.params();
    p["format_version"] = format_version;
    p["channel"] = std::string(channel_label(channel));
    p["window_K"] = cfg.fit.window;
    p["n_modes"] = cfg.fit.n_modes;
    p["fit_As"] = cfg.fit.fit_As;
    p["cutoff_meV"] = cfg.cutoff;

    out << "fit: " << channel_label(channel) << " exponent " << power.exponent << " over "
        << cfg.fit.window[0] << "-" << cfg.fit.window[1] << " K (" << power.points
        << " points)\n";
    for (const auto& m : model ? model->modes : std::vector<EffectiveMode>{})
        out << "effective mode: A = " << m.A << " Hz, hw = " << m.hw << " meV\n";
    if (cmp) {
        for (const auto& pt : cmp->points) {
            if (pt.out_of_range)
                out << "reference " << pt.T << " K: outside the computed range\n";
            else
                out << "reference " << pt.T << " K: computed " << pt.computed << " Hz, reference "
                    << pt.reference << " Hz, ratio " << pt.ratio << "\n";
        }
        if (cmp->flagged > 0)
            run.warn({std::to_string(cmp->flagged) +
                      " reference points outside the computed temperature range"});
    }
    run.output("fit.json", format_fit_report(power, model, cmp, channel));
    run.finish(out, err);
    return exit_ok;
}

// rerun --------------------------------------------------------------

struct RerunArgs {
    std::string manifest;
    std::string out;
    std::size_t threads = 0;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* sub) {
        sub->add_option("--manifest", manifest, "Manifest JSON")->required();
        out_opt = sub->add_option("--out", out, "Write into this directory instead");
        sub->add_option("--threads", threads, "Worker limit (0: default)");
    }
};

std::string arg_value(const std::vector<std::string>& args, const std::string& flag) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == flag)
            return args[i + 1];
    throw validation_error("manifest arguments lack " + flag);
}

int cmd_rerun(const RerunArgs& a, std::ostream& out, std::ostream& err) {
    const Manifest m = parse_manifest(read_text(a.manifest));
    if (m.arguments.empty() || m.arguments.front() != m.command || m.command == "rerun")
        throw validation_error(a.manifest + ": arguments do not start with a rerunnable command");
    for (const auto& in : m.inputs) {
        const std::string now = sha256_file(in.path);
        if (now != in.sha256)
            throw validation_error("input " + in.path + " changed since the recorded run");
    }
    std::vector<std::string> args = m.arguments;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--out" && a.out_opt->count())
            args[i + 1] = absolute(a.out);
    if (a.threads > 0) {
        args.push_back("--threads");
        args.push_back(std::to_string(a.threads));
    }
    const int rc = run_cli(args, out, err);
    if (rc != exit_ok)
        return rc;

    const fs::path dir = arg_value(args, "--out");
    const std::string stem = arg_value(args, "--stem");
    const Manifest again =
        parse_manifest(read_text(dir / (stem + "_" + m.command + "_manifest.json")));
    if (again.outputs.size() != m.outputs.size())
        throw computation_error("rerun produced a different set of outputs");
    for (std::size_t i = 0; i < m.outputs.size(); ++i)
        if (!(again.outputs[i] == m.outputs[i]))
            throw computation_error("rerun output " + m.outputs[i].path +
                                    " differs from the recorded hash");
    out << "rerun: " << m.outputs.size() << " outputs reproduced\n";
    return exit_ok;
}
} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin-lattice relaxation from phonons and ZFS derivatives", "spinrelax"};
    app.set_version_flag("--version", SPINRELAX_VERSION);
    app.require_subcommand(1);

    ToyGenArgs toy;
    PhononArgs ph;
    DerivArgs dv;
    RateArgs rt;
    FitArgs ft;
    RerunArgs rr;
    auto* s_toy = app.add_subcommand("toy-gen", "Generate a synthetic force set and ZFS samples");
    auto* s_ph = app.add_subcommand("phonons", "Phonon modes and DOS from a force set");
    auto* s_dv = app.add_subcommand("zfs-derivs", "D-tensor derivatives along the modes");
    auto* s_rt = app.add_subcommand("rates", "Spectral functions and relaxation rates");
    auto* s_ft = app.add_subcommand("fit", "Power-law and effective-mode fits of a rate curve");
    auto* s_rr = app.add_subcommand("rerun", "Repeat a run from its manifest");
    toy.attach(s_toy);
    ph.attach(s_ph);
    dv.attach(s_dv);
    rt.attach(s_rt);
    ft.attach(s_ft);
    rr.attach(s_rr);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int rc = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return rc == 0 ? exit_ok : exit_validation;
    }

    try {
        std::size_t threads = 0;
        for (const Common* c : {&toy.common, &ph.common, &dv.common, &rt.common, &ft.common})
            threads = std::max(threads, c->threads);
        threads = std::max(threads, rr.threads);
        const ThreadLimit limit(threads);
        if (s_toy->parsed())
            return cmd_toy_gen(toy, out, err);
        if (s_ph->parsed())
            return cmd_phonons(ph, out, err);
        if (s_dv->parsed())
            return cmd_zfs_derivs(dv, out, err);
        if (s_rt->parsed())
            return cmd_rates(rt, out, err);
        if (s_ft->parsed())
            return cmd_fit(ft, out, err);
        return cmd_rerun(rr, out, err);
    } catch (const validation_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_computation;
    }
}
} // namespace spinrelax::cli
