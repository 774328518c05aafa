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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <json.hpp>
#include <openssl/evp.h>

namespace spinrelax {
using json = nlohmann::ordered_json;

namespace {
constexpr char axis_name[3] = {'x', 'y', 'z'};

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(what + ": malformed JSON: " + e.what());
    }
}

void check_header(const json& j, const std::string& format) {
    if (!j.is_object())
        throw validation_error(format + ": document is not a JSON object");
    if (!j.contains("format") || !j["format"].is_string() ||
        j["format"].get<std::string>() != format)
        throw validation_error("expected a '" + format + "' document");
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw validation_error(format + ": missing integer format_version");
    const int v = j["format_version"].get<int>();
    if (v != format_version)
        throw validation_error(format + ": unsupported format_version " +
                               std::to_string(v));
}

void check_keys(const json& j,
                const std::set<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object())
        throw validation_error(where + ": expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key))
            throw validation_error(where + ": unknown key '" + key + "'");
}

const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw validation_error(where + ": missing key '" + key + "'");
    return j[key];
}

double number(const json& j, const std::string& key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number())
        throw validation_error(where + ": '" + key + "' must be a number");
    return v.get<double>();
}

std::size_t index(const json& j, const std::string& key, const std::string& where) {
    const json& v = field(j, key, where);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw validation_error(where + ": '" + key +
                               "' must be a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> numbers(const json& v, std::size_t n, const std::string& where) {
    if (!v.is_array() || (n != 0 && v.size() != n))
        throw validation_error(where + ": expected an array of " +
                               std::to_string(n) + " numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number())
            throw validation_error(where + ": non-numeric entry");
        out.push_back(x.get<double>());
    }
    return out;
}

json vec3_json(const Eigen::Vector3d& v) {
    return json::array({v[0], v[1], v[2]});
}

Eigen::Vector3d vec3(const json& v, const std::string& where) {
    const auto x = numbers(v, 3, where);
    return {x[0], x[1], x[2]};
}

json tensor_json(const DTensor& D) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            a.push_back(D(r, c));
    return a;
}

DTensor tensor(const json& v, const std::string& where) {
    const auto x = numbers(v, 9, where);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            m(r, c) = x[static_cast<std::size_t>(3 * r + c)];
    return DTensor(m);
}

json structure_body(const Supercell& cell) {
    json j;
    json lv = json::array();
    for (const auto& v : cell.lattice_vectors)
        lv.push_back(vec3_json(v));
    j["lattice_vectors"] = lv;
    j["periodic"] = json::array({cell.periodic[0], cell.periodic[1], cell.periodic[2]});
    json atoms = json::array();
    for (const auto& a : cell.atoms) {
        json ja;
        ja["species"] = std::string(species_label(a.species));
        ja["mass"] = a.mass;
        ja["position"] = vec3_json(a.position);
        ja["layer"] = a.layer_index;
        atoms.push_back(ja);
    }
    j["atoms"] = atoms;
    return j;
}

Supercell structure_from(const json& j, const std::string& where) {
    Supercell cell;
    const json& lv = field(j, "lattice_vectors", where);
    if (!lv.is_array() || lv.size() != 3)
        throw validation_error(where + ": lattice_vectors needs 3 vectors");
    for (std::size_t k = 0; k < 3; ++k)
        cell.lattice_vectors[k] = vec3(lv[k], where + ".lattice_vectors");
    const json& per = field(j, "periodic", where);
    if (!per.is_array() || per.size() != 3)
        throw validation_error(where + ": periodic needs 3 flags");
    for (std::size_t k = 0; k < 3; ++k) {
        if (!per[k].is_boolean())
            throw validation_error(where + ": periodic flags must be booleans");
        cell.periodic[k] = per[k].get<bool>();
    }
    const json& atoms = field(j, "atoms", where);
    if (!atoms.is_array())
        throw validation_error(where + ": atoms must be an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const std::string w = where + ".atoms[" + std::to_string(i) + "]";
        check_keys(atoms[i], {"species", "mass", "position", "layer"}, w);
        Atom a;
        const json& sp = field(atoms[i], "species", w);
        if (!sp.is_string())
            throw validation_error(w + ": species must be a string");
        a.species = parse_species(sp.get<std::string>());
        a.mass = number(atoms[i], "mass", w);
        a.position = vec3(field(atoms[i], "position", w), w + ".position");
        const json& layer = field(atoms[i], "layer", w);
        if (!layer.is_number_integer())
            throw validation_error(w + ": layer must be an integer");
        a.layer_index = layer.get<int>();
        cell.atoms.push_back(a);
    }
    cell.validate();
    return cell;
}

json defect_json(const VacancyRecord& v) {
    json j;
    j["removed_index"] = v.removed_index;
    j["site"] = vec3_json(v.site);
    j["layer"] = v.layer_index;
    j["neighbors"] = json::array({v.neighbors[0], v.neighbors[1], v.neighbors[2]});
    json images = json::array();
    for (const auto& t : v.neighbor_images)
        images.push_back(vec3_json(t));
    j["neighbor_images"] = images;
    return j;
}

VacancyRecord defect_from(const json& j, std::size_t n_atoms, const std::string& where) {
    check_keys(j, {"removed_index", "site", "layer", "neighbors", "neighbor_images"},
               where);
    VacancyRecord v;
    v.removed_index = index(j, "removed_index", where);
    v.site = vec3(field(j, "site", where), where + ".site");
    const json& layer = field(j, "layer", where);
    if (!layer.is_number_integer())
        throw validation_error(where + ": layer must be an integer");
    v.layer_index = layer.get<int>();
    const json& nb = field(j, "neighbors", where);
    const json& im = field(j, "neighbor_images", where);
    if (!nb.is_array() || nb.size() != 3 || !im.is_array() || im.size() != 3)
        throw validation_error(where + ": needs 3 neighbors and 3 images");
    for (std::size_t k = 0; k < 3; ++k) {
        if (!nb[k].is_number_integer() || nb[k].get<long long>() < 0 ||
            nb[k].get<std::size_t>() >= n_atoms)
            throw validation_error(where + ": neighbor index out of range");
        v.neighbors[k] = nb[k].get<std::size_t>();
        v.neighbor_images[k] = vec3(im[k], where + ".neighbor_images");
    }
    return v;
}

std::string dump(const json& j) {
    return j.dump(1) + "\n";
}

std::string fmt(double x) {
    // Subnormals do not survive a 9-digit decimal round trip.
    if (std::abs(x) < std::numeric_limits<double>::min())
        x = 0.;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8e", x);
    return buf;
}

/// Rows of a CSV with the given header; each row has header-many
/// numbers. Errors name the line.
std::vector<std::vector<double>> parse_csv(const std::string& text,
                                          const std::string& header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw validation_error("CSV header must be '" + header + "'");
    const auto columns =
        static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size())
                throw validation_error("CSV line " + std::to_string(line_no) +
                                       ": bad number '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != columns)
            throw validation_error("CSV line " + std::to_string(line_no) +
                                   ": expected " + std::to_string(columns) +
                                   " columns, found " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw validation_error("CSV has a header but no data rows");
    return rows;
}

std::string write_rows(const std::string& header,
                       const std::vector<const std::vector<double>*>& cols) {
    const std::size_t n = cols.front()->size();
    for (const auto* c : cols)
        if (c->size() != n)
            throw validation_error("CSV columns differ in length");
    if (n == 0)
        throw validation_error("refusing to write an empty table");
    std::string out = header + "\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (k)
                out += ',';
            out += fmt((*cols[k])[i]);
        }
        out += '\n';
    }
    return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t k) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r[k]);
    return out;
}
} // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw validation_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw validation_error("error reading '" + path.string() + "'");
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw computation_error("cannot create directory '" +
                                    path.parent_path().string() + "': " +
                                    ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw computation_error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out)
        throw computation_error("error writing '" + path.string() + "'");
}

std::string format_structure(const Supercell& cell) {
    json j;
    j["format"] = "spinrelax.structure";
    j["format_version"] = format_version;
    const json body = structure_body(cell);
    for (const auto& [k, v] : body.items())
        j[k] = v;
    return dump(j);
}

Supercell parse_structure(const std::string& text) {
    const json j = parse_json(text, "structure");
    check_header(j, "spinrelax.structure");
    check_keys(j, {"format", "format_version", "lattice_vectors", "periodic", "atoms"},
               "structure");
    return structure_from(j, "structure");
}

std::string format_forceset(const DisplacementForceSet& dset,
                            const std::optional<VacancyRecord>& defect) {
    json j;
    j["format"] = "spinrelax.forceset";
    j["format_version"] = format_version;
    j["step"] = dset.step;
    j["structure"] = structure_body(dset.reference);
    if (defect)
        j["defect"] = defect_json(*defect);
    json recs = json::array();
    for (const auto& r : dset.records) {
        json jr;
        jr["atom"] = r.atom;
        jr["axis"] = std::string(1, axis_name[r.axis]);
        jr["sign"] = r.sign > 0 ? "+" : "-";
        json f = json::array();
        for (Eigen::Index i = 0; i < r.forces.rows(); ++i)
            f.push_back(json::array({r.forces(i, 0), r.forces(i, 1), r.forces(i, 2)}));
        jr["forces"] = f;
        recs.push_back(jr);
    }
    j["records"] = recs;
    return dump(j);
}

DisplacementForceSet parse_forceset(const std::string& text,
                                    std::optional<VacancyRecord>* defect) {
    const json j = parse_json(text, "forceset");
    check_header(j, "spinrelax.forceset");
    check_keys(j, {"format", "format_version", "step", "structure", "defect", "records"},
               "forceset");
    DisplacementForceSet d;
    d.step = number(j, "step", "forceset");
    d.reference = structure_from(field(j, "structure", "forceset"), "forceset.structure");
    const std::size_t n = d.reference.size();
    if (defect) {
        defect->reset();
        if (j.contains("defect"))
            *defect = defect_from(j["defect"], n, "forceset.defect");
    }
    const json& recs = field(j, "records", "forceset");
    if (!recs.is_array())
        throw validation_error("forceset: records must be an array");
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const std::string w = "forceset.records[" + std::to_string(k) + "]";
        check_keys(recs[k], {"atom", "axis", "sign", "forces"}, w);
        DisplacementRecord r;
        r.atom = index(recs[k], "atom", w);
        const json& ax = field(recs[k], "axis", w);
        const json& sg = field(recs[k], "sign", w);
        if (!ax.is_string() || !sg.is_string())
            throw validation_error(w + ": axis and sign must be strings");
        const std::string axs = ax.get<std::string>(), sgs = sg.get<std::string>();
        if (axs == "x")
            r.axis = 0;
        else if (axs == "y")
            r.axis = 1;
        else if (axs == "z")
            r.axis = 2;
        else
            throw validation_error(w + ": axis must be x, y or z");
        if (sgs == "+")
            r.sign = +1;
        else if (sgs == "-")
            r.sign = -1;
        else
            throw validation_error(w + ": sign must be + or -");
        const json& f = field(recs[k], "forces", w);
        if (!f.is_array() || f.size() != n)
            throw validation_error(w + ": forces has " +
                                   std::to_string(f.is_array() ? f.size() : 0) +
                                   " rows, structure has " + std::to_string(n) +
                                   " atoms");
        r.forces.resize(static_cast<Eigen::Index>(n), 3);
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = vec3(f[i], w + ".forces");
            r.forces.row(static_cast<Eigen::Index>(i)) = v.transpose();
        }
        d.records.push_back(std::move(r));
    }
    d.validate();
    return d;
}

std::string format_modes(const PhononModes& modes,
                         const std::optional<VacancyRecord>& defect) {
    json j;
    j["format"] = "spinrelax.modes";
    j["format_version"] = format_version;
    j["masses"] = modes.masses;
    std::vector<double> f(modes.frequencies.data(),
                          modes.frequencies.data() + modes.frequencies.size());
    j["frequencies_meV"] = f;
    json im = json::array();
    for (bool b : modes.imaginary)
        im.push_back(b);
    j["imaginary"] = im;
    if (defect)
        j["defect"] = defect_json(*defect);
    json vecs = json::array();
    for (Eigen::Index c = 0; c < modes.vectors.cols(); ++c) {
        json col = json::array();
        for (Eigen::Index r = 0; r < modes.vectors.rows(); ++r)
            col.push_back(modes.vectors(r, c));
        vecs.push_back(col);
    }
    j["vectors"] = vecs;
    return dump(j);
}

PhononModes parse_modes(const std::string& text, std::optional<VacancyRecord>* defect) {
    const json j = parse_json(text, "modes");
    check_header(j, "spinrelax.modes");
    check_keys(j, {"format", "format_version", "masses", "frequencies_meV", "imaginary",
                   "defect", "vectors"},
               "modes");
    PhononModes m;
    m.masses = numbers(field(j, "masses", "modes"), 0, "modes.masses");
    const std::size_t dim = 3 * m.masses.size();
    const auto f = numbers(field(j, "frequencies_meV", "modes"), dim, "modes.frequencies_meV");
    m.frequencies = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(dim));
    const json& im = field(j, "imaginary", "modes");
    if (!im.is_array() || im.size() != dim)
        throw validation_error("modes: imaginary needs " + std::to_string(dim) + " flags");
    for (const auto& b : im) {
        if (!b.is_boolean())
            throw validation_error("modes: imaginary flags must be booleans");
        m.imaginary.push_back(b.get<bool>());
    }
    const json& vecs = field(j, "vectors", "modes");
    if (!vecs.is_array() || vecs.size() != dim)
        throw validation_error("modes: vectors needs " + std::to_string(dim) + " columns");
    m.vectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < dim; ++c) {
        const auto col = numbers(vecs[c], dim, "modes.vectors[" + std::to_string(c) + "]");
        for (std::size_t r = 0; r < dim; ++r)
            m.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
    }
    if (defect) {
        defect->reset();
        if (j.contains("defect"))
            *defect = defect_from(j["defect"], m.masses.size(), "modes.defect");
    }
    return m;
}

std::string format_zfs_samples(const ZfsSampleSet& samples) {
    json j;
    j["format"] = "spinrelax.zfs_samples";
    j["format_version"] = format_version;
    j["step"] = samples.step;
    json arr = json::array();
    for (const auto& s : samples.samples) {
        json js;
        js["mode"] = s.mode;
        js["hw_meV"] = s.hw;
        js["D0"] = tensor_json(s.D0);
        js["Dplus"] = tensor_json(s.Dplus);
        js["Dminus"] = tensor_json(s.Dminus);
        arr.push_back(js);
    }
    j["samples"] = arr;
    return dump(j);
}

ZfsSampleSet parse_zfs_samples(const std::string& text, Warnings* warnings) {
    const json j = parse_json(text, "zfs_samples");
    check_header(j, "spinrelax.zfs_samples");
    check_keys(j, {"format", "format_version", "step", "samples"}, "zfs_samples");
    ZfsSampleSet out;
    out.step = number(j, "step", "zfs_samples");
    const json& arr = field(j, "samples", "zfs_samples");
    if (!arr.is_array())
        throw validation_error("zfs_samples: samples must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string w = "zfs_samples.samples[" + std::to_string(k) + "]";
        check_keys(arr[k], {"mode", "hw_meV", "D0", "Dplus", "Dminus"}, w);
        ZfsSample s;
        s.mode = index(arr[k], "mode", w);
        s.hw = number(arr[k], "hw_meV", w);
        const std::string where = w + " (mode " + std::to_string(s.mode) + ")";
        for (const auto& [key, slot] :
             {std::pair<const char*, DTensor*>{"D0", &s.D0}, {"Dplus", &s.Dplus},
              {"Dminus", &s.Dminus}}) {
            const DTensor D = tensor(field(arr[k], key, where), where + "." + key);
            if (warnings && D.asymmetry() > tensor_asymmetry_warning) {
                std::ostringstream msg;
                msg << where << "." << key << " has relative asymmetry "
                    << D.asymmetry() << "; symmetrized";
                warnings->push_back(msg.str());
            }
            *slot = D.symmetrized();
        }
        out.samples.push_back(std::move(s));
    }
    out.validate();
    return out;
}

std::string format_derivatives(const DTensorDerivatives& d) {
    json j;
    j["format"] = "spinrelax.derivatives";
    j["format_version"] = format_version;
    j["cutoff_meV"] = std::isfinite(d.cutoff) ? json(d.cutoff) : json(nullptr);
    json arr = json::array();
    for (const auto& m : d.modes) {
        json jm;
        jm["mode"] = m.mode;
        jm["hw_meV"] = m.hw;
        jm["first"] = tensor_json(m.first);
        jm["second"] = tensor_json(m.second);
        jm["symmetry"] = m.symmetry;
        arr.push_back(jm);
    }
    j["modes"] = arr;
    return dump(j);
}

DTensorDerivatives parse_derivatives(const std::string& text) {
    const json j = parse_json(text, "derivatives");
    check_header(j, "spinrelax.derivatives");
    check_keys(j, {"format", "format_version", "cutoff_meV", "modes"}, "derivatives");
    DTensorDerivatives d;
    const json& c = field(j, "cutoff_meV", "derivatives");
    if (c.is_null())
        d.cutoff = std::numeric_limits<double>::infinity();
    else if (c.is_number())
        d.cutoff = c.get<double>();
    else
        throw validation_error("derivatives: cutoff_meV must be a number or null");
    const json& arr = field(j, "modes", "derivatives");
    if (!arr.is_array())
        throw validation_error("derivatives: modes must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string w = "derivatives.modes[" + std::to_string(k) + "]";
        check_keys(arr[k], {"mode", "hw_meV", "first", "second", "symmetry"}, w);
        ModeDerivative m;
        m.mode = index(arr[k], "mode", w);
        m.hw = number(arr[k], "hw_meV", w);
        m.first = tensor(field(arr[k], "first", w), w + ".first");
        m.second = tensor(field(arr[k], "second", w), w + ".second");
        const json& sym = field(arr[k], "symmetry", w);
        if (!sym.is_string())
            throw validation_error(w + ": symmetry must be a string");
        m.symmetry = sym.get<std::string>();
        m.first.require_symmetric(1e-9);
        m.second.require_symmetric(1e-9);
        d.modes.push_back(std::move(m));
    }
    return d;
}

const std::vector<double>& RateTable::column(Channel c) const {
    switch (c) {
    case Channel::double_quantum:
        return gamma_double;
    case Channel::single_quantum:
        return gamma_single;
    case Channel::dephasing:
        return gamma_dephase;
    }
    return gamma_double;
}

RateTable make_rate_table(const RateCurve& dq, const RateCurve& sq, const RateCurve& dephase) {
    if (dq.temperatures != sq.temperatures || dq.temperatures != dephase.temperatures)
        throw validation_error("rate curves use different temperatures");
    RateTable t;
    t.temperatures = dq.temperatures;
    t.gamma_double = dq.rates;
    t.gamma_single = sq.rates;
    t.gamma_dephase = dephase.rates;
    for (std::size_t i = 0; i < t.temperatures.size(); ++i) {
        const double g = dq.rates[i] + sq.rates[i];
        t.t1.push_back(g > 0. ? 1. / g : std::numeric_limits<double>::infinity());
    }
    return t;
}

SpectralTable make_spectral_table(const SpectralFunction& dq,
                                  const SpectralFunction& sq,
                                  const SpectralFunction& dephase) {
    if (!(dq.grid == sq.grid) || !(dq.grid == dephase.grid))
        throw validation_error("spectral functions use different grids");
    return {dq.grid.values(), dq.values, sq.values, dephase.values};
}

std::string format_dos_csv(const DosCurve& dos) {
    return write_rows("energy_meV,dos_per_meV", {&dos.energies, &dos.density});
}

DosCurve parse_dos_csv(const std::string& text) {
    const auto rows = parse_csv(text, "energy_meV,dos_per_meV");
    return {column(rows, 0), column(rows, 1)};
}

std::string format_spectral_csv(const SpectralTable& t) {
    return write_rows("energy_meV,F_double,F_single,F_dephase",
                      {&t.energies, &t.F_double, &t.F_single, &t.F_dephase});
}

SpectralTable parse_spectral_csv(const std::string& text) {
    const auto rows = parse_csv(text, "energy_meV,F_double,F_single,F_dephase");
    return {column(rows, 0), column(rows, 1), column(rows, 2), column(rows, 3)};
}

std::string format_rate_csv(const RateTable& t) {
    return write_rows("T_K,gamma_double_Hz,gamma_single_Hz,gamma_dephase_Hz,T1_s",
                      {&t.temperatures, &t.gamma_double, &t.gamma_single,
                       &t.gamma_dephase, &t.t1});
}

RateTable parse_rate_csv(const std::string& text) {
    const auto rows =
        parse_csv(text, "T_K,gamma_double_Hz,gamma_single_Hz,gamma_dephase_Hz,T1_s");
    return {column(rows, 0), column(rows, 1), column(rows, 2), column(rows, 3),
            column(rows, 4)};
}

std::string format_reference_csv(const ReferenceTable& t) {
    return write_rows("T_K,gamma_Hz", {&t.temperatures, &t.rates});
}

ReferenceTable parse_reference_csv(const std::string& text) {
    const auto rows = parse_csv(text, "T_K,gamma_Hz");
    ReferenceTable t{column(rows, 0), column(rows, 1)};
    for (std::size_t k = 1; k < t.temperatures.size(); ++k)
        if (!(t.temperatures[k] > t.temperatures[k - 1]))
            throw validation_error("reference CSV line " + std::to_string(k + 2) +
                                   ": temperatures must increase");
    for (std::size_t k = 0; k < t.rates.size(); ++k)
        if (!(t.rates[k] > 0.) || !(t.temperatures[k] > 0.))
            throw validation_error("reference CSV line " + std::to_string(k + 2) +
                                   ": T and gamma must be positive");
    return t;
}

std::string format_fit_report(const PowerLawFit& power,
                              const std::optional<EffectiveModeModel>& model,
                              const std::optional<ComparisonReport>& comparison,
                              Channel channel) {
    json j;
    j["format"] = "spinrelax.fit_report";
    j["format_version"] = format_version;
    j["channel"] = std::string(channel_label(channel));
    json p;
    p["window_K"] = json::array({power.window[0], power.window[1]});
    p["points"] = power.points;
    p["exponent"] = power.exponent;
    p["prefactor_Hz"] = power.prefactor;
    p["log_rms"] = power.residual;
    j["power_law"] = p;
    if (model) {
        json m;
        json modes = json::array();
        for (const auto& e : model->modes)
            modes.push_back({{"A_Hz", e.A}, {"hw_meV", e.hw}});
        m["modes"] = modes;
        m["A_s_Hz"] = model->A_s;
        m["log_rms"] = model->residual;
        j["effective_modes"] = m;
    } else {
        j["effective_modes"] = nullptr;
    }
    if (comparison) {
        json c;
        json pts = json::array();
        for (const auto& pt : comparison->points) {
            json jp;
            jp["T_K"] = pt.T;
            jp["reference_Hz"] = pt.reference;
            jp["computed_Hz"] = pt.computed;
            jp["ratio"] = pt.ratio;
            jp["out_of_range"] = pt.out_of_range;
            pts.push_back(jp);
        }
        c["points"] = pts;
        c["log_rms"] = comparison->log_rms;
        c["flagged"] = comparison->flagged;
        j["reference_comparison"] = c;
    }
    return dump(j);
}

std::string format_manifest(const Manifest& m) {
    json j;
    j["format"] = "spinrelax.manifest";
    j["format_version"] = format_version;
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["arguments"] = m.arguments;
    j["parameters"] = parse_json(m.parameters_json, "manifest parameters");
    auto files = [](const std::vector<ManifestFile>& v) {
        json a = json::array();
        for (const auto& f : v)
            a.push_back({{"path", f.path}, {"sha256", f.sha256}});
        return a;
    };
    j["inputs"] = files(m.inputs);
    j["outputs"] = files(m.outputs);
    j["warnings"] = m.warnings;
    return dump(j);
}

Manifest parse_manifest(const std::string& text) {
    const json j = parse_json(text, "manifest");
    check_header(j, "spinrelax.manifest");
    check_keys(j, {"format", "format_version", "tool_version", "command", "arguments",
                   "parameters", "inputs", "outputs", "warnings"},
               "manifest");
    Manifest m;
    auto str = [&](const char* key) {
        const json& v = field(j, key, "manifest");
        if (!v.is_string())
            throw validation_error(std::string("manifest: ") + key + " must be a string");
        return v.get<std::string>();
    };
    auto strings = [&](const char* key) {
        const json& v = field(j, key, "manifest");
        std::vector<std::string> out;
        if (!v.is_array())
            throw validation_error(std::string("manifest: ") + key + " must be an array");
        for (const auto& s : v) {
            if (!s.is_string())
                throw validation_error(std::string("manifest: ") + key +
                                       " entries must be strings");
            out.push_back(s.get<std::string>());
        }
        return out;
    };
    auto files = [&](const char* key) {
        const json& v = field(j, key, "manifest");
        std::vector<ManifestFile> out;
        if (!v.is_array())
            throw validation_error(std::string("manifest: ") + key + " must be an array");
        for (const auto& f : v) {
            check_keys(f, {"path", "sha256"}, std::string("manifest.") + key);
            if (!f.contains("path") || !f.contains("sha256") || !f["path"].is_string() ||
                !f["sha256"].is_string())
                throw validation_error(std::string("manifest: ") + key +
                                       " entries need string path and sha256");
            out.push_back({f["path"].get<std::string>(), f["sha256"].get<std::string>()});
        }
        return out;
    };
    m.tool_version = str("tool_version");
    m.command = str("command");
    m.arguments = strings("arguments");
    m.parameters_json = field(j, "parameters", "manifest").dump();
    m.inputs = files("inputs");
    m.outputs = files("outputs");
    m.warnings = strings("warnings");
    return m;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw computation_error("SHA-256 computation failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i)
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return out.str();
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_text(path));
}
} // namespace spinrelax
