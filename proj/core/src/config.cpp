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

#include <spinrelax/config.hpp>
#include <spinrelax/errors.hpp>
#include <spinrelax/grid.hpp>
#include <spinrelax/io_formats.hpp>

#include <functional>
#include <map>
#include <set>
#include <yaml-cpp/yaml.h>

namespace spinrelax {
namespace {
std::string at_line(const YAML::Node& n) {
    const auto m = n.Mark();
    return m.line >= 0 ? " at line " + std::to_string(m.line + 1) : "";
}

[[noreturn]] void fail(const std::string& key, const YAML::Node& n, const std::string& what) {
    throw validation_error("config: '" + key + "'" + at_line(n) + ": " + what);
}

void require_map(const YAML::Node& n, const std::string& key) {
    if (!n.IsMap())
        fail(key, n, "expected a mapping");
}

double as_number(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar())
        fail(key, n, "expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(key, n, "expected a number, got '" + n.Scalar() + "'");
    }
}

double positive(const YAML::Node& n, const std::string& key) {
    const double v = as_number(n, key);
    if (!(v > 0.))
        fail(key, n, "must be positive, got " + n.Scalar());
    return v;
}

double non_negative(const YAML::Node& n, const std::string& key) {
    const double v = as_number(n, key);
    if (!(v >= 0.))
        fail(key, n, "must be non-negative, got " + n.Scalar());
    return v;
}

std::uint64_t as_count(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar())
        fail(key, n, "expected an integer");
    try {
        const long long v = n.as<long long>();
        if (v < 0)
            fail(key, n, "must be non-negative");
        return static_cast<std::uint64_t>(v);
    } catch (const YAML::Exception&) {
        fail(key, n, "expected an integer, got '" + n.Scalar() + "'");
    }
}

bool as_bool(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar())
        fail(key, n, "expected true or false");
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(key, n, "expected true or false, got '" + n.Scalar() + "'");
    }
}

std::string as_string(const YAML::Node& n, const std::string& key) {
    if (!n.IsScalar())
        fail(key, n, "expected a string");
    return n.Scalar();
}

using Handler = std::function<void(const YAML::Node&, const std::string&)>;

/// Dispatches each key of a mapping to its handler; unknown keys fail.
void walk(const YAML::Node& map,
          const std::string& prefix,
          const std::map<std::string, Handler>& handlers) {
    require_map(map, prefix.empty() ? "<document>" : prefix);
    for (const auto& kv : map) {
        const std::string key = kv.first.as<std::string>();
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        const auto it = handlers.find(key);
        if (it == handlers.end())
            throw validation_error("config: unknown key '" + path + "'" +
                                   at_line(kv.first));
        it->second(kv.second, path);
    }
}
} // namespace

std::vector<double> TemperatureGridSpec::values() const {
    return spaced_points(min, max, points, logarithmic);
}

void RunConfig::validate() const {
    auto pos = [](double v, const char* key) {
        if (!(v > 0.))
            throw validation_error(std::string("config: '") + key + "' must be positive");
    };
    pos(sigma, "sigma");
    pos(cutoff, "cutoff");
    pos(temperatures.min, "temperatures.min");
    pos(temperatures.max, "temperatures.max");
    if (!(temperatures.min < temperatures.max))
        throw validation_error("config: 'temperatures' needs min < max");
    if (temperatures.points < 2)
        throw validation_error("config: 'temperatures.points' must be at least 2");
    pos(derivative_step, "derivative_step");
    pos(displacement_step, "displacement_step");
    pos(dos_grid.step, "dos_grid.step");
    if (dos_grid.min < 0. || (dos_grid.max != 0. && !(dos_grid.max > dos_grid.min)))
        throw validation_error("config: 'dos_grid' needs 0 <= min < max (or max 0)");
    if (!(fit.window[0] > 0.) || !(fit.window[1] > fit.window[0]))
        throw validation_error("config: 'fit.window' needs 0 < low < high");
    if (fit.n_modes == 0)
        throw validation_error("config: 'fit.n_modes' must be at least 1");
    if (channels.empty())
        throw validation_error("config: 'channels' must not be empty");
    pos(toy.params.k_bond, "toy.k_bond");
    for (const auto& [v, key] :
         {std::pair{toy.params.k_shear, "toy.k_shear"}, {toy.params.k_z, "toy.k_z"},
          {toy.params.k_flex, "toy.k_flex"}, {toy.params.k_inter, "toy.k_inter"},
          {toy.params.k_inter_shear, "toy.k_inter_shear"},
          {toy.jitter, "toy.jitter"}})
        if (!(v >= 0.))
            throw validation_error(std::string("config: '") + key + "' must be non-negative");
    pos(toy.response.monolayer, "toy.response.monolayer");
    pos(toy.response.aa_prime, "toy.response.aa_prime");
    pos(toy.response.abc, "toy.response.abc");
}

RunConfig parse_config(const std::string& text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw validation_error("config: malformed YAML at line " +
                               std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    RunConfig c;
    if (doc.IsNull())
        return c;

    const std::map<std::string, Handler> temps = {
        {"min", [&](auto& n, auto& k) { c.temperatures.min = positive(n, k); }},
        {"max", [&](auto& n, auto& k) { c.temperatures.max = positive(n, k); }},
        {"points",
         [&](auto& n, auto& k) {
             c.temperatures.points = static_cast<std::size_t>(as_count(n, k));
             if (c.temperatures.points < 2)
                 fail(k, n, "must be at least 2");
         }},
        {"spacing",
         [&](auto& n, auto& k) {
             const auto s = as_string(n, k);
             if (s == "log")
                 c.temperatures.logarithmic = true;
             else if (s == "linear")
                 c.temperatures.logarithmic = false;
             else
                 fail(k, n, "expected log or linear, got '" + s + "'");
         }},
    };
    const std::map<std::string, Handler> dos = {
        {"min", [&](auto& n, auto& k) { c.dos_grid.min = non_negative(n, k); }},
        {"max", [&](auto& n, auto& k) { c.dos_grid.max = non_negative(n, k); }},
        {"step", [&](auto& n, auto& k) { c.dos_grid.step = positive(n, k); }},
    };
    const std::map<std::string, Handler> fit = {
        {"window",
         [&](auto& n, auto& k) {
             if (!n.IsSequence() || n.size() != 2)
                 fail(k, n, "expected [low, high]");
             c.fit.window = {positive(n[0], k), positive(n[1], k)};
             if (!(c.fit.window[1] > c.fit.window[0]))
                 fail(k, n, "needs low < high");
         }},
        {"n_modes",
         [&](auto& n, auto& k) {
             c.fit.n_modes = static_cast<std::size_t>(as_count(n, k));
             if (c.fit.n_modes == 0)
                 fail(k, n, "must be at least 1");
         }},
        {"fit_As", [&](auto& n, auto& k) { c.fit.fit_As = as_bool(n, k); }},
    };
    const std::map<std::string, Handler> response = {
        {"monolayer", [&](auto& n, auto& k) { c.toy.response.monolayer = positive(n, k); }},
        {"aa_prime", [&](auto& n, auto& k) { c.toy.response.aa_prime = positive(n, k); }},
        {"abc", [&](auto& n, auto& k) { c.toy.response.abc = positive(n, k); }},
    };
    const std::map<std::string, Handler> toy = {
        {"k_bond", [&](auto& n, auto& k) { c.toy.params.k_bond = positive(n, k); }},
        {"k_shear", [&](auto& n, auto& k) { c.toy.params.k_shear = non_negative(n, k); }},
        {"k_z", [&](auto& n, auto& k) { c.toy.params.k_z = non_negative(n, k); }},
        {"k_flex", [&](auto& n, auto& k) { c.toy.params.k_flex = non_negative(n, k); }},
        {"k_inter", [&](auto& n, auto& k) { c.toy.params.k_inter = non_negative(n, k); }},
        {"k_inter_shear",
         [&](auto& n, auto& k) { c.toy.params.k_inter_shear = non_negative(n, k); }},
        {"response", [&](auto& n, auto& k) { walk(n, k, response); }},
        {"jitter", [&](auto& n, auto& k) { c.toy.jitter = non_negative(n, k); }},
        {"seed", [&](auto& n, auto& k) { c.toy.seed = as_count(n, k); }},
    };
    const std::map<std::string, Handler> inputs = {
        {"forceset", [&](auto& n, auto& k) { c.inputs.forceset = as_string(n, k); }},
        {"zfs_samples", [&](auto& n, auto& k) { c.inputs.zfs_samples = as_string(n, k); }},
        {"modes", [&](auto& n, auto& k) { c.inputs.modes = as_string(n, k); }},
        {"derivatives", [&](auto& n, auto& k) { c.inputs.derivatives = as_string(n, k); }},
        {"rates", [&](auto& n, auto& k) { c.inputs.rates = as_string(n, k); }},
        {"reference", [&](auto& n, auto& k) { c.inputs.reference = as_string(n, k); }},
    };
    const std::map<std::string, Handler> top = {
        {"sigma", [&](auto& n, auto& k) { c.sigma = positive(n, k); }},
        {"cutoff", [&](auto& n, auto& k) { c.cutoff = positive(n, k); }},
        {"temperatures", [&](auto& n, auto& k) { walk(n, k, temps); }},
        {"derivative_step", [&](auto& n, auto& k) { c.derivative_step = positive(n, k); }},
        {"displacement_step", [&](auto& n, auto& k) { c.displacement_step = positive(n, k); }},
        {"channels",
         [&](auto& n, auto& k) {
             if (!n.IsSequence() || n.size() == 0)
                 fail(k, n, "expected a non-empty list of channels");
             c.channels.clear();
             for (const auto& item : n) {
                 try {
                     c.channels.push_back(parse_channel(as_string(item, k)));
                 } catch (const validation_error& e) {
                     fail(k, item, e.what());
                 }
             }
         }},
        {"dos_grid", [&](auto& n, auto& k) { walk(n, k, dos); }},
        {"fit", [&](auto& n, auto& k) { walk(n, k, fit); }},
        {"toy", [&](auto& n, auto& k) { walk(n, k, toy); }},
        {"inputs", [&](auto& n, auto& k) { walk(n, k, inputs); }},
        {"output_dir", [&](auto& n, auto& k) { c.output_dir = as_string(n, k); }},
    };
    walk(doc, "", top);
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    try {
        return parse_config(text);
    } catch (const validation_error& e) {
        throw validation_error(path.string() + ": " + e.what());
    }
}
} // namespace spinrelax
