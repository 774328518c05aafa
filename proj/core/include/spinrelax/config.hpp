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
/// Run configuration read from YAML. Every key is optional; unknown keys,
/// wrong types and out-of-range values are errors that name the key path
/// and line.
///
/// @code
/// sigma: 1.0            # meV
/// cutoff: 40.0          # meV
/// temperatures: {min: 10, max: 400, points: 40, spacing: log}
/// derivative_step: 0.1  # A sqrt(amu)
/// displacement_step: 0.01  # A
/// channels: [double, single, dephase]
/// dos_grid: {min: 0, max: 0, step: 0.1}   # max 0: highest mode + 6 sigma
/// fit: {window: [150, 300], n_modes: 1, fit_As: false}
/// toy: {k_bond: 6.0, k_shear: 1.0, k_z: 0.4, k_flex: 0.1, k_inter: 0.15,
///       k_inter_shear: 0.03,
///       response: {monolayer: 1.0, aa_prime: 1.5, abc: 1.0},
///       jitter: 0.0, seed: 0}
/// inputs: {forceset: f.json, zfs_samples: z.json, modes: m.json,
///          derivatives: d.json, rates: r.csv, reference: ref.csv}
/// output_dir: out
/// @endcode

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/toy_force_field.hpp>

namespace spinrelax {
struct TemperatureGridSpec {
    /// [K]
    double min = 10.;
    /// [K]
    double max = 400.;
    std::size_t points = 40;
    bool logarithmic = true;

    std::vector<double> values() const;
    bool operator==(const TemperatureGridSpec&) const = default;
};

struct DosGridSpec {
    /// [meV]
    double min = 0.;
    /// [meV]; 0 selects the highest mode plus 6 sigma.
    double max = 0.;
    /// [meV]
    double step = 0.1;

    bool operator==(const DosGridSpec&) const = default;
};

/// Per-variant multiplier on the dipolar response of the displaced
/// spin sites: a phenomenological stand-in for interlayer
/// electrostatics, not a physical model.
struct ResponseMultipliers {
    double monolayer = 1.0;
    double aa_prime = 1.5;
    double abc = 1.0;

    bool operator==(const ResponseMultipliers&) const = default;
};

struct ToyConfig {
    ToyParams params;
    ResponseMultipliers response;
    /// Gaussian jitter of the reference positions [A]; 0 disables it.
    double jitter = 0.;
    std::uint64_t seed = 0;

    bool operator==(const ToyConfig&) const = default;
};

struct FitConfig {
    std::array<double, 2> window{150., 300.};
    std::size_t n_modes = 1;
    bool fit_As = false;

    bool operator==(const FitConfig&) const = default;
};

struct InputPaths {
    std::string forceset;
    std::string zfs_samples;
    std::string modes;
    std::string derivatives;
    std::string rates;
    std::string reference;

    bool operator==(const InputPaths&) const = default;
};

struct RunConfig {
    InputPaths inputs;
    /// [meV]
    double sigma = default_sigma;
    /// [meV]
    double cutoff = default_cutoff;
    TemperatureGridSpec temperatures;
    /// [A sqrt(amu)]
    double derivative_step = 0.1;
    /// [A]
    double displacement_step = 0.01;
    std::vector<Channel> channels{all_channels.begin(), all_channels.end()};
    DosGridSpec dos_grid;
    FitConfig fit;
    ToyConfig toy;
    std::string output_dir = ".";

    /// Re-checks every range constraint; throws validation_error.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// Parses a YAML document over the defaults. An empty document gives
/// the defaults.
RunConfig parse_config(const std::string& text);
/// Reads and parses a file; errors carry the path.
RunConfig load_config(const std::filesystem::path& path);
} // namespace spinrelax
