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
/// On-disk formats. Scientific inputs are JSON documents carrying
/// "format" and "format_version" fields; tabular outputs are CSV with
/// fixed headers and "%.8e" numbers. Writers are deterministic, so a
/// parse/write cycle reproduces the bytes of a written file.
///
/// Formats (format name, version 1):
/// - spinrelax.structure: lattice_vectors (3 x 3, A), periodic (3 bool),
///   atoms [{species, mass, position, layer}].
/// - spinrelax.forceset: step (A), structure, optional defect,
///   records [{atom, axis "x"|"y"|"z", sign "+"|"-", forces N x 3 eV/A}].
/// - spinrelax.modes: masses, frequencies_meV, imaginary, vectors (one
///   3N list per mode), optional defect.
/// - spinrelax.zfs_samples: step (A sqrt(amu)), samples [{mode, hw_meV,
///   D0, Dplus, Dminus}] with tensors as 9 row-major GHz values.
/// - spinrelax.derivatives: cutoff_meV (null for none), modes [{mode,
///   hw_meV, first, second, symmetry}].
/// - spinrelax.manifest: see Manifest.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>
#include <spinrelax/errors.hpp>
#include <spinrelax/lattice_dynamics.hpp>
#include <spinrelax/ratemodel.hpp>
#include <spinrelax/spinphonon.hpp>
#include <spinrelax/structures.hpp>
#include <spinrelax/zfs.hpp>

namespace spinrelax {
inline constexpr int format_version = 1;

/// Asymmetry ||D - D^T|| / ||D|| above which a parsed tensor draws a
/// warning.
inline constexpr double tensor_asymmetry_warning = 1e-6;

/// Reads a whole file; I/O failures name the path.
std::string read_text(const std::filesystem::path& path);
/// Writes a whole file, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_structure(const Supercell& cell);
Supercell parse_structure(const std::string& text);

std::string format_forceset(const DisplacementForceSet& dset,
                            const std::optional<VacancyRecord>& defect = {});
/// Validates completeness and names every missing (atom, axis, sign).
DisplacementForceSet parse_forceset(const std::string& text,
                                    std::optional<VacancyRecord>* defect = nullptr);

std::string format_modes(const PhononModes& modes,
                         const std::optional<VacancyRecord>& defect = {});
PhononModes parse_modes(const std::string& text,
                        std::optional<VacancyRecord>* defect = nullptr);

std::string format_zfs_samples(const ZfsSampleSet& samples);
/// Tensors are symmetrized; asymmetry above tensor_asymmetry_warning
/// adds a warning.
ZfsSampleSet parse_zfs_samples(const std::string& text,
                               Warnings* warnings = nullptr);

std::string format_derivatives(const DTensorDerivatives& d);
DTensorDerivatives parse_derivatives(const std::string& text);

/// Three-channel spectral function on a shared grid.
struct SpectralTable {
    std::vector<double> energies;
    std::vector<double> F_double;
    std::vector<double> F_single;
    std::vector<double> F_dephase;

    bool operator==(const SpectralTable&) const = default;
};

/// Three-channel rates on a shared temperature list.
struct RateTable {
    std::vector<double> temperatures;
    std::vector<double> gamma_double;
    std::vector<double> gamma_single;
    std::vector<double> gamma_dephase;
    /// 1 / (gamma_double + gamma_single) [s]: population relaxation
    /// excludes pure dephasing. Infinity where both vanish.
    std::vector<double> t1;

    /// Rate column of one channel.
    const std::vector<double>& column(Channel c) const;
    bool operator==(const RateTable&) const = default;
};

/// Builds the table from one curve per channel (same temperatures).
RateTable make_rate_table(const RateCurve& dq,
                          const RateCurve& sq,
                          const RateCurve& dephase);
SpectralTable make_spectral_table(const SpectralFunction& dq,
                                  const SpectralFunction& sq,
                                  const SpectralFunction& dephase);

/// "energy_meV,dos_per_meV"
std::string format_dos_csv(const DosCurve& dos);
DosCurve parse_dos_csv(const std::string& text);
/// "energy_meV,F_double,F_single,F_dephase"
std::string format_spectral_csv(const SpectralTable& table);
SpectralTable parse_spectral_csv(const std::string& text);
/// "T_K,gamma_double_Hz,gamma_single_Hz,gamma_dephase_Hz,T1_s"
std::string format_rate_csv(const RateTable& table);
RateTable parse_rate_csv(const std::string& text);
/// "T_K,gamma_Hz"
std::string format_reference_csv(const ReferenceTable& table);
ReferenceTable parse_reference_csv(const std::string& text);

/// Fit report as JSON (format spinrelax.fit_report). A missing model
/// (failed effective-mode fit) is written as null.
std::string format_fit_report(const PowerLawFit& power,
                              const std::optional<EffectiveModeModel>& model,
                              const std::optional<ComparisonReport>& comparison,
                              Channel channel);

struct ManifestFile {
    std::string path;
    std::string sha256;

    bool operator==(const ManifestFile&) const = default;
};

/// Record of one run: what was read, what was written, and the
/// arguments that reproduce it.
struct Manifest {
    std::string tool_version;
    std::string command;
    /// Full argument list, subcommand first, with every default made
    /// explicit.
    std::vector<std::string> arguments;
    /// Resolved parameters as a JSON object text.
    std::string parameters_json = "{}";
    std::vector<ManifestFile> inputs;
    std::vector<ManifestFile> outputs;
    Warnings warnings;

    bool operator==(const Manifest&) const = default;
};

std::string format_manifest(const Manifest& m);
Manifest parse_manifest(const std::string& text);

/// Lowercase hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);
} // namespace spinrelax
