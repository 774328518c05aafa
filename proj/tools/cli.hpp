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
/// Command-line front end. Subcommands:
///   toy-gen     synthetic force set and ZFS samples
///   phonons     force set -> modes JSON + DOS CSV
///   zfs-derivs  ZFS samples + modes -> derivatives JSON
///   rates       derivatives -> spectral CSV + rate CSV
///   fit         rate CSV -> fit report JSON
///   rerun       repeat a run from its manifest and check the outputs
///
/// Settings resolve as built-in defaults, then --config, then flags.
/// Each run writes "<stem>_<command>_manifest.json" next to its outputs;
/// its argument list has every setting made explicit, so rerun needs
/// neither the config file nor the original working directory.

#include <iosfwd>
#include <string>
#include <vector>

namespace spinrelax::cli {
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_computation = 2;

/// Runs one command. `args` excludes the program name. Never throws;
/// errors are printed to `err` and mapped to the exit codes above.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
} // namespace spinrelax::cli
