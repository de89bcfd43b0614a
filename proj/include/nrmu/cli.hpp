// SPDX-License-Identifier: Apache-2.0
//
// nrmu: link-level simulator for two-user MU-MIMO on the 5G NR PDSCH
// Copyright (C) 2026 The nrmu Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef NRMU_CLI_HPP
#define NRMU_CLI_HPP

#include "nrmu/sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nrmu::cli
{

// Bad flag, key or value. Maps to exit code 1.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// File system or other runtime failure. Maps to exit code 2.
class RuntimeError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class PresetName
{
    BlerVsSnr,
    RateVsSnr,
    MuVsPf,
    PracticalProfile
};

struct ExperimentPreset
{
    PresetName name = PresetName::BlerVsSnr;
    std::string_view id;
    std::vector<SchedulerMode> modes;
    int num_rb = 106;
    bool forces_num_rb = false;
};

// "bler-vs-snr", "rate-vs-snr", "mu-vs-pf", "practical"
std::optional<ExperimentPreset> find_preset(std::string_view id);

// Everything one invocation needs.
struct RunRequest
{
    SimConfig sim;
    std::vector<SchedulerMode> modes{SchedulerMode::MuMimoEnabled};
    std::optional<ExperimentPreset> preset;
    std::filesystem::path out = "nrmu_results.csv";
};

void apply_preset(const ExperimentPreset& preset, RunRequest& req);

// Sets one key from its textual value. Throws ConfigError naming the key.
void set_key(RunRequest& req, std::string_view key, std::string_view value);

// Flat "key = value" text, '#' comments, lists as "[a, b, c]".
void apply_config_text(std::string_view text, RunRequest& req);

// Throws RuntimeError (with the path) when the file cannot be read.
void apply_config_file(const std::filesystem::path& path, RunRequest& req);

// Final checks after all layers are merged. Throws ConfigError.
void finalize(RunRequest& req);

// Builds the request from command-line arguments:
// defaults < preset < config file < flags.
RunRequest parse_args(std::span<const std::string> args);

std::string format_csv(std::span<const RunMetrics> runs, double slot_duration_s);

std::string plot_script(const std::filesystem::path& csv_path, std::optional<PresetName> preset);

// Companion plot script path for a CSV output path.
std::filesystem::path plot_script_path(const std::filesystem::path& csv_path);

// Runs every requested sweep and writes the CSV and plot script.
// Returns 0 on success, 2 on runtime failure (partial outputs removed).
int run(const RunRequest& req, std::ostream& log);

// Full command-line entry point; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nrmu::cli

#endif
