// SPDX-License-Identifier: Apache-2.0
//
// physi - GSVD precoding for MIMO broadcast channels with integrated services
// Copyright (C) 2026 The physi authors
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

#ifndef PHYSI_EXPERIMENT_HPP
#define PHYSI_EXPERIMENT_HPP

#include "physi/dc_solver.hpp"
#include "physi/gsvd.hpp"
#include "physi/region.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace physi {

enum class PowerUnit : std::uint8_t { Linear, Decibel };

/// Power budget with an explicit unit, so 20 and 20 dB are never confused.
struct PowerSpec {
    double value = 100.0;
    PowerUnit unit = PowerUnit::Linear;

    double linear() const;
};

enum class ChannelSourceKind : std::uint8_t { Generated, File, Inline };

struct ChannelSource {
    ChannelSourceKind kind = ChannelSourceKind::Generated;
    std::string path;                 // File
    std::optional<ChannelPair> pair;  // Inline
};

struct GridReferenceConfig {
    bool enabled = true;   // only runs when Nt, Nb, Ne <= 2
    std::size_t grid = 21; // power levels per dictionary column
    Dictionary dictionary = Dictionary::Full;
    std::size_t random_unitaries = 4;
    bool include_sweep_covariances = true;
};

struct ExperimentConfig {
    std::size_t nt = 3;
    std::size_t nb = 4;
    std::size_t ne = 3;
    PowerSpec power;
    double delta = 0.1;
    DcConfig dc;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    ChannelSource channels;
    std::string output_dir = "physi_out";
    GridReferenceConfig grid_reference;
    std::size_t workers = 0; // 0 = hardware concurrency

    /// Throws ConfigError naming the offending field.
    void validate() const;

    /// Channel seed of trial `index` (0-based): seed + index.
    std::uint64_t trial_seed(std::size_t index) const;
};

/// Parses the JSON config document. Syntax errors report line and column;
/// semantic errors name the field path (e.g. "dc.epsilon"). Unknown keys are
/// rejected. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// JSON text of the config, as echoed into the manifest.
std::string config_to_json(const ExperimentConfig& cfg);

enum class TrialStatus : std::uint8_t { Ok, Infeasible, NumericalFailure, Error };

const char* to_string(TrialStatus status);

struct ArtifactFile {
    std::string path; // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct TrialReport {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    TrialStatus status = TrialStatus::Ok;
    std::string message;
    double wall_seconds = 0.0;
    std::vector<ArtifactFile> files;
};

struct ExperimentReport {
    std::vector<TrialReport> trials;
    std::string manifest_path;
    double wall_seconds = 0.0;

    /// 0 when every trial succeeded, else 2 (infeasible), 3 (numerical
    /// failure) or 1 (any other error), taking the first failing trial.
    int exit_code() const;
};

/// Runs every trial in a worker pool. Per trial it writes, with suffix _t<k>:
/// channels_t<k>.txt, gsvd_region_t<k>.csv, tdma_region_t<k>.csv,
/// grid_region_t<k>.csv (small dimensions only) and region_t<k>.svg. Then it
/// writes manifest.json listing every file with its SHA-256.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Static SVG of the given regions in the (R0, Rc) plane.
std::string render_svg(const std::vector<const RateRegion*>& regions, const std::string& title);

/// Lower-case hex SHA-256 of a file's content.
std::string sha256_file(const std::string& path);

} // namespace physi

#endif
