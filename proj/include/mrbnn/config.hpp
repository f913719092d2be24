// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Toolkit configuration: JSON with comments, unknown keys rejected, every
// physical quantity carries its unit in the key name.

#pragma once

#include "mrbnn/bnn.hpp"
#include "mrbnn/dse.hpp"
#include "mrbnn/mapping.hpp"
#include "mrbnn/photonics.hpp"
#include "mrbnn/simulator.hpp"

#include <cstdint>
#include <string>

namespace mrbnn {

struct TrainConfig {
    std::size_t hidden = 16;
    int activation_bits = 4;
    double init_scale = 0.5;
    std::uint64_t init_seed = 3;
    TrainOptions options;

    bool operator==(const TrainConfig&) const = default;
};

struct ExperimentConfig {
    double tuning_fraction = 0.8;
    std::size_t fpv_maps = 50;
    std::uint64_t fpv_seed = 2026;
    std::uint64_t dse_seed = 11;
    std::size_t report_channels = 15;
    BlobSpec dataset;
    TrainConfig train;

    bool operator==(const ExperimentConfig&) const = default;
};

struct ToolkitConfig {
    Platform platform;
    FpvStatistics fpv;
    AcceleratorConfig accelerator;
    SweepSpec sweep;
    ExperimentConfig experiment;
    std::string output_dir = ".";

    void validate() const;
    bool operator==(const ToolkitConfig&) const = default;
};

/// Built-in defaults, validated.
ToolkitConfig default_config();

/// Keys absent from `text` keep their defaults. Throws ConfigError.
ToolkitConfig parse_config(const std::string& text);
ToolkitConfig load_config_file(const std::string& path);

/// Explicit path, else $MRBNN_CONFIG, else built-in defaults.
ToolkitConfig resolve_config(const std::string& explicit_path);

std::string serialize_config(const ToolkitConfig& cfg);

} // namespace mrbnn
