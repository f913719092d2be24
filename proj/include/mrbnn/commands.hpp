// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment drivers behind the command-line tool. Each returns its main
// artifact and a short JSON summary; none of them touches the filesystem
// except to read model files.

#pragma once

#include "mrbnn/config.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrbnn::cmd {

struct Output {
    std::string primary;
    std::string summary;
};

/// Spectrum CSV (wavelength_nm, transmission) plus linewidth/resolution summary.
Output device_report(const ToolkitConfig& cfg, const std::string& ring_class);

/// CSV rows (fraction, mean_accuracy, std_accuracy) over `maps` FPV maps.
Output fpv_sweep(const ToolkitConfig& cfg, const std::string& model_path, std::span<const double> fractions,
                 std::size_t maps);

/// SimReport JSON for a model file or a bare parameter count.
Output simulate(const ToolkitConfig& cfg, const std::string& model_path, std::optional<std::uint64_t> parameters,
                const std::string& arch);

/// Scatter CSV plus picks summary.
Output dse(const ToolkitConfig& cfg);

/// Serialized model file bytes.
Output train_toy(const ToolkitConfig& cfg, std::uint64_t dataset_seed);

/// "n_a,n_vdp,n_wg" applied on top of `base`.
AcceleratorConfig parse_arch(const std::string& arch, const AcceleratorConfig& base);

/// Comma-separated list; empty selects 0.0, 0.1, ..., 1.0.
std::vector<double> parse_fractions(const std::string& list);

} // namespace mrbnn::cmd
