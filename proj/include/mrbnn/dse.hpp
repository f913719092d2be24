// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Exhaustive (N_A, N_VDP, N_WG) sweep with Pareto extraction over
// (FPS up, power down, area down) and energy/performance picks.

#pragma once

#include "mrbnn/simulator.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrbnn {

struct SweepSpec {
    std::vector<std::size_t> n_a{5, 10, 15, 25, 50};
    std::vector<std::size_t> n_vdp{25, 50, 100, 200};
    std::vector<std::size_t> n_wg{5, 10};
    std::size_t n_b = 1;
    double tuning_fraction = 0.8;
    std::vector<Workload> workloads{{"model1", 60642, 4}, {"model2", 1546570, 4}, {"model3", 13570186, 4},
                                    {"model4", 552362, 4}};
    std::size_t threads = 1;

    void validate() const;
    bool operator==(const SweepSpec&) const = default;
};

struct Objectives {
    double fps = 0.0;       ///< maximised
    double power_mw = 0.0;  ///< minimised
    double area_mm2 = 0.0;  ///< minimised
};

bool dominates(const Objectives& a, const Objectives& b);

/// Sort-based front extraction; flags[i] is true when point i is undominated.
std::vector<bool> pareto_front(std::span<const Objectives> points);

struct DsePoint {
    std::size_t n_a = 0;
    std::size_t n_vdp = 0;
    std::size_t n_wg = 0;
    double fps = 0.0;                  ///< mean over workloads
    std::optional<double> epb_pj_per_bit;
    double power_mw = 0.0;
    double area_mm2 = 0.0;
    bool pareto = false;

    double fps_per_watt() const { return power_mw > 0.0 ? fps / (power_mw * 1e-3) : 0.0; }
    Objectives objectives() const { return {fps, power_mw, area_mm2}; }
};

struct ExcludedPoint {
    std::size_t n_a = 0;
    std::size_t n_vdp = 0;
    std::size_t n_wg = 0;
    std::string reason;
};

struct ParetoResult {
    std::vector<DsePoint> points;  ///< sorted by (n_a, n_vdp, n_wg)
    std::vector<ExcludedPoint> excluded;
    std::optional<std::size_t> eo_pick;  ///< argmax FPS/W
    std::optional<std::size_t> po_pick;  ///< argmax FPS
};

/// Recomputes pareto flags and both picks for `points` (already sorted).
void finalize(ParetoResult& result);

/// Point (a, v, w) draws its FPV map from derive_seed(seed, key(a, v, w)), so
/// results do not depend on evaluation order or thread count.
ParetoResult run_sweep(const SweepSpec& spec, const AcceleratorConfig& base, const Platform& platform,
                       const FpvStatistics& fpv, std::uint64_t seed);

std::string scatter_csv(const ParetoResult& result);
/// Inverse of scatter_csv (pareto flags read back as stored).
std::vector<DsePoint> parse_scatter_csv(const std::string& text);

std::string picks_summary_json(const ParetoResult& result);

} // namespace mrbnn
