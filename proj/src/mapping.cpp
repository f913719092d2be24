// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/mapping.hpp"

#include <cmath>
#include <cstdio>

namespace mrbnn {

void AcceleratorConfig::validate() const {
    if (n_a == 0 || n_wg == 0 || n_vdp == 0 || mrs_per_bank_max == 0)
        throw ConfigError("n_a, n_wg, n_vdp and mrs_per_bank_max must be at least 1");
    if (n_w != n_a) throw ConfigError("n_w must equal n_a");
    if (!(channel_spacing_nm > 0.0) || !std::isfinite(channel_spacing_nm))
        throw ConfigError("channel_spacing_nm must be positive");
    if (!(mr_pitch_um > 0.0) || !std::isfinite(mr_pitch_um)) throw ConfigError("mr_pitch_um must be positive");
    if (mrs_per_arm() > mrs_per_bank_max) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "%zu MRs per bank exceed the limit of %zu", mrs_per_arm(), mrs_per_bank_max);
        throw PhysicalConstraintError(msg);
    }
}

std::size_t AcceleratorConfig::mrs_per_arm() const {
    if (n_a <= mrs_per_bank_max || n_wg == 0) return n_a;
    return (n_a + n_wg - 1) / n_wg;
}

namespace {

// c_fold of the BatchNorm that follows `index` before the next linear layer.
std::vector<double> following_fold(const QuantModel& model, std::size_t index) {
    for (std::size_t i = index + 1; i < model.layers.size() && !model.layers[i].is_linear(); ++i)
        if (model.layers[i].kind == LayerKind::BatchNorm) return bn_fold(model.layers[index], model.layers[i].bn, index).c_fold;
    return {};
}

} // namespace

WorkPlan build_work_plan(const QuantModel& model, const AcceleratorConfig& cfg) {
    cfg.validate();
    model.validate();
    WorkPlan plan;
    const std::size_t lanes = cfg.lanes();
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& layer = model.layers[li];
        if (!layer.is_linear()) continue;
        const std::size_t rows = layer.out_channels();
        const std::size_t len = layer.fan_in();
        const Shape out = model.shape_before(li + 1);
        const std::size_t positions = layer.kind == LayerKind::Conv2d ? out[1] * out[2] : 1;
        const std::vector<double> fold = following_fold(model, li);

        LayerPlan lp;
        lp.layer = li;
        lp.weights = layer.weights.size();
        lp.macs = lp.weights * positions;
        std::size_t q = 0;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t off = 0; off < len; off += cfg.n_a, ++q) {
                Slice s;
                s.layer = li;
                s.row = r;
                s.offset = off;
                s.length = std::min(cfg.n_a, len - off);
                const std::size_t lane = q % lanes;
                s.vdp = lane / cfg.n_wg;
                s.arm = lane % cfg.n_wg;
                s.step = q / lanes;
                s.c_fold = fold.empty() ? 1.0 : fold[r];
                plan.slices.push_back(s);
            }
        lp.slices = q;
        lp.steps = (q + lanes - 1) / lanes;
        plan.total_steps += lp.steps;
        plan.layers.push_back(lp);
    }
    return plan;
}

std::string WorkPlan::dump() const {
    std::string out;
    char line[200];
    for (const auto& l : layers) {
        std::snprintf(line, sizeof line, "layer %zu weights=%zu macs=%zu slices=%zu steps=%zu\n", l.layer, l.weights,
                      l.macs, l.slices, l.steps);
        out += line;
    }
    for (const auto& s : slices) {
        std::snprintf(line, sizeof line, "  L%zu row=%zu off=%zu len=%zu vdp=%zu arm=%zu step=%zu c_fold=%.9g\n",
                      s.layer, s.row, s.offset, s.length, s.vdp, s.arm, s.step, s.c_fold);
        out += line;
    }
    return out;
}

WavelengthPlan wavelength_assignment(const AcceleratorConfig& cfg, double centre_nm, double usable_band_nm) {
    if (cfg.n_a == 0 || cfg.n_wg == 0) throw ConfigError("n_a and n_wg must be at least 1");
    if (!(cfg.channel_spacing_nm > 0.0)) throw ConfigError("channel_spacing_nm must be positive");
    const std::size_t n = cfg.mrs_per_arm();
    const double needed = static_cast<double>(n) * cfg.channel_spacing_nm;
    if (needed > usable_band_nm) {
        char msg[200];
        std::snprintf(msg, sizeof msg, "%zu channels at %.3f nm need %.3f nm, broadband passband allows %.3f nm", n,
                      cfg.channel_spacing_nm, needed, usable_band_nm);
        throw PhysicalConstraintError(msg);
    }
    cfg.validate();
    WavelengthPlan plan;
    for (std::size_t k = 0; k < n; ++k)
        plan.comb_nm.push_back(centre_nm + (static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) *
                                               cfg.channel_spacing_nm);
    plan.per_arm_nm.assign(cfg.n_wg, plan.comb_nm);
    return plan;
}

} // namespace mrbnn
