// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Lowering of CONV/FC layers onto VDP units: sub-vector decomposition with a
// fixed-order reduction tree, round-robin work plans and wavelength reuse.

#pragma once

#include "mrbnn/bnn.hpp"
#include "mrbnn/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mrbnn {

struct AcceleratorConfig {
    std::size_t n_a = 10;    ///< activation MRs (per arm, or per VDP when above the bank limit)
    std::size_t n_w = 10;    ///< weight MRs, always equal to n_a
    std::size_t n_b = 1;     ///< broadband MRs per arm
    std::size_t n_wg = 10;   ///< arms per VDP
    std::size_t n_vdp = 50;
    std::size_t mrs_per_bank_max = 15;
    double channel_spacing_nm = 1.0;
    double mr_pitch_um = 5.0;

    /// Throws ConfigError for malformed values and PhysicalConstraintError
    /// when a bank would exceed mrs_per_bank_max.
    void validate() const;

    /// Physical MRs per bank in one arm. n_a up to the bank limit sits in
    /// every arm; larger n_a is spread over the arms of the VDP.
    std::size_t mrs_per_arm() const;
    /// N_w: weights consumed by one VDP per step.
    std::size_t weights_per_vdp() const { return n_a * n_wg; }
    std::size_t lanes() const { return n_vdp * n_wg; }
    std::size_t mrs_per_waveguide() const { return 2 * mrs_per_arm() + n_b; }

    bool operator==(const AcceleratorConfig&) const = default;
};

template <class T>
struct PartialSum {
    std::size_t offset = 0;
    std::size_t length = 0;
    T value{};
};

/// One output element: partial sums of consecutive <= granularity chunks,
/// reduced left to right.
template <class T>
struct DotDecomposition {
    std::vector<PartialSum<T>> partials;

    T reduce() const {
        T acc{};
        for (const auto& p : partials) acc += p.value;
        return acc;
    }
};

template <class T>
DotDecomposition<T> decompose_dot(std::span<const T> w, std::span<const T> a, std::size_t granularity) {
    if (granularity == 0) throw DomainError("granularity must be at least 1");
    if (w.size() != a.size()) throw DomainError("dot operands differ in length");
    if (w.empty()) throw DomainError("empty dot product");
    DotDecomposition<T> d;
    for (std::size_t off = 0; off < w.size(); off += granularity) {
        PartialSum<T> p;
        p.offset = off;
        p.length = std::min(granularity, w.size() - off);
        for (std::size_t k = off; k < off + p.length; ++k) p.value += w[k] * a[k];
        d.partials.push_back(p);
    }
    return d;
}

template <class T>
struct LayerDecomposition {
    Shape output_shape;
    std::vector<DotDecomposition<T>> outputs;  ///< row-major over output_shape

    std::vector<T> reconstruct() const {
        std::vector<T> y;
        y.reserve(outputs.size());
        for (const auto& d : outputs) y.push_back(d.reduce());
        return y;
    }
};

/// weights: [out, in] row-major; activations: [in].
template <class T>
LayerDecomposition<T> decompose_fc(std::span<const T> weights, std::size_t out, std::span<const T> activations,
                                   std::size_t granularity) {
    const std::size_t in = activations.size();
    if (out == 0 || in == 0) throw DomainError("empty fully-connected layer");
    if (weights.size() != out * in) throw DomainError("fully-connected weights do not match activations");
    LayerDecomposition<T> r;
    r.output_shape = {out};
    for (std::size_t o = 0; o < out; ++o)
        r.outputs.push_back(decompose_dot<T>(weights.subspan(o * in, in), activations, granularity));
    return r;
}

/// kernel: [oc, ic, kh, kw]; activations: [ic, h, w]; valid padding. Each
/// output element is the dot product of the flattened filter with its
/// flattened (c, ky, kx) patch.
template <class T>
LayerDecomposition<T> decompose_conv(std::span<const T> kernel, const Shape& kernel_shape,
                                     std::span<const T> activations, const Shape& activation_shape,
                                     std::size_t granularity, std::size_t stride = 1) {
    if (kernel_shape.size() != 4 || activation_shape.size() != 3)
        throw DomainError("conv expects a 4-d kernel and a 3-d activation");
    const std::size_t oc = kernel_shape[0], ic = kernel_shape[1], kh = kernel_shape[2], kw = kernel_shape[3];
    const std::size_t h = activation_shape[1], wd = activation_shape[2];
    if (oc * ic * kh * kw == 0) throw DomainError("empty conv kernel");
    if (kernel.size() != shape_size(kernel_shape) || activations.size() != shape_size(activation_shape))
        throw DomainError("conv data does not match its shape");
    if (activation_shape[0] != ic) throw DomainError("conv channel mismatch");
    if (kh > h || kw > wd) throw DomainError("conv kernel larger than its input");
    if (stride == 0) throw DomainError("conv stride must be at least 1");
    const std::size_t oh = (h - kh) / stride + 1, ow = (wd - kw) / stride + 1;
    const std::size_t len = ic * kh * kw;
    LayerDecomposition<T> r;
    r.output_shape = {oc, oh, ow};
    std::vector<T> patch(len);
    for (std::size_t o = 0; o < oc; ++o)
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t k = 0;
                for (std::size_t c = 0; c < ic; ++c)
                    for (std::size_t ky = 0; ky < kh; ++ky)
                        for (std::size_t kx = 0; kx < kw; ++kx)
                            patch[k++] = activations[(c * h + oy * stride + ky) * wd + ox * stride + kx];
                r.outputs.push_back(decompose_dot<T>(kernel.subspan(o * len, len), patch, granularity));
            }
    return r;
}

/// One sub-vector dot product held stationary on a (vdp, arm) lane.
struct Slice {
    std::size_t layer = 0;
    std::size_t row = 0;     ///< output neuron / filter
    std::size_t offset = 0;  ///< into the flattened row
    std::size_t length = 0;
    std::size_t vdp = 0;
    std::size_t arm = 0;
    std::size_t step = 0;    ///< within the layer
    double c_fold = 1.0;
};

struct LayerPlan {
    std::size_t layer = 0;
    std::size_t weights = 0;
    std::size_t macs = 0;
    std::size_t slices = 0;
    std::size_t steps = 0;
};

struct WorkPlan {
    std::vector<Slice> slices;
    std::vector<LayerPlan> layers;
    std::size_t total_steps = 0;

    std::string dump() const;
};

/// Rows are cut into <= n_a slices and dealt round-robin over the
/// n_vdp * n_wg lanes; BN scale of the following BatchNorm is attached.
WorkPlan build_work_plan(const QuantModel& model, const AcceleratorConfig& cfg);

struct WavelengthPlan {
    std::vector<double> comb_nm;                  ///< shared by every arm
    std::vector<std::vector<double>> per_arm_nm;  ///< n_wg entries, identical combs
    std::size_t unique_wavelengths() const { return comb_nm.size(); }
};

/// Comb centred on `centre_nm`; throws PhysicalConstraintError when the comb
/// does not fit `usable_band_nm` or a bank exceeds the per-bank limit.
WavelengthPlan wavelength_assignment(const AcceleratorConfig& cfg, double centre_nm, double usable_band_nm);

} // namespace mrbnn
