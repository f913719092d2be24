// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Closed-form microring device model: all-pass transmission, linewidth,
// inter-channel crosstalk, resolution and fabrication-variation shifts.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrbnn {

enum class RingClass { MultiBit, SingleBit, Broadband };

std::string_view to_string(RingClass c);
RingClass ring_class_from_string(std::string_view name);

/// Resonance shift per nm of geometric deviation (nm/nm), magnitudes.
struct SensitivitySlopes {
    double width = 0.0;
    double thickness = 0.0;
    double radius = 0.0;

    bool operator==(const SensitivitySlopes&) const = default;
};

struct MrDesign {
    RingClass ring_class = RingClass::MultiBit;
    double radius_um = 5.0;
    double waveguide_width_nm = 400.0;
    double ring_width_nm = 760.0;
    double thickness_nm = 220.0;
    double resonant_wavelength_nm = 1550.0;
    double q_factor = 5000.0;           ///< design target; fwhm_and_q() gives the model value
    double self_coupling_r = 0.95;
    double cross_coupling_kappa = 0.3122498999;
    double amplitude_a = 1.0;           ///< single-pass amplitude transmission
    double group_index_ng = 4.2;
    double effective_index_neff = 2.4;
    double attenuation_alpha_per_cm = 0.0;
    SensitivitySlopes sensitivity_slopes{};
    /// Quadratic coefficients of the geometry->resonance surrogate (nm/nm^2).
    SensitivitySlopes slope_curvature{};

    // Broadband (higher-order) filter only: ideal flat-top passband.
    double passband_thz = 0.0;
    double usable_bandwidth_thz = 0.0;
    double insertion_loss_db = 0.0;

    /// L = 2*pi*R, in nm.
    double round_trip_length_nm() const;

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    bool operator==(const MrDesign&) const = default;
};

MrDesign default_design(RingClass c);

/// Through-port intensity of an all-pass ring at round-trip phase `phase_rad`:
/// T = (a^2 - 2ra cos(phi) + r^2) / (1 - 2ra cos(phi) + (ra)^2).
double allpass_transmission(double r, double a, double phase_rad);

/// Round-trip phase seen by `signal_nm` when the ring's resonance sits at
/// `resonance_nm`. The resonance order m is fixed by the nominal design; the
/// phase carries first-order dispersion through the group index so that the
/// spectral linewidth matches fwhm_and_q().
double round_trip_phase(const MrDesign& design, double signal_nm, double resonance_nm);

/// Through-port transmission in [0, 1]. For the broadband class this is the
/// ideal flat-top passband (insertion loss applied inside the band).
double transmission(const MrDesign& design, double signal_nm, double shifted_resonance_nm);

struct Linewidth {
    double fwhm_nm = 0.0;
    double q_factor = 0.0;
};

Linewidth fwhm_and_q(const MrDesign& design);

double fwhm_from_q(double wavelength_nm, double q_factor);
double q_from_fwhm(double wavelength_nm, double fwhm_nm);

/// FSR = lambda^2 / (n_g L).
double free_spectral_range_nm(const MrDesign& design);

/// Usable broadband width converted to wavelength at the design wavelength.
double bandwidth_thz_to_nm(double bandwidth_thz, double wavelength_nm);

/// Lorentzian crosstalk of channel j leaking into channel i.
double crosstalk_phi(double lambda_i_nm, double lambda_j_nm, double q_factor);

struct Resolution {
    std::vector<double> noise_power;  ///< per channel
    double levels = 0.0;              ///< +inf when no crosstalk at all
    int bits = 0;
    bool unbounded() const;
};

/// `input_powers` may be empty, meaning unit power on every channel.
Resolution channel_resolution(std::span<const double> channel_wavelengths_nm, double q_factor,
                              std::span<const double> input_powers = {}, int max_bits = 16);

enum class GeometryParameter { Width, Thickness, Radius };

struct Geometry {
    double width_nm = 0.0;
    double thickness_nm = 0.0;
    double radius_nm = 0.0;
};

using ResonanceSurrogate = std::function<double(const Geometry&)>;

/// Affine-plus-quadratic stand-in for a mode solver around `reference`.
ResonanceSurrogate make_resonance_surrogate(const MrDesign& design);

Geometry nominal_geometry(const MrDesign& design);

/// Central-difference |f(p+eps) - f(p-eps)| / (2 eps).
double sensitivity_slope(const ResonanceSurrogate& shift_fn, const Geometry& at,
                         GeometryParameter parameter, double epsilon_nm);

struct FpvStatistics {
    std::array<double, 3> mean_nm{0.0, 0.0, 0.0};   ///< width, thickness, radius
    std::array<double, 3> sigma_nm{4.9, 1.5, 0.75};
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const FpvStatistics&) const = default;
};

struct FpvSample {
    double dw_nm = 0.0;
    double dt_nm = 0.0;
    double dR_nm = 0.0;
    double delta_lambda_nm = 0.0;
};

/// Linear combination of deviations with absolute-valued slopes.
double resonance_shift(const SensitivitySlopes& slopes, double dw_nm, double dt_nm, double dR_nm);

struct FpvMap {
    std::vector<FpvSample> samples;
    double mean_shift_nm = 0.0;
    double std_shift_nm = 0.0;
};

/// Sample i uses designs[i % designs.size()]. Bit-reproducible for a seed.
FpvMap sample_fpv_map(std::span<const MrDesign> designs, const FpvStatistics& stats,
                      std::size_t count);

/// lambda' = lambda + residual_fraction * delta_lambda.
double shifted_resonance(double nominal_nm, double delta_lambda_nm, double residual_fraction);
double shifted_resonance(const MrDesign& design, const FpvSample& sample, double residual_fraction);

} // namespace mrbnn
