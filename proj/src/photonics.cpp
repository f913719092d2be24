// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/photonics.hpp"

#include "mrbnn/errors.hpp"
#include "mrbnn/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mrbnn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSpeedOfLight_m_s = 299792458.0;

double db_to_linear(double db) { return std::pow(10.0, -db / 10.0); }

} // namespace

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string("non-finite value for ") + what);
    }
}

std::string_view to_string(RingClass c) {
    switch (c) {
    case RingClass::MultiBit: return "multibit";
    case RingClass::SingleBit: return "singlebit";
    case RingClass::Broadband: return "broadband";
    }
    return "unknown";
}

RingClass ring_class_from_string(std::string_view name) {
    if (name == "multibit" || name == "MultiBit") return RingClass::MultiBit;
    if (name == "singlebit" || name == "SingleBit") return RingClass::SingleBit;
    if (name == "broadband" || name == "Broadband") return RingClass::Broadband;
    throw ConfigError("unknown ring class '" + std::string(name) +
                      "' (expected multibit, singlebit or broadband)");
}

double MrDesign::round_trip_length_nm() const { return 2.0 * kPi * radius_um * 1000.0; }

void MrDesign::validate() const {
    const double fields[] = {radius_um, waveguide_width_nm, ring_width_nm, thickness_nm,
                             resonant_wavelength_nm, q_factor, self_coupling_r,
                             cross_coupling_kappa, amplitude_a, group_index_ng,
                             effective_index_neff, attenuation_alpha_per_cm};
    for (double f : fields) require_finite(f, "ring design field");
    if (radius_um <= 0.0) throw DomainError("ring radius must be positive");
    if (q_factor <= 0.0) throw DomainError("q_factor must be positive");
    if (resonant_wavelength_nm <= 0.0) throw DomainError("resonant wavelength must be positive");
    if (!(amplitude_a > 0.0 && amplitude_a <= 1.0)) throw DomainError("amplitude_a must lie in (0, 1]");
    if (!(self_coupling_r > 0.0 && self_coupling_r < 1.0)) throw DomainError("self_coupling_r must lie in (0, 1)");
    if (!(cross_coupling_kappa > 0.0 && cross_coupling_kappa < 1.0))
        throw DomainError("cross_coupling_kappa must lie in (0, 1)");
    const double closure = cross_coupling_kappa * cross_coupling_kappa +
                           self_coupling_r * self_coupling_r;
    if (std::abs(closure - 1.0) > 1e-9) throw DomainError("coupler is not lossless: |kappa|^2 + |r|^2 != 1");
    if (group_index_ng <= 0.0 || effective_index_neff <= 0.0) throw DomainError("refractive indices must be positive");
    if (attenuation_alpha_per_cm < 0.0) throw DomainError("attenuation must be non-negative");
    if (ring_class == RingClass::Broadband) {
        if (passband_thz <= 0.0 || usable_bandwidth_thz <= 0.0 || usable_bandwidth_thz > passband_thz)
            throw DomainError("broadband filter needs 0 < usable bandwidth <= passband");
        if (insertion_loss_db < 0.0) throw DomainError("insertion loss must be non-negative");
    }
}

MrDesign default_design(RingClass c) {
    // r is calibrated offline so that fwhm_and_q() lands on the class target
    // with a = exp(-alpha L) from 1 dB/cm ring loss (broadband: 25 dB/cm).
    MrDesign d;
    d.ring_class = c;
    d.group_index_ng = 4.2;
    d.effective_index_neff = 2.4;
    d.resonant_wavelength_nm = 1550.0;
    d.thickness_nm = 220.0;
    switch (c) {
    case RingClass::MultiBit:
        d.radius_um = 5.0;
        d.waveguide_width_nm = 400.0;
        d.ring_width_nm = 760.0;
        d.q_factor = 5450.0;
        d.attenuation_alpha_per_cm = 0.230258509299;
        d.amplitude_a = 0.999276883134;
        d.self_coupling_r = 0.952807642921;
        d.sensitivity_slopes = {4.92217644, 2.46108822, 1.23054411};
        d.slope_curvature = {0.004, 0.002, 0.001};
        break;
    case RingClass::SingleBit:
        d.radius_um = 1.5;
        d.waveguide_width_nm = 450.0;
        d.ring_width_nm = 450.0;
        d.q_factor = 25000.0;
        d.attenuation_alpha_per_cm = 0.230258509299;
        d.amplitude_a = 0.999783010013;
        d.self_coupling_r = 0.997012273771;
        d.sensitivity_slopes = {4.92217644, 2.46108822, 1.23054411};
        d.slope_curvature = {0.004, 0.002, 0.001};
        break;
    case RingClass::Broadband:
        d.radius_um = 2.0;
        d.waveguide_width_nm = 400.0;
        d.ring_width_nm = 400.0;
        d.q_factor = 276.33;
        d.attenuation_alpha_per_cm = 5.75646273249;
        d.amplitude_a = 0.992792316432;
        d.self_coupling_r = std::sqrt(1.0 - 0.53);
        d.sensitivity_slopes = {4.92217644, 2.46108822, 1.23054411};
        d.slope_curvature = {0.004, 0.002, 0.001};
        d.passband_thz = 3.0;
        d.usable_bandwidth_thz = 2.5;
        d.insertion_loss_db = 4.35 + 0.36;
        break;
    }
    d.cross_coupling_kappa = std::sqrt(1.0 - d.self_coupling_r * d.self_coupling_r);
    return d;
}

double allpass_transmission(double r, double a, double phase_rad) {
    require_finite(r, "r");
    require_finite(a, "a");
    require_finite(phase_rad, "phase");
    const double ra = r * a;
    const double c = std::cos(phase_rad);
    const double num = a * a - 2.0 * ra * c + r * r;
    const double den = 1.0 - 2.0 * ra * c + ra * ra;
    if (den <= 0.0) {
        // Only reachable for r = a = 1 exactly on resonance.
        return 1.0;
    }
    return std::clamp(num / den, 0.0, 1.0);
}

double round_trip_phase(const MrDesign& design, double signal_nm, double resonance_nm) {
    require_finite(signal_nm, "signal wavelength");
    require_finite(resonance_nm, "resonance wavelength");
    if (signal_nm <= 0.0 || resonance_nm <= 0.0) throw DomainError("wavelengths must be positive");
    const double length = design.round_trip_length_nm();
    const double order = std::max(
        1.0, std::round(design.effective_index_neff * length / design.resonant_wavelength_nm));
    return 2.0 * kPi * order +
           2.0 * kPi * design.group_index_ng * length * (1.0 / signal_nm - 1.0 / resonance_nm);
}

double bandwidth_thz_to_nm(double bandwidth_thz, double wavelength_nm) {
    const double lambda_m = wavelength_nm * 1e-9;
    return lambda_m * lambda_m * bandwidth_thz * 1e12 / kSpeedOfLight_m_s * 1e9;
}

double transmission(const MrDesign& design, double signal_nm, double shifted_resonance_nm) {
    require_finite(signal_nm, "signal wavelength");
    require_finite(shifted_resonance_nm, "resonance wavelength");
    if (signal_nm <= 0.0) throw DomainError("signal wavelength must be positive");
    if (design.ring_class == RingClass::Broadband) {
        const double half = 0.5 * bandwidth_thz_to_nm(design.passband_thz, design.resonant_wavelength_nm);
        return std::abs(signal_nm - shifted_resonance_nm) <= half
                   ? db_to_linear(design.insertion_loss_db)
                   : 1.0;
    }
    const double phase = round_trip_phase(design, signal_nm, shifted_resonance_nm);
    return allpass_transmission(design.self_coupling_r, design.amplitude_a, phase);
}

Linewidth fwhm_and_q(const MrDesign& design) {
    const double ra = design.self_coupling_r * design.amplitude_a;
    if (!(ra > 0.0) || ra >= 1.0) {
        throw DegenerateResonatorError("r*a must lie in (0, 1) for a finite linewidth");
    }
    const double lambda = design.resonant_wavelength_nm;
    const double fwhm = (1.0 - ra) * lambda * lambda /
                        (kPi * design.group_index_ng * design.round_trip_length_nm() * std::sqrt(ra));
    return {fwhm, lambda / fwhm};
}

double fwhm_from_q(double wavelength_nm, double q_factor) {
    if (q_factor <= 0.0) throw DomainError("q_factor must be positive");
    return wavelength_nm / q_factor;
}

double q_from_fwhm(double wavelength_nm, double fwhm_nm) {
    if (fwhm_nm <= 0.0) throw DomainError("fwhm must be positive");
    return wavelength_nm / fwhm_nm;
}

double free_spectral_range_nm(const MrDesign& design) {
    const double lambda = design.resonant_wavelength_nm;
    return lambda * lambda / (design.group_index_ng * design.round_trip_length_nm());
}

double crosstalk_phi(double lambda_i_nm, double lambda_j_nm, double q_factor) {
    require_finite(lambda_i_nm, "lambda_i");
    require_finite(lambda_j_nm, "lambda_j");
    require_finite(q_factor, "q_factor");
    if (q_factor <= 0.0) throw DomainError("q_factor must be positive");
    const double delta = lambda_i_nm / (2.0 * q_factor);
    const double detune = lambda_i_nm - lambda_j_nm;
    return delta * delta / (detune * detune + delta * delta);
}

bool Resolution::unbounded() const { return std::isinf(levels); }

Resolution channel_resolution(std::span<const double> wavelengths, double q_factor,
                              std::span<const double> input_powers, int max_bits) {
    if (wavelengths.empty()) throw DomainError("channel list is empty");
    if (!input_powers.empty() && input_powers.size() != wavelengths.size())
        throw DomainError("input power count does not match channel count");
    for (double p : input_powers) {
        require_finite(p, "input power");
        if (p < 0.0) throw DomainError("input powers must be non-negative");
    }

    Resolution res;
    res.noise_power.assign(wavelengths.size(), 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < wavelengths.size(); ++i) {
        double noise = 0.0;
        for (std::size_t j = 0; j < wavelengths.size(); ++j) {
            if (j == i) continue;
            const double p = input_powers.empty() ? 1.0 : input_powers[j];
            noise += crosstalk_phi(wavelengths[i], wavelengths[j], q_factor) * p;
        }
        res.noise_power[i] = noise;
        worst = std::max(worst, std::abs(noise));
    }
    if (worst == 0.0) {
        res.levels = std::numeric_limits<double>::infinity();
        res.bits = max_bits;
        return res;
    }
    res.levels = 1.0 / worst;
    const double bits = std::floor(std::log2(res.levels));
    res.bits = static_cast<int>(std::clamp(bits, 0.0, static_cast<double>(max_bits)));
    return res;
}

Geometry nominal_geometry(const MrDesign& design) {
    return {design.ring_width_nm, design.thickness_nm, design.radius_um * 1000.0};
}

ResonanceSurrogate make_resonance_surrogate(const MrDesign& design) {
    const Geometry ref = nominal_geometry(design);
    const double lambda0 = design.resonant_wavelength_nm;
    const SensitivitySlopes lin = design.sensitivity_slopes;
    const SensitivitySlopes quad = design.slope_curvature;
    return [=](const Geometry& g) {
        const double dw = g.width_nm - ref.width_nm;
        const double dt = g.thickness_nm - ref.thickness_nm;
        const double dr = g.radius_nm - ref.radius_nm;
        return lambda0 + lin.width * dw + lin.thickness * dt + lin.radius * dr +
               quad.width * dw * dw + quad.thickness * dt * dt + quad.radius * dr * dr;
    };
}

double sensitivity_slope(const ResonanceSurrogate& shift_fn, const Geometry& at,
                         GeometryParameter parameter, double epsilon_nm) {
    if (!(epsilon_nm > 0.0)) throw DomainError("epsilon must be positive");
    Geometry lo = at;
    Geometry hi = at;
    switch (parameter) {
    case GeometryParameter::Width:
        lo.width_nm -= epsilon_nm;
        hi.width_nm += epsilon_nm;
        break;
    case GeometryParameter::Thickness:
        lo.thickness_nm -= epsilon_nm;
        hi.thickness_nm += epsilon_nm;
        break;
    case GeometryParameter::Radius:
        lo.radius_nm -= epsilon_nm;
        hi.radius_nm += epsilon_nm;
        break;
    }
    return std::abs(shift_fn(hi) - shift_fn(lo)) / (2.0 * epsilon_nm);
}

void FpvStatistics::validate() const {
    for (std::size_t k = 0; k < 3; ++k) {
        require_finite(mean_nm[k], "fpv mean");
        require_finite(sigma_nm[k], "fpv sigma");
        if (sigma_nm[k] < 0.0) throw DomainError("fpv sigma must be non-negative");
    }
}

double resonance_shift(const SensitivitySlopes& slopes, double dw_nm, double dt_nm, double dR_nm) {
    return std::abs(slopes.width) * dw_nm + std::abs(slopes.thickness) * dt_nm +
           std::abs(slopes.radius) * dR_nm;
}

FpvMap sample_fpv_map(std::span<const MrDesign> designs, const FpvStatistics& stats,
                      std::size_t count) {
    if (count == 0) throw DomainError("fpv sample count must be at least 1");
    if (designs.empty()) throw DomainError("fpv sampling needs at least one design");
    stats.validate();

    FpvMap map;
    map.samples.resize(count);
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const auto& slopes = designs[i % designs.size()].sensitivity_slopes;
        FpvSample& s = map.samples[i];
        s.dw_nm = stats.mean_nm[0] + stats.sigma_nm[0] * standard_normal(stats.seed, 3 * i);
        s.dt_nm = stats.mean_nm[1] + stats.sigma_nm[1] * standard_normal(stats.seed, 3 * i + 1);
        s.dR_nm = stats.mean_nm[2] + stats.sigma_nm[2] * standard_normal(stats.seed, 3 * i + 2);
        s.delta_lambda_nm = resonance_shift(slopes, s.dw_nm, s.dt_nm, s.dR_nm);
        sum += s.delta_lambda_nm;
    }
    map.mean_shift_nm = sum / static_cast<double>(count);
    if (count > 1) {
        double ss = 0.0;
        for (const auto& s : map.samples) {
            const double d = s.delta_lambda_nm - map.mean_shift_nm;
            ss += d * d;
        }
        map.std_shift_nm = std::sqrt(ss / static_cast<double>(count - 1));
    }
    return map;
}

double shifted_resonance(double nominal_nm, double delta_lambda_nm, double residual_fraction) {
    return nominal_nm + residual_fraction * delta_lambda_nm;
}

double shifted_resonance(const MrDesign& design, const FpvSample& sample, double residual_fraction) {
    return shifted_resonance(design.resonant_wavelength_nm, sample.delta_lambda_nm, residual_fraction);
}

} // namespace mrbnn
