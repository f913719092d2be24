// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/tuning.hpp"

#include "mrbnn/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mrbnn {

namespace {

constexpr int kMaxNaiveIterations = 100000;
constexpr double kNaiveTolerance = 1e-13;

} // namespace

void TuningParams::validate() const {
    const double fields[] = {eo_power_uw_per_nm, eo_max_shift_nm, eo_latency_ns, to_power_mw_per_fsr,
                             to_latency_us, fsr_nm, crosstalk_eta, crosstalk_decay_um,
                             heater_efficiency_nm_per_mw};
    for (double f : fields) {
        require_finite(f, "tuning parameter");
        if (f < 0.0) throw DomainError("tuning parameters must be non-negative");
    }
    if (fsr_nm <= 0.0) throw DomainError("fsr must be positive");
    if (eo_max_shift_nm >= fsr_nm) throw DomainError("EO correction range must be below one FSR");
    if (crosstalk_decay_um <= 0.0) throw DomainError("crosstalk decay length must be positive");
}

TuningParams for_design(TuningParams base, const MrDesign& design) {
    base.fsr_nm = free_spectral_range_nm(design);
    base.heater_efficiency_nm_per_mw = base.fsr_nm / base.to_power_mw_per_fsr;
    base.eo_max_shift_nm = std::min(base.eo_max_shift_nm, 0.5 * base.fsr_nm);
    return base;
}

double fold_to_nearest_resonance(double delta_lambda_nm, double fsr_nm) {
    require_finite(delta_lambda_nm, "resonance shift");
    if (!(fsr_nm > 0.0)) throw DomainError("fsr must be positive");
    // Blue shifts are costed by magnitude; heaters are idealised as bidirectional.
    const double d = std::fmod(std::abs(delta_lambda_nm), fsr_nm);
    return d > 0.5 * fsr_nm ? fsr_nm - d : d;
}

HybridSplit hybrid_split(double delta_lambda_nm, const TuningParams& params) {
    require_finite(delta_lambda_nm, "resonance shift");
    if (delta_lambda_nm < 0.0) throw DomainError("hybrid_split expects a folded, non-negative shift");
    if (delta_lambda_nm > 0.5 * params.fsr_nm * (1.0 + 1e-12))
        throw DomainError("shift exceeds FSR/2; fold to the nearest resonance first");

    HybridSplit out;
    out.eo_shift_nm = std::min(delta_lambda_nm, params.eo_max_shift_nm);
    out.to_shift_nm = delta_lambda_nm - out.eo_shift_nm;
    out.power_mw = out.eo_shift_nm * params.eo_power_uw_per_nm * 1e-3 +
                   out.to_shift_nm / params.fsr_nm * params.to_power_mw_per_fsr;
    out.latency_ns = out.to_shift_nm > 0.0 ? params.to_latency_us * 1e3 : params.eo_latency_ns;
    return out;
}

bool ThermalCrosstalkMatrix::diagonally_dominant() const {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        double off = 0.0;
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            if (j != i) off += std::abs(k(i, j));
        }
        if (!(off < std::abs(k(i, i)))) return false;
    }
    return true;
}

ThermalCrosstalkMatrix crosstalk_matrix(const Eigen::MatrixXd& distances_um, double eta, double decay_um) {
    if (distances_um.rows() != distances_um.cols()) throw DomainError("distance matrix must be square");
    if (!(decay_um > 0.0)) throw DomainError("crosstalk decay length must be positive");
    ThermalCrosstalkMatrix m;
    m.k = (-distances_um.array() / decay_um).exp().matrix() * eta;
    m.k.diagonal().setOnes();
    return m;
}

Eigen::MatrixXd uniform_spacing(std::size_t count, double pitch_um) {
    const auto n = static_cast<Eigen::Index>(count);
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(static_cast<double>(i - j)) * pitch_um;
    return d;
}

TedResult ted_tuning_power(std::span<const double> target_shifts_nm, const ThermalCrosstalkMatrix& km,
                           double heater_efficiency_nm_per_mw) {
    const auto n = static_cast<Eigen::Index>(target_shifts_nm.size());
    if (km.k.rows() != n || km.k.cols() != n) throw DomainError("crosstalk matrix size does not match targets");
    if (!(heater_efficiency_nm_per_mw > 0.0)) throw DomainError("heater efficiency must be positive");
    if (n == 0) return {};
    for (double t : target_shifts_nm) {
        require_finite(t, "target shift");
        if (t < 0.0) throw DomainError("target heater shifts must be non-negative");
    }
    if (!km.diagonally_dominant())
        throw IllConditionedLayoutError("thermal crosstalk matrix is not diagonally dominant");

    const Eigen::Map<const Eigen::VectorXd> target(target_shifts_nm.data(), n);

    // Collective solve: K s = target.
    const Eigen::VectorXd s_ted = km.k.partialPivLu().solve(target);

    // Independent heaters: each one escalates to cancel what its neighbours inject.
    const Eigen::MatrixXd coupling = km.k - Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd s = target;
    bool converged = false;
    for (int it = 0; it < kMaxNaiveIterations; ++it) {
        Eigen::VectorXd next = target + coupling * s.cwiseAbs();
        const double step = (next - s).cwiseAbs().maxCoeff();
        s = std::move(next);
        if (!std::isfinite(step)) break;
        if (step <= kNaiveTolerance * std::max(1.0, s.cwiseAbs().maxCoeff())) {
            converged = true;
            break;
        }
    }
    if (!converged) throw IllConditionedLayoutError("naive tuning escalation did not converge");

    TedResult r;
    r.p_ted_mw = s_ted.cwiseAbs().sum() / heater_efficiency_nm_per_mw;
    r.p_naive_mw = s.cwiseAbs().sum() / heater_efficiency_nm_per_mw;
    r.reduction_fraction = r.p_naive_mw > 0.0 ? 1.0 - r.p_ted_mw / r.p_naive_mw : 0.0;
    return r;
}

TedResult ted_tuning_power(std::span<const double> target_shifts_nm, const Eigen::MatrixXd& distances_um,
                           const TuningParams& params) {
    const auto km = crosstalk_matrix(distances_um, params.crosstalk_eta, params.crosstalk_decay_um);
    return ted_tuning_power(target_shifts_nm, km, params.heater_efficiency_nm_per_mw);
}

BankBudget bank_tuning_budget(std::span<const double> delta_lambda_nm, double tuning_fraction,
                              double layout_spacing_um, const TuningParams& params) {
    require_finite(tuning_fraction, "tuning fraction");
    if (tuning_fraction < 0.0 || tuning_fraction > 1.0) throw DomainError("tuning fraction must lie in [0, 1]");
    BankBudget b;
    if (delta_lambda_nm.empty() || tuning_fraction == 0.0) return b;

    std::vector<double> to_targets(delta_lambda_nm.size());
    for (std::size_t i = 0; i < delta_lambda_nm.size(); ++i) {
        const double corrected = tuning_fraction * fold_to_nearest_resonance(delta_lambda_nm[i], params.fsr_nm);
        const HybridSplit split = hybrid_split(corrected, params);
        b.eo_power_mw += split.eo_shift_nm * params.eo_power_uw_per_nm * 1e-3;
        to_targets[i] = split.to_shift_nm;
        b.worst_latency_ns = std::max(b.worst_latency_ns, split.latency_ns);
    }
    const bool any_to = std::any_of(to_targets.begin(), to_targets.end(), [](double t) { return t > 0.0; });
    if (any_to) {
        const auto ted = ted_tuning_power(to_targets, uniform_spacing(to_targets.size(), layout_spacing_um), params);
        b.to_power_mw = ted.p_ted_mw;
    }
    b.total_power_mw = b.eo_power_mw + b.to_power_mw;
    return b;
}

std::vector<SpacingSweepRow> ted_spacing_sweep(std::size_t mr_count, std::span<const double> spacings_um,
                                               double uniform_target_nm, const TuningParams& params) {
    std::vector<SpacingSweepRow> rows;
    rows.reserve(spacings_um.size());
    const std::vector<double> targets(mr_count, uniform_target_nm);
    for (double sp : spacings_um) {
        rows.push_back({sp, ted_tuning_power(targets, uniform_spacing(mr_count, sp), params)});
    }
    return rows;
}

} // namespace mrbnn
