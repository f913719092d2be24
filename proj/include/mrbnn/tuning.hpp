// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Resonance-correction power: hybrid electro-optic / thermo-optic split and
// collective (thermal-eigenmode) heater solves with thermal crosstalk.

#pragma once

#include "mrbnn/photonics.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace mrbnn {

struct TuningParams {
    double eo_power_uw_per_nm = 4.0;
    double eo_max_shift_nm = 1.0;
    double eo_latency_ns = 20.0;
    double to_power_mw_per_fsr = 27.5;
    double to_latency_us = 4.0;
    double fsr_nm = 18.2;                    ///< per design, see for_design()
    double crosstalk_eta = 0.0945651501287;  ///< fitted to 51% @ 5 um, 41% @ 7 um
    double crosstalk_decay_um = 16.595133825;
    double heater_efficiency_nm_per_mw = 18.2 / 27.5;

    void validate() const;
    bool operator==(const TuningParams&) const = default;
};

/// Copy of `base` with FSR and heater efficiency derived from `design`.
TuningParams for_design(TuningParams base, const MrDesign& design);

struct HybridSplit {
    double eo_shift_nm = 0.0;
    double to_shift_nm = 0.0;
    double power_mw = 0.0;
    double latency_ns = 0.0;
};

/// `delta_lambda_nm` must already be folded to the nearest resonance.
HybridSplit hybrid_split(double delta_lambda_nm, const TuningParams& params);

/// Distance to the nearest resonance of the comb, in [0, FSR/2].
double fold_to_nearest_resonance(double delta_lambda_nm, double fsr_nm);

struct ThermalCrosstalkMatrix {
    Eigen::MatrixXd k;

    bool diagonally_dominant() const;
    std::size_t size() const { return static_cast<std::size_t>(k.rows()); }
};

/// K_ii = 1, K_ij = eta * exp(-d_ij / d0).
ThermalCrosstalkMatrix crosstalk_matrix(const Eigen::MatrixXd& distances_um, double eta, double decay_um);

/// Pairwise distances for MRs placed on a line at uniform pitch.
Eigen::MatrixXd uniform_spacing(std::size_t count, double pitch_um);

struct TedResult {
    double p_naive_mw = 0.0;
    double p_ted_mw = 0.0;
    double reduction_fraction = 0.0;
};

/// Targets are non-negative heater shifts (nm).
TedResult ted_tuning_power(std::span<const double> target_shifts_nm, const ThermalCrosstalkMatrix& k,
                           double heater_efficiency_nm_per_mw);
TedResult ted_tuning_power(std::span<const double> target_shifts_nm, const Eigen::MatrixXd& distances_um,
                           const TuningParams& params);

struct BankBudget {
    double total_power_mw = 0.0;
    double eo_power_mw = 0.0;
    double to_power_mw = 0.0;
    double worst_latency_ns = 0.0;
};

/// Each MR is corrected by tuning_fraction of its folded shift; EO absorbs
/// what it can and the TO remainders are solved collectively for the bank.
BankBudget bank_tuning_budget(std::span<const double> delta_lambda_nm, double tuning_fraction,
                              double layout_spacing_um, const TuningParams& params);

struct SpacingSweepRow {
    double spacing_um = 0.0;
    TedResult ted;
};

std::vector<SpacingSweepRow> ted_spacing_sweep(std::size_t mr_count, std::span<const double> spacings_um,
                                               double uniform_target_nm, const TuningParams& params);

} // namespace mrbnn
