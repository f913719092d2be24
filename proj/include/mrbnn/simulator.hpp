// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Behavioral accelerator model: FPV-perturbed photonic inference, optical
// loss and laser sizing, pipeline latency, power, energy-per-bit and area.

#pragma once

#include "mrbnn/bnn.hpp"
#include "mrbnn/mapping.hpp"
#include "mrbnn/photonics.hpp"
#include "mrbnn/tuning.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrbnn {

struct LossBudget {
    double propagation_db_per_cm = 1.0;
    double splitter_db = 0.13;
    double combiner_db = 0.9;
    double mr_through_db = 0.02;
    double mr_modulation_db = 0.72;
    double eo_tuning_db_per_cm = 6.0;
    double to_tuning_db_per_cm = 1.0;
    double detector_sensitivity_dbm = -20.0;

    void validate() const;
    bool operator==(const LossBudget&) const = default;
};

struct DeviceSpec {
    double power_mw = 0.0;
    double latency_ns = 0.0;
    bool operator==(const DeviceSpec&) const = default;
};

/// Electronic/optoelectronic devices; tuning rates live in TuningParams.
struct DevicePowerTable {
    DeviceSpec vcsel{0.66, 10.0};
    DeviceSpec tia{7.2, 0.15};
    DeviceSpec photodetector{2.8, 0.0058};
    DeviceSpec dac{59.7, 0.33};  // 4-bit
    DeviceSpec adc{62.0, 24.0};

    void validate() const;
    bool operator==(const DevicePowerTable&) const = default;
};

/// A negative t_del_ns selects one full optical path latency.
struct EcuTiming {
    double clock_ghz = 2.5;
    double local_buffer_ns = 0.4;
    double vector_distribution_ns = 0.4;
    double parameter_buffering_ns = 0.4;
    double t_del_ns = -1.0;
    std::uint64_t ecu_buffered_params = 0;  ///< 0: the whole model is buffered

    void validate() const;
    bool operator==(const EcuTiming&) const = default;
};

/// Placeholder floor-plan constants.
struct AreaModel {
    double per_vdp_overhead_mm2 = 0.05;
    double dac_mm2 = 0.002;
    double adc_mm2 = 0.01;
    double global_overhead_mm2 = 1.0;

    void validate() const;
    bool operator==(const AreaModel&) const = default;
};

struct Platform {
    MrDesign activation_mr = default_design(RingClass::MultiBit);
    MrDesign weight_mr = default_design(RingClass::SingleBit);
    MrDesign broadband_mr = default_design(RingClass::Broadband);
    TuningParams tuning;
    LossBudget loss;
    DevicePowerTable devices;
    EcuTiming ecu;
    AreaModel area;

    void validate() const;
    /// Usable broadband passband in nm at the activation wavelength.
    double usable_band_nm() const;
    bool operator==(const Platform&) const = default;
};

struct LaserPower {
    double dbm = 0.0;
    double mw = 0.0;
};

/// Smallest laser output with P_laser - S >= loss + 10 log10(N_lambda).
LaserPower laser_power(std::size_t n_lambda, double total_loss_db, double sensitivity_dbm);

struct OpticalPath {
    double length_cm = 0.0;
    std::size_t splitter_stages = 0;
    std::size_t combiners = 0;
    std::size_t through_mrs = 0;
    std::size_t modulating_mrs = 0;
    double eo_tuned_cm = 0.0;
    double to_tuned_cm = 0.0;
    double extra_db = 0.0;  ///< insertion losses and fan-out division
};

double path_loss_db(const OpticalPath& path, const LossBudget& loss);

struct LossReport {
    OpticalPath arm_path;
    double fanout_db = 0.0;
    double broadband_insertion_db = 0.0;
    double total_db = 0.0;  ///< worst-case laser-to-detector loss of one arm
};

LossReport loss_accounting(const AcceleratorConfig& cfg, const Platform& platform);

struct PipelineTiming {
    double t_del_ns = 0.0;
    double delta_t_ns = 0.0;
    double buffering_ns = 0.0;
    std::uint64_t X = 0;
    std::uint64_t x = 0;
    double total_ns = 0.0;
};

/// One trip through DAC, EO settle, PD, TIA, VCSEL and ADC.
double optical_path_latency_ns(const DevicePowerTable& devices, const TuningParams& tuning);

PipelineTiming pipeline_time(std::uint64_t parameters, const AcceleratorConfig& cfg, const EcuTiming& ecu,
                             const DevicePowerTable& devices, const TuningParams& tuning);

/// T_del + delta_t * X + buffering * x.
double pipeline_total_ns(const PipelineTiming& t, std::uint64_t X, std::uint64_t x);

/// Per-MR resonance shifts for a whole chip. Index lane * positions + j,
/// lane = vdp * n_wg + arm.
struct ChipFpvMap {
    std::size_t lanes = 0;
    std::size_t positions = 0;
    std::vector<double> activation_nm;
    std::vector<double> weight_pos_nm;
    std::vector<double> weight_neg_nm;
    std::vector<double> broadband_nm;  ///< one per lane

    bool all_zero() const;
};

ChipFpvMap sample_chip_fpv(const AcceleratorConfig& cfg, const Platform& platform, const FpvStatistics& stats,
                           std::size_t positions_per_arm);

struct PowerBreakdown {
    double laser = 0.0;
    double to_tuning = 0.0;
    double eo_tuning = 0.0;
    double dac = 0.0;
    double adc = 0.0;
    double pd = 0.0;
    double tia = 0.0;
    double vcsel = 0.0;

    double total() const;
};

struct Workload {
    std::string name;
    std::uint64_t parameters = 0;
    int activation_bits = 4;

    bool operator==(const Workload&) const = default;
};

struct SimReport {
    std::uint64_t parameters = 0;
    double fps = 0.0;
    PowerBreakdown power_mw;
    double total_power_mw = 0.0;
    std::optional<double> epb_pj_per_bit;  ///< empty for a parameter-free model
    double area_mm2 = 0.0;
    PipelineTiming timing;
    std::optional<double> noisy_accuracy;
    double required_bandwidth_gb_s = 0.0;
    double path_loss_db = 0.0;
    double laser_dbm = 0.0;
    std::size_t n_lambda = 0;
    double tuning_fraction = 0.0;

    std::string to_json() const;
};

/// Bits per step streamed into one VDP divided by delta_t.
double required_bandwidth_gb_s(const AcceleratorConfig& cfg, int activation_bits, double delta_t_ns);

struct TuningPower {
    double eo_mw = 0.0;
    double to_mw = 0.0;
    double worst_latency_ns = 0.0;
};

/// Activation, weight and broadband banks of every arm, corrected by
/// tuning_fraction with collective heater solves per bank.
TuningPower chip_tuning_power(const AcceleratorConfig& cfg, const Platform& platform, const ChipFpvMap& map,
                              double tuning_fraction);

SimReport power_and_epb(const Workload& workload, const AcceleratorConfig& cfg, const Platform& platform,
                        const ChipFpvMap& map, double tuning_fraction);

double area_estimate(const AcceleratorConfig& cfg, const Platform& platform);

struct NoisyResult {
    double accuracy = 0.0;
    std::vector<InferenceResult> outputs;
};

/// Runs every linear layer slice by slice on its lane with each imprinted
/// value scaled by T(lambda; lambda')/T(lambda; lambda_MR), clamped to [0, 1].
/// Weights are dual-rail; activations carry their sign electronically.
NoisyResult noisy_inference(const QuantModel& model, const Dataset& data, const AcceleratorConfig& cfg,
                            const Platform& platform, const ChipFpvMap& map, double tuning_fraction);

/// Convenience overload that samples the chip map from `stats` with `seed`.
NoisyResult noisy_inference(const QuantModel& model, const Dataset& data, const AcceleratorConfig& cfg,
                            const Platform& platform, const FpvStatistics& stats, std::uint64_t seed,
                            double tuning_fraction);

struct FractionRow {
    double fraction = 0.0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
};

/// Map k uses seed derive_seed(base_seed, k); every fraction sees the same maps.
std::vector<FractionRow> fpv_fraction_sweep(const QuantModel& model, const Dataset& data,
                                            const AcceleratorConfig& cfg, const Platform& platform,
                                            const FpvStatistics& stats, std::span<const double> fractions,
                                            std::size_t maps, std::uint64_t base_seed);

} // namespace mrbnn
