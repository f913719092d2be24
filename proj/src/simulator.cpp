// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/simulator.hpp"

#include "mrbnn/errors.hpp"
#include "mrbnn/random.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrbnn {

namespace {

void require_non_negative(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError(std::string(what) + " must be finite and non-negative");
}

} // namespace

void LossBudget::validate() const {
    require_non_negative(propagation_db_per_cm, "propagation_db_per_cm");
    require_non_negative(splitter_db, "splitter_db");
    require_non_negative(combiner_db, "combiner_db");
    require_non_negative(mr_through_db, "mr_through_db");
    require_non_negative(mr_modulation_db, "mr_modulation_db");
    require_non_negative(eo_tuning_db_per_cm, "eo_tuning_db_per_cm");
    require_non_negative(to_tuning_db_per_cm, "to_tuning_db_per_cm");
    if (!std::isfinite(detector_sensitivity_dbm)) throw ConfigError("detector_sensitivity_dbm must be finite");
}

void DevicePowerTable::validate() const {
    for (const DeviceSpec* d : {&vcsel, &tia, &photodetector, &dac, &adc}) {
        require_non_negative(d->power_mw, "device power_mw");
        require_non_negative(d->latency_ns, "device latency_ns");
    }
}

void EcuTiming::validate() const {
    if (!(clock_ghz > 0.0) || !std::isfinite(clock_ghz)) throw ConfigError("clock_ghz must be positive");
    require_non_negative(local_buffer_ns, "local_buffer_ns");
    require_non_negative(vector_distribution_ns, "vector_distribution_ns");
    require_non_negative(parameter_buffering_ns, "parameter_buffering_ns");
    if (!std::isfinite(t_del_ns)) throw ConfigError("t_del_ns must be finite");
}

void AreaModel::validate() const {
    require_non_negative(per_vdp_overhead_mm2, "per_vdp_overhead_mm2");
    require_non_negative(dac_mm2, "dac_mm2");
    require_non_negative(adc_mm2, "adc_mm2");
    require_non_negative(global_overhead_mm2, "global_overhead_mm2");
}

void Platform::validate() const {
    auto check_design = [](const MrDesign& d, RingClass expected) {
        if (d.ring_class != expected) throw ConfigError("device class mismatch for " + std::string(to_string(expected)));
        try {
            d.validate();
        } catch (const DomainError& e) {
            throw ConfigError(std::string(to_string(expected)) + ": " + e.what());
        }
    };
    check_design(activation_mr, RingClass::MultiBit);
    check_design(weight_mr, RingClass::SingleBit);
    check_design(broadband_mr, RingClass::Broadband);
    try {
        tuning.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("tuning: ") + e.what());
    }
    loss.validate();
    devices.validate();
    ecu.validate();
    area.validate();
}

double Platform::usable_band_nm() const {
    return bandwidth_thz_to_nm(broadband_mr.usable_bandwidth_thz, activation_mr.resonant_wavelength_nm);
}

LaserPower laser_power(std::size_t n_lambda, double total_loss_db, double sensitivity_dbm) {
    if (n_lambda == 0) throw DomainError("laser needs at least one wavelength");
    require_finite(total_loss_db, "path loss");
    require_finite(sensitivity_dbm, "detector sensitivity");
    LaserPower p;
    p.dbm = sensitivity_dbm + total_loss_db + 10.0 * std::log10(static_cast<double>(n_lambda));
    p.mw = std::pow(10.0, p.dbm / 10.0);
    return p;
}

double path_loss_db(const OpticalPath& p, const LossBudget& loss) {
    return loss.propagation_db_per_cm * p.length_cm + loss.splitter_db * static_cast<double>(p.splitter_stages) +
           loss.combiner_db * static_cast<double>(p.combiners) +
           loss.mr_through_db * static_cast<double>(p.through_mrs) +
           loss.mr_modulation_db * static_cast<double>(p.modulating_mrs) + loss.eo_tuning_db_per_cm * p.eo_tuned_cm +
           loss.to_tuning_db_per_cm * p.to_tuned_cm + p.extra_db;
}

LossReport loss_accounting(const AcceleratorConfig& cfg, const Platform& platform) {
    constexpr double kUmPerCm = 1e4;
    const std::size_t n = cfg.mrs_per_arm();
    const std::size_t lanes = std::max<std::size_t>(cfg.lanes(), 1);
    auto footprint_um = [&](const MrDesign& d) { return 2.0 * d.radius_um + cfg.mr_pitch_um; };
    auto circumference_cm = [](const MrDesign& d) { return 2.0 * std::numbers::pi * d.radius_um / kUmPerCm; };

    LossReport r;
    OpticalPath& p = r.arm_path;
    p.length_cm = (static_cast<double>(n) * (footprint_um(platform.activation_mr) + footprint_um(platform.weight_mr)) +
                   static_cast<double>(cfg.n_b) * footprint_um(platform.broadband_mr)) /
                  kUmPerCm;
    p.splitter_stages = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(lanes))));
    p.combiners = 1;
    p.modulating_mrs = 2;
    p.through_mrs = 2 * n - std::min<std::size_t>(2 * n, 2);
    p.eo_tuned_cm = circumference_cm(platform.activation_mr) + circumference_cm(platform.weight_mr);
    p.to_tuned_cm = p.eo_tuned_cm;
    r.fanout_db = 10.0 * std::log10(static_cast<double>(lanes));
    r.broadband_insertion_db = static_cast<double>(cfg.n_b) * platform.broadband_mr.insertion_loss_db;
    p.extra_db = r.fanout_db + r.broadband_insertion_db;
    r.total_db = path_loss_db(p, platform.loss);
    return r;
}

double optical_path_latency_ns(const DevicePowerTable& d, const TuningParams& tuning) {
    return d.dac.latency_ns + tuning.eo_latency_ns + d.photodetector.latency_ns + d.tia.latency_ns +
           d.vcsel.latency_ns + d.adc.latency_ns;
}

PipelineTiming pipeline_time(std::uint64_t parameters, const AcceleratorConfig& cfg, const EcuTiming& ecu,
                             const DevicePowerTable& devices, const TuningParams& tuning) {
    const std::uint64_t per_step = static_cast<std::uint64_t>(cfg.weights_per_vdp()) * cfg.n_vdp;
    if (per_step == 0) throw ConfigError("accelerator processes no weights per step");
    const std::uint64_t buffered = ecu.ecu_buffered_params == 0 ? parameters : std::min(parameters, ecu.ecu_buffered_params);
    PipelineTiming t;
    t.t_del_ns = ecu.t_del_ns < 0.0 ? optical_path_latency_ns(devices, tuning) : ecu.t_del_ns;
    t.delta_t_ns = ecu.local_buffer_ns + ecu.vector_distribution_ns;
    t.buffering_ns = ecu.parameter_buffering_ns;
    t.X = (parameters + per_step - 1) / per_step;
    t.x = (buffered + per_step - 1) / per_step;
    t.total_ns = pipeline_total_ns(t, t.X, t.x);
    return t;
}

double pipeline_total_ns(const PipelineTiming& t, std::uint64_t X, std::uint64_t x) {
    return t.t_del_ns + t.delta_t_ns * static_cast<double>(X) + t.buffering_ns * static_cast<double>(x);
}

bool ChipFpvMap::all_zero() const {
    auto zero = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double d) { return d == 0.0; }); };
    return zero(activation_nm) && zero(weight_pos_nm) && zero(weight_neg_nm) && zero(broadband_nm);
}

ChipFpvMap sample_chip_fpv(const AcceleratorConfig& cfg, const Platform& platform, const FpvStatistics& stats,
                           std::size_t positions_per_arm) {
    stats.validate();
    ChipFpvMap m;
    m.lanes = cfg.lanes();
    m.positions = positions_per_arm;
    auto draw = [&](const MrDesign& d, std::uint64_t label, std::size_t count) {
        std::vector<double> out;
        if (count == 0) return out;
        FpvStatistics s = stats;
        s.seed = derive_seed(stats.seed, label);
        const FpvMap map = sample_fpv_map(std::span<const MrDesign>(&d, 1), s, count);
        out.reserve(count);
        for (const auto& sample : map.samples) out.push_back(sample.delta_lambda_nm);
        return out;
    };
    const std::size_t n = m.lanes * positions_per_arm;
    m.activation_nm = draw(platform.activation_mr, 1, n);
    m.weight_pos_nm = draw(platform.weight_mr, 2, n);
    m.weight_neg_nm = draw(platform.weight_mr, 3, n);
    m.broadband_nm = draw(platform.broadband_mr, 4, m.lanes * cfg.n_b);
    return m;
}

double PowerBreakdown::total() const { return laser + to_tuning + eo_tuning + dac + adc + pd + tia + vcsel; }

double required_bandwidth_gb_s(const AcceleratorConfig& cfg, int activation_bits, double delta_t_ns) {
    if (!(delta_t_ns > 0.0)) throw ConfigError("delta_t must be positive to derive bandwidth");
    const double bits = static_cast<double>(cfg.n_a * cfg.n_wg) + static_cast<double>(cfg.n_a) * activation_bits;
    return bits / 8.0 / delta_t_ns;
}

TuningPower chip_tuning_power(const AcceleratorConfig& cfg, const Platform& platform, const ChipFpvMap& map,
                              double tuning_fraction) {
    const std::size_t n = cfg.mrs_per_arm();
    if (map.lanes != cfg.lanes() || map.positions != n || map.broadband_nm.size() != map.lanes * cfg.n_b)
        throw DomainError("FPV map does not match the accelerator's banks");
    const TuningParams act = for_design(platform.tuning, platform.activation_mr);
    const TuningParams wt = for_design(platform.tuning, platform.weight_mr);
    const TuningParams bb = for_design(platform.tuning, platform.broadband_mr);
    TuningPower total;
    auto add = [&](const BankBudget& b) {
        total.eo_mw += b.eo_power_mw;
        total.to_mw += b.to_power_mw;
        total.worst_latency_ns = std::max(total.worst_latency_ns, b.worst_latency_ns);
    };
    for (std::size_t lane = 0; lane < map.lanes; ++lane) {
        const std::span<const double> a(map.activation_nm.data() + lane * n, n);
        const std::span<const double> w(map.weight_pos_nm.data() + lane * n, n);
        const std::span<const double> b(map.broadband_nm.data() + lane * cfg.n_b, cfg.n_b);
        add(bank_tuning_budget(a, tuning_fraction, cfg.mr_pitch_um, act));
        add(bank_tuning_budget(w, tuning_fraction, cfg.mr_pitch_um, wt));
        add(bank_tuning_budget(b, tuning_fraction, cfg.mr_pitch_um, bb));
    }
    return total;
}

double area_estimate(const AcceleratorConfig& cfg, const Platform& platform) {
    auto mr_um2 = [&](const MrDesign& d) {
        const double r = d.radius_um + 0.5 * cfg.mr_pitch_um;
        return std::numbers::pi * r * r;
    };
    const double arms = static_cast<double>(cfg.n_vdp * cfg.n_wg);
    const double n = static_cast<double>(cfg.mrs_per_arm());
    const double mr_um2_total =
        arms * (n * (mr_um2(platform.activation_mr) + mr_um2(platform.weight_mr)) +
                static_cast<double>(cfg.n_b) * mr_um2(platform.broadband_mr));
    const double vdp = static_cast<double>(cfg.n_vdp);
    const auto& a = platform.area;
    return mr_um2_total * 1e-6 + vdp * a.per_vdp_overhead_mm2 + vdp * static_cast<double>(cfg.n_a) * a.dac_mm2 +
           vdp * a.adc_mm2 + a.global_overhead_mm2;
}

SimReport power_and_epb(const Workload& workload, const AcceleratorConfig& cfg, const Platform& platform,
                        const ChipFpvMap& map, double tuning_fraction) {
    cfg.validate();
    platform.validate();
    if (workload.activation_bits < 1) throw ConfigError("workload activation_bits must be at least 1");
    (void)wavelength_assignment(cfg, platform.activation_mr.resonant_wavelength_nm, platform.usable_band_nm());

    SimReport r;
    r.parameters = workload.parameters;
    r.tuning_fraction = tuning_fraction;
    r.n_lambda = cfg.mrs_per_arm();
    const LossReport loss = loss_accounting(cfg, platform);
    r.path_loss_db = loss.total_db;
    const LaserPower laser = laser_power(r.n_lambda, loss.total_db, platform.loss.detector_sensitivity_dbm);
    r.laser_dbm = laser.dbm;

    const TuningPower tune = chip_tuning_power(cfg, platform, map, tuning_fraction);
    const double vdp = static_cast<double>(cfg.n_vdp);
    const double wg = static_cast<double>(cfg.n_wg);
    const auto& d = platform.devices;
    PowerBreakdown& p = r.power_mw;
    p.laser = laser.mw;
    p.eo_tuning = tune.eo_mw;
    p.to_tuning = tune.to_mw;
    p.dac = vdp * static_cast<double>(cfg.n_a) * d.dac.power_mw;
    p.pd = vdp * (2.0 * wg + 1.0) * d.photodetector.power_mw;
    p.tia = vdp * (wg + 1.0) * d.tia.power_mw;
    p.vcsel = vdp * wg * d.vcsel.power_mw;
    p.adc = vdp * d.adc.power_mw;
    r.total_power_mw = p.total();

    r.timing = pipeline_time(workload.parameters, cfg, platform.ecu, d, platform.tuning);
    r.fps = 1e9 / r.timing.total_ns;
    const double bits = static_cast<double>(workload.parameters) * (1.0 + workload.activation_bits);
    if (bits > 0.0) r.epb_pj_per_bit = r.total_power_mw * r.timing.total_ns / bits;
    r.area_mm2 = area_estimate(cfg, platform);
    r.required_bandwidth_gb_s = required_bandwidth_gb_s(cfg, workload.activation_bits, r.timing.delta_t_ns);
    return r;
}

std::string SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["parameters"] = parameters;
    j["fps"] = fps;
    j["total_power_mw"] = total_power_mw;
    j["power_breakdown_mw"] = {{"laser", power_mw.laser},   {"to_tuning", power_mw.to_tuning},
                               {"eo_tuning", power_mw.eo_tuning}, {"dac", power_mw.dac},
                               {"adc", power_mw.adc},       {"pd", power_mw.pd},
                               {"tia", power_mw.tia},       {"vcsel", power_mw.vcsel}};
    j["epb_pj_per_bit"] = epb_pj_per_bit ? nlohmann::ordered_json(*epb_pj_per_bit) : nlohmann::ordered_json(nullptr);
    j["area_mm2"] = area_mm2;
    j["inference_time_ns"] = timing.total_ns;
    j["pipeline"] = {{"t_del_ns", timing.t_del_ns}, {"delta_t_ns", timing.delta_t_ns},
                     {"buffering_ns", timing.buffering_ns}, {"X", timing.X}, {"x", timing.x}};
    j["noisy_accuracy"] = noisy_accuracy ? nlohmann::ordered_json(*noisy_accuracy) : nlohmann::ordered_json(nullptr);
    j["required_bandwidth_gb_s"] = required_bandwidth_gb_s;
    j["path_loss_db"] = path_loss_db;
    j["laser_dbm"] = laser_dbm;
    j["n_lambda"] = n_lambda;
    j["tuning_fraction"] = tuning_fraction;
    return j.dump(2) + "\n";
}

namespace {

struct LaneGains {
    std::size_t positions = 0;
    std::vector<double> activation, weight_pos, weight_neg;
};

double ratio_gain(const MrDesign& d, double channel_nm, double delta_nm, double residual) {
    const double nominal = transmission(d, channel_nm, channel_nm);
    const double shifted = transmission(d, channel_nm, shifted_resonance(channel_nm, delta_nm, residual));
    return shifted / nominal;
}

LaneGains lane_gains(const AcceleratorConfig& cfg, const Platform& platform, const ChipFpvMap& map, double residual) {
    LaneGains g;
    g.positions = map.positions;
    const std::size_t total = map.lanes * map.positions;
    g.activation.resize(total);
    g.weight_pos.resize(total);
    g.weight_neg.resize(total);
    const double centre = platform.activation_mr.resonant_wavelength_nm;
    for (std::size_t k = 0; k < total; ++k) {
        const std::size_t j = k % map.positions;
        const double ch = centre + (static_cast<double>(j) - 0.5 * static_cast<double>(map.positions - 1)) *
                                       cfg.channel_spacing_nm;
        g.activation[k] = ratio_gain(platform.activation_mr, ch, map.activation_nm[k], residual);
        g.weight_pos[k] = ratio_gain(platform.weight_mr, ch, map.weight_pos_nm[k], residual);
        g.weight_neg[k] = ratio_gain(platform.weight_mr, ch, map.weight_neg_nm[k], residual);
    }
    return g;
}

struct LayerSlices {
    std::vector<const Slice*> slices;
    double weight_scale = 1.0;
};

// Photonic evaluation of one linear layer through its slices.
Tensor photonic_linear(const QuantModel& model, std::size_t li, const Tensor& x, const LayerSlices& ls,
                       const AcceleratorConfig& cfg, const LaneGains& g) {
    const Layer& layer = model.layers[li];
    const bool sign = model.uses_sign(li);
    double a_scale = 1.0;
    for (double v : x.data) a_scale = std::max(a_scale, std::abs(v));

    auto weight_value = [&](std::size_t k, std::size_t lane_pos) {
        const double w = sign ? static_cast<double>(binarize(layer.weights[k])) : layer.weights[k];
        const double pos = std::min(1.0, std::max(w, 0.0) / ls.weight_scale * g.weight_pos[lane_pos]);
        const double neg = std::min(1.0, std::max(-w, 0.0) / ls.weight_scale * g.weight_neg[lane_pos]);
        return (pos - neg) * ls.weight_scale;
    };
    auto activation_value = [&](double a, std::size_t lane_pos) {
        const double enc = std::min(1.0, std::abs(a) / a_scale * g.activation[lane_pos]);
        return std::copysign(enc * a_scale, a);
    };
    auto lane_of = [&](const Slice& s) { return s.vdp * cfg.n_wg + s.arm; };

    if (layer.kind == LayerKind::FullyConnected) {
        const std::size_t in = layer.weight_shape[1];
        Tensor y({layer.weight_shape[0]});
        for (const Slice* s : ls.slices) {
            const std::size_t base = lane_of(*s) * g.positions;
            double partial = 0.0;
            for (std::size_t j = 0; j < s->length; ++j) {
                const std::size_t i = s->offset + j;
                partial += activation_value(x.data[i], base + j) * weight_value(s->row * in + i, base + j);
            }
            y.data[s->row] += partial;
        }
        return y;
    }

    const Shape out_shape = model.shape_before(li + 1);
    const std::size_t ic = layer.weight_shape[1], kh = layer.weight_shape[2], kw = layer.weight_shape[3];
    const std::size_t h = x.shape[1], w = x.shape[2], oh = out_shape[1], ow = out_shape[2];
    const std::size_t len = ic * kh * kw;
    Tensor y(out_shape);
    std::vector<double> wvals;
    for (const Slice* s : ls.slices) {
        const std::size_t base = lane_of(*s) * g.positions;
        wvals.resize(s->length);
        for (std::size_t j = 0; j < s->length; ++j) wvals[j] = weight_value(s->row * len + s->offset + j, base + j);
        for (std::size_t oy = 0; oy < oh; ++oy)
            for (std::size_t ox = 0; ox < ow; ++ox) {
                double partial = 0.0;
                for (std::size_t j = 0; j < s->length; ++j) {
                    const std::size_t f = s->offset + j;
                    const std::size_t c = f / (kh * kw), ky = (f / kw) % kh, kx = f % kw;
                    const double a = x.data[(c * h + oy * layer.stride + ky) * w + ox * layer.stride + kx];
                    partial += activation_value(a, base + j) * wvals[j];
                }
                y.data[(s->row * oh + oy) * ow + ox] += partial;
            }
    }
    return y;
}

} // namespace

NoisyResult noisy_inference(const QuantModel& model, const Dataset& data, const AcceleratorConfig& cfg,
                            const Platform& platform, const ChipFpvMap& map, double tuning_fraction) {
    require_finite(tuning_fraction, "tuning fraction");
    if (tuning_fraction < 0.0 || tuning_fraction > 1.0) throw DomainError("tuning fraction must lie in [0, 1]");
    const WorkPlan plan = build_work_plan(model, cfg);
    if (map.lanes != cfg.lanes() || map.positions < cfg.n_a)
        throw DomainError("FPV map does not cover every lane position of the work plan");
    const LaneGains gains = lane_gains(cfg, platform, map, 1.0 - tuning_fraction);

    std::vector<LayerSlices> per_layer(model.layers.size());
    for (const auto& s : plan.slices) per_layer[s.layer].slices.push_back(&s);
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& l = model.layers[li];
        if (!l.is_linear() || model.uses_sign(li)) continue;
        double m = 0.0;
        for (double w : l.weights) m = std::max(m, std::abs(w));
        per_layer[li].weight_scale = m > 0.0 ? m : 1.0;
    }

    const ElectronicStage stage(model, BnMode::Folded);
    NoisyResult result;
    std::size_t correct = 0;
    for (const auto& sample : data) {
        Tensor x = stage.prepare_input(Tensor(model.input_shape, sample.x));
        std::size_t i = 0;
        while (i < model.layers.size()) {
            std::size_t next = i;
            if (model.layers[i].is_linear()) {
                x = photonic_linear(model, i, x, per_layer[i], cfg, gains);
                ++next;
            }
            std::size_t end = next;
            while (end < model.layers.size() && !model.layers[end].is_linear()) ++end;
            x = stage.apply(x, next, end);
            i = end;
        }
        InferenceResult r;
        r.logits = std::move(x.data);
        r.predicted = r.logits.size() == 1
                          ? (r.logits[0] >= 0.0 ? 1 : 0)
                          : static_cast<std::size_t>(std::max_element(r.logits.begin(), r.logits.end()) - r.logits.begin());
        if (r.predicted == static_cast<std::size_t>(sample.label)) ++correct;
        result.outputs.push_back(std::move(r));
    }
    result.accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
    return result;
}

NoisyResult noisy_inference(const QuantModel& model, const Dataset& data, const AcceleratorConfig& cfg,
                            const Platform& platform, const FpvStatistics& stats, std::uint64_t seed,
                            double tuning_fraction) {
    FpvStatistics s = stats;
    s.seed = seed;
    return noisy_inference(model, data, cfg, platform, sample_chip_fpv(cfg, platform, s, cfg.n_a), tuning_fraction);
}

std::vector<FractionRow> fpv_fraction_sweep(const QuantModel& model, const Dataset& data,
                                            const AcceleratorConfig& cfg, const Platform& platform,
                                            const FpvStatistics& stats, std::span<const double> fractions,
                                            std::size_t maps, std::uint64_t base_seed) {
    if (maps == 0) throw DomainError("at least one FPV map is required");
    std::vector<std::vector<double>> acc(fractions.size());
    for (std::size_t k = 0; k < maps; ++k) {
        FpvStatistics s = stats;
        s.seed = derive_seed(base_seed, k);
        const ChipFpvMap map = sample_chip_fpv(cfg, platform, s, cfg.n_a);
        for (std::size_t f = 0; f < fractions.size(); ++f)
            acc[f].push_back(noisy_inference(model, data, cfg, platform, map, fractions[f]).accuracy);
    }
    std::vector<FractionRow> rows;
    for (std::size_t f = 0; f < fractions.size(); ++f) {
        FractionRow row;
        row.fraction = fractions[f];
        double sum = 0.0;
        for (double a : acc[f]) sum += a;
        row.mean_accuracy = sum / static_cast<double>(maps);
        double ss = 0.0;
        for (double a : acc[f]) ss += (a - row.mean_accuracy) * (a - row.mean_accuracy);
        row.std_accuracy = maps > 1 ? std::sqrt(ss / static_cast<double>(maps - 1)) : 0.0;
        const auto [lo, hi] = std::minmax_element(acc[f].begin(), acc[f].end());
        if (*lo == *hi) {
            row.mean_accuracy = *lo;
            row.std_accuracy = 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace mrbnn
