// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/commands.hpp"

#include "mrbnn/csv.hpp"
#include "mrbnn/errors.hpp"
#include "mrbnn/model_io.hpp"

#include "json.hpp"

#include <cmath>

namespace mrbnn::cmd {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

ojson nullable(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

BlobSpec dataset_for(const ToolkitConfig& cfg, const std::string& metadata_json) {
    BlobSpec spec = cfg.experiment.dataset;
    const json meta = json::parse(metadata_json, nullptr, false);
    if (meta.is_object() && meta.contains("dataset") && meta["dataset"].is_object()) {
        const auto& d = meta["dataset"];
        try {
            spec.classes = d.at("classes").get<std::size_t>();
            spec.features = d.at("features").get<std::size_t>();
            spec.samples_per_class = d.at("samples_per_class").get<std::size_t>();
            spec.spread = d.at("spread").get<double>();
            spec.seed = d.at("seed").get<std::uint64_t>();
        } catch (const json::exception& e) {
            throw DataError(std::string("model metadata dataset is malformed: ") + e.what());
        }
    }
    return spec;
}

std::uint64_t parse_count(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 18)
        throw ConfigError(std::string(what) + " must be a positive integer, got '" + s + "'");
    return std::stoull(s);
}

} // namespace

AcceleratorConfig parse_arch(const std::string& arch, const AcceleratorConfig& base) {
    const auto f = split_csv_line(arch);
    if (f.size() != 3) throw ConfigError("--arch expects n_a,n_vdp,n_wg");
    AcceleratorConfig cfg = base;
    cfg.n_a = cfg.n_w = parse_count(f[0], "n_a");
    cfg.n_vdp = parse_count(f[1], "n_vdp");
    cfg.n_wg = parse_count(f[2], "n_wg");
    cfg.validate();
    return cfg;
}

std::vector<double> parse_fractions(const std::string& list) {
    std::vector<double> out;
    if (list.empty()) {
        for (int k = 0; k <= 10; ++k) out.push_back(k / 10.0);
        return out;
    }
    for (const auto& f : split_csv_line(list)) {
        double v;
        try {
            v = parse_double(f);
        } catch (const DataError&) {
            throw ConfigError("--fractions entry '" + f + "' is not a number");
        }
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("--fractions entries must lie in [0, 1]");
        out.push_back(v);
    }
    return out;
}

Output device_report(const ToolkitConfig& cfg, const std::string& ring_class) {
    RingClass rc;
    try {
        rc = ring_class_from_string(ring_class);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const MrDesign& d = rc == RingClass::MultiBit    ? cfg.platform.activation_mr
                        : rc == RingClass::SingleBit ? cfg.platform.weight_mr
                                                     : cfg.platform.broadband_mr;
    const Linewidth lw = fwhm_and_q(d);
    const double centre = d.resonant_wavelength_nm;
    const double half_span = rc == RingClass::Broadband ? bandwidth_thz_to_nm(d.passband_thz, centre) : 1.0;
    constexpr int kPoints = 400;

    Output out;
    out.primary = "wavelength_nm,transmission\n";
    for (int k = 0; k <= kPoints; ++k) {
        const double lambda = centre - half_span + 2.0 * half_span * k / kPoints;
        out.primary += format_sig9(lambda) + ',' + format_sig9(transmission(d, lambda, centre)) + '\n';
    }

    const std::size_t n = cfg.experiment.report_channels;
    std::vector<double> comb;
    for (std::size_t k = 0; k < n; ++k)
        comb.push_back(centre + (static_cast<double>(k) - 0.5 * static_cast<double>(n - 1)) *
                                    cfg.accelerator.channel_spacing_nm);
    const Resolution res = channel_resolution(comb, lw.q_factor);
    double worst = 0.0;
    for (double p : res.noise_power) worst = std::max(worst, p);

    ojson s;
    s["class"] = std::string(to_string(rc));
    s["radius_um"] = d.radius_um;
    s["q_factor"] = lw.q_factor;
    s["fwhm_nm"] = lw.fwhm_nm;
    s["fsr_nm"] = free_spectral_range_nm(d);
    s["extinction_min_transmission"] = transmission(d, centre, centre);
    s["channels"] = n;
    s["channel_spacing_nm"] = cfg.accelerator.channel_spacing_nm;
    s["max_noise_power"] = worst;
    s["levels"] = nullable(res.levels);
    s["bits"] = res.bits;
    out.summary = s.dump(2) + "\n";
    return out;
}

Output fpv_sweep(const ToolkitConfig& cfg, const std::string& model_path, std::span<const double> fractions,
                 std::size_t maps) {
    if (maps == 0) throw ConfigError("--seeds must be at least 1");
    if (fractions.empty()) throw ConfigError("--fractions must not be empty");
    const ModelFile file = load_model(model_path);
    const Dataset data = make_blobs(dataset_for(cfg, file.metadata_json));
    (void)wavelength_assignment(cfg.accelerator, cfg.platform.activation_mr.resonant_wavelength_nm,
                                cfg.platform.usable_band_nm());
    const auto rows = fpv_fraction_sweep(file.model, data, cfg.accelerator, cfg.platform, cfg.fpv, fractions, maps,
                                         cfg.experiment.fpv_seed);
    Output out;
    out.primary = "fraction,mean_accuracy,std_accuracy\n";
    for (const auto& r : rows)
        out.primary += format_sig9(r.fraction) + ',' + format_sig9(r.mean_accuracy) + ',' + format_sig9(r.std_accuracy) + '\n';
    ojson s;
    s["rows"] = rows.size();
    s["maps"] = maps;
    s["samples"] = data.size();
    s["reference_accuracy"] = accuracy(file.model, data);
    out.summary = s.dump(2) + "\n";
    return out;
}

Output simulate(const ToolkitConfig& cfg, const std::string& model_path, std::optional<std::uint64_t> parameters,
                const std::string& arch) {
    if (model_path.empty() == !parameters.has_value())
        throw ConfigError("simulate needs exactly one of --model or --parameters");
    const AcceleratorConfig acc = arch.empty() ? cfg.accelerator : parse_arch(arch, cfg.accelerator);
    Workload wl;
    std::optional<ModelFile> file;
    if (!model_path.empty()) {
        file = load_model(model_path);
        wl.name = model_path;
        wl.parameters = file->model.parameter_count();
        wl.activation_bits = file->model.activation_bits;
    } else {
        wl.name = "parameters";
        wl.parameters = *parameters;
    }
    FpvStatistics stats = cfg.fpv;
    stats.seed = cfg.experiment.fpv_seed;
    const ChipFpvMap map = sample_chip_fpv(acc, cfg.platform, stats, acc.mrs_per_arm());
    SimReport report = power_and_epb(wl, acc, cfg.platform, map, cfg.experiment.tuning_fraction);
    if (file) {
        const Dataset data = make_blobs(dataset_for(cfg, file->metadata_json));
        report.noisy_accuracy = noisy_inference(file->model, data, acc, cfg.platform, cfg.fpv, cfg.experiment.fpv_seed,
                                                cfg.experiment.tuning_fraction)
                                    .accuracy;
    }
    Output out;
    out.primary = report.to_json();
    const double sum = report.power_mw.total();
    const bool sums = std::abs(sum - report.total_power_mw) <= 1e-6 * std::max(1.0, std::abs(report.total_power_mw));
    ojson s;
    s["n_a"] = acc.n_a;
    s["n_vdp"] = acc.n_vdp;
    s["n_wg"] = acc.n_wg;
    s["parameters"] = wl.parameters;
    s["X"] = report.timing.X;
    s["x"] = report.timing.x;
    s["breakdown_sums_to_total"] = sums;
    out.summary = s.dump(2) + "\n";
    return out;
}

Output dse(const ToolkitConfig& cfg) {
    const ParetoResult r = run_sweep(cfg.sweep, cfg.accelerator, cfg.platform, cfg.fpv, cfg.experiment.dse_seed);
    Output out;
    out.primary = scatter_csv(r);
    ojson s = ojson::parse(picks_summary_json(r));
    auto find = [&](std::size_t a, std::size_t v, std::size_t w) -> const DsePoint* {
        for (const auto& p : r.points)
            if (p.n_a == a && p.n_vdp == v && p.n_wg == w) return &p;
        return nullptr;
    };
    const DsePoint* eo = find(10, 50, 10);
    const DsePoint* po = find(50, 200, 10);
    if (eo && po) {
        s["reference_triples"] = {{"energy_triple", {10, 50, 10}},
                                  {"performance_triple", {50, 200, 10}},
                                  {"fps_performance_gt_energy", po->fps > eo->fps},
                                  {"fps_per_watt_energy_gt_performance", eo->fps_per_watt() > po->fps_per_watt()}};
    }
    out.summary = s.dump(2) + "\n";
    return out;
}

Output train_toy(const ToolkitConfig& cfg, std::uint64_t dataset_seed) {
    BlobSpec spec = cfg.experiment.dataset;
    spec.seed = dataset_seed;
    const Dataset data = make_blobs(spec);
    const auto& t = cfg.experiment.train;
    const QuantModel init = make_mlp(spec.features, t.hidden, spec.classes, t.activation_bits, t.init_seed, t.init_scale);
    const TrainResult trained = ste_train(init, data, t.options);
    ModelFile file;
    file.model = round_to_float32(trained.model);
    const double acc = accuracy(file.model, data);

    ojson meta;
    meta["training_accuracy"] = acc;
    meta["final_loss"] = trained.epoch_loss.empty() ? ojson(nullptr) : ojson(trained.epoch_loss.back());
    meta["dataset"] = {{"generator", "gaussian_blobs"},
                       {"classes", spec.classes},
                       {"features", spec.features},
                       {"samples_per_class", spec.samples_per_class},
                       {"spread", spec.spread},
                       {"seed", spec.seed}};
    meta["train"] = {{"epochs", t.options.epochs},
                     {"learning_rate", t.options.learning_rate},
                     {"batch_size", t.options.batch_size},
                     {"seed", t.options.seed},
                     {"init_seed", t.init_seed},
                     {"init_scale", t.init_scale},
                     {"hidden", t.hidden}};
    file.metadata_json = meta.dump();

    Output out;
    out.primary = serialize_model(file);
    ojson s;
    s["training_accuracy"] = acc;
    s["parameters"] = file.model.parameter_count();
    s["bytes"] = out.primary.size();
    out.summary = s.dump(2) + "\n";
    return out;
}

} // namespace mrbnn::cmd
