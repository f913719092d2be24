// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/config.hpp"

#include "mrbnn/errors.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mrbnn {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("'" + path_ + "' must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    const json* child(const char* key) {
        auto it = j_.find(key);
        if (it == j_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    void read(const char* key, double& out) {
        if (const json* v = child(key)) {
            if (!v->is_number()) throw ConfigError("'" + where(key) + "' must be a number");
            out = v->get<double>();
            if (!std::isfinite(out)) throw ConfigError("'" + where(key) + "' must be finite");
        }
    }

    void read(const char* key, std::uint64_t& out) {
        if (const json* v = child(key)) out = as_unsigned(*v, where(key));
    }

    void read(const char* key, int& out) {
        if (const json* v = child(key)) {
            if (!v->is_number_integer()) throw ConfigError("'" + where(key) + "' must be an integer");
            const auto x = v->get<std::int64_t>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                throw ConfigError("'" + where(key) + "' is out of range");
            out = static_cast<int>(x);
        }
    }

    void read(const char* key, std::string& out) {
        if (const json* v = child(key)) {
            if (!v->is_string()) throw ConfigError("'" + where(key) + "' must be a string");
            out = v->get<std::string>();
        }
    }

    void read(const char* key, std::vector<std::size_t>& out) {
        if (const json* v = child(key)) {
            if (!v->is_array()) throw ConfigError("'" + where(key) + "' must be an array");
            out.clear();
            for (const auto& e : *v) out.push_back(static_cast<std::size_t>(as_unsigned(e, where(key))));
        }
    }

    void read(const char* key, std::array<double, 3>& out) {
        if (const json* v = child(key)) {
            if (!v->is_array() || v->size() != 3) throw ConfigError("'" + where(key) + "' must be a 3-element array");
            for (std::size_t i = 0; i < 3; ++i) {
                if (!(*v)[i].is_number()) throw ConfigError("'" + where(key) + "' must hold numbers");
                out[i] = (*v)[i].get<double>();
            }
        }
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ConfigError("unknown key '" + where(item.key().c_str()) + "'");
    }

private:
    static std::uint64_t as_unsigned(const json& v, const std::string& where) {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        throw ConfigError("'" + where + "' must be a non-negative integer");
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_slopes(Section& parent, const char* key, SensitivitySlopes& s) {
    if (const json* v = parent.child(key)) {
        Section sec(*v, parent.where(key));
        sec.read("width", s.width);
        sec.read("thickness", s.thickness);
        sec.read("radius", s.radius);
        sec.finish();
    }
}

void read_design(Section& parent, const char* key, MrDesign& d) {
    const json* v = parent.child(key);
    if (!v) return;
    Section s(*v, parent.where(key));
    s.read("radius_um", d.radius_um);
    s.read("waveguide_width_nm", d.waveguide_width_nm);
    s.read("ring_width_nm", d.ring_width_nm);
    s.read("thickness_nm", d.thickness_nm);
    s.read("resonant_wavelength_nm", d.resonant_wavelength_nm);
    s.read("q_factor", d.q_factor);
    const bool has_kappa = s.has("cross_coupling_kappa");
    s.read("self_coupling_r", d.self_coupling_r);
    s.read("cross_coupling_kappa", d.cross_coupling_kappa);
    if (!has_kappa && d.self_coupling_r > 0.0 && d.self_coupling_r < 1.0)
        d.cross_coupling_kappa = std::sqrt(1.0 - d.self_coupling_r * d.self_coupling_r);
    s.read("amplitude_a", d.amplitude_a);
    s.read("group_index_ng", d.group_index_ng);
    s.read("effective_index_neff", d.effective_index_neff);
    s.read("attenuation_alpha_per_cm", d.attenuation_alpha_per_cm);
    read_slopes(s, "sensitivity_slopes_nm_per_nm", d.sensitivity_slopes);
    read_slopes(s, "slope_curvature_nm_per_nm2", d.slope_curvature);
    s.read("passband_thz", d.passband_thz);
    s.read("usable_bandwidth_thz", d.usable_bandwidth_thz);
    s.read("insertion_loss_db", d.insertion_loss_db);
    s.finish();
}

void read_device(Section& parent, const char* key, DeviceSpec& d) {
    if (const json* v = parent.child(key)) {
        Section s(*v, parent.where(key));
        s.read("power_mw", d.power_mw);
        s.read("latency_ns", d.latency_ns);
        s.finish();
    }
}

ojson slopes_json(const SensitivitySlopes& s) {
    return ojson{{"width", s.width}, {"thickness", s.thickness}, {"radius", s.radius}};
}

ojson design_json(const MrDesign& d) {
    ojson j;
    j["radius_um"] = d.radius_um;
    j["waveguide_width_nm"] = d.waveguide_width_nm;
    j["ring_width_nm"] = d.ring_width_nm;
    j["thickness_nm"] = d.thickness_nm;
    j["resonant_wavelength_nm"] = d.resonant_wavelength_nm;
    j["q_factor"] = d.q_factor;
    j["self_coupling_r"] = d.self_coupling_r;
    j["cross_coupling_kappa"] = d.cross_coupling_kappa;
    j["amplitude_a"] = d.amplitude_a;
    j["group_index_ng"] = d.group_index_ng;
    j["effective_index_neff"] = d.effective_index_neff;
    j["attenuation_alpha_per_cm"] = d.attenuation_alpha_per_cm;
    j["sensitivity_slopes_nm_per_nm"] = slopes_json(d.sensitivity_slopes);
    j["slope_curvature_nm_per_nm2"] = slopes_json(d.slope_curvature);
    j["passband_thz"] = d.passband_thz;
    j["usable_bandwidth_thz"] = d.usable_bandwidth_thz;
    j["insertion_loss_db"] = d.insertion_loss_db;
    return j;
}

ojson device_json(const DeviceSpec& d) { return ojson{{"power_mw", d.power_mw}, {"latency_ns", d.latency_ns}}; }

template <class F>
void wrap_domain(F&& f, const char* what) {
    try {
        f();
    } catch (const DomainError& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

} // namespace

void ToolkitConfig::validate() const {
    platform.validate();
    wrap_domain([&] { fpv.validate(); }, "fpv");
    accelerator.validate();
    sweep.validate();
    const auto& e = experiment;
    if (!(e.tuning_fraction >= 0.0 && e.tuning_fraction <= 1.0))
        throw ConfigError("experiment.tuning_fraction must lie in [0, 1]");
    if (e.fpv_maps == 0) throw ConfigError("experiment.fpv_maps must be at least 1");
    if (e.report_channels == 0) throw ConfigError("experiment.report_channels must be at least 1");
    if (e.dataset.classes < 2 || e.dataset.features < 1 || e.dataset.samples_per_class < 1)
        throw ConfigError("experiment.dataset needs >= 2 classes, >= 1 feature, >= 1 sample per class");
    if (!(e.dataset.spread >= 0.0)) throw ConfigError("experiment.dataset.spread must be non-negative");
    if (e.train.hidden == 0) throw ConfigError("experiment.train.hidden must be at least 1");
    if (e.train.activation_bits < 1) throw ConfigError("experiment.train.activation_bits must be at least 1");
    if (e.train.options.batch_size == 0) throw ConfigError("experiment.train.batch_size must be at least 1");
    if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ToolkitConfig default_config() {
    ToolkitConfig c;
    c.validate();
    return c;
}

ToolkitConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ToolkitConfig c;
    Section top(root, "");

    if (const json* v = top.child("devices")) {
        Section s(*v, "devices");
        read_design(s, "multibit", c.platform.activation_mr);
        read_design(s, "singlebit", c.platform.weight_mr);
        read_design(s, "broadband", c.platform.broadband_mr);
        s.finish();
    }
    if (const json* v = top.child("tuning")) {
        Section s(*v, "tuning");
        auto& t = c.platform.tuning;
        s.read("eo_power_uw_per_nm", t.eo_power_uw_per_nm);
        s.read("eo_max_shift_nm", t.eo_max_shift_nm);
        s.read("eo_latency_ns", t.eo_latency_ns);
        s.read("to_power_mw_per_fsr", t.to_power_mw_per_fsr);
        s.read("to_latency_us", t.to_latency_us);
        s.read("fsr_nm", t.fsr_nm);
        s.read("crosstalk_eta", t.crosstalk_eta);
        s.read("crosstalk_decay_um", t.crosstalk_decay_um);
        s.read("heater_efficiency_nm_per_mw", t.heater_efficiency_nm_per_mw);
        s.finish();
    }
    if (const json* v = top.child("loss")) {
        Section s(*v, "loss");
        auto& l = c.platform.loss;
        s.read("propagation_db_per_cm", l.propagation_db_per_cm);
        s.read("splitter_db", l.splitter_db);
        s.read("combiner_db", l.combiner_db);
        s.read("mr_through_db", l.mr_through_db);
        s.read("mr_modulation_db", l.mr_modulation_db);
        s.read("eo_tuning_db_per_cm", l.eo_tuning_db_per_cm);
        s.read("to_tuning_db_per_cm", l.to_tuning_db_per_cm);
        s.read("detector_sensitivity_dbm", l.detector_sensitivity_dbm);
        s.finish();
    }
    if (const json* v = top.child("electronics")) {
        Section s(*v, "electronics");
        auto& d = c.platform.devices;
        read_device(s, "vcsel", d.vcsel);
        read_device(s, "tia", d.tia);
        read_device(s, "photodetector", d.photodetector);
        read_device(s, "dac", d.dac);
        read_device(s, "adc", d.adc);
        s.finish();
    }
    if (const json* v = top.child("ecu")) {
        Section s(*v, "ecu");
        auto& e = c.platform.ecu;
        s.read("clock_ghz", e.clock_ghz);
        s.read("local_buffer_ns", e.local_buffer_ns);
        s.read("vector_distribution_ns", e.vector_distribution_ns);
        s.read("parameter_buffering_ns", e.parameter_buffering_ns);
        s.read("t_del_ns", e.t_del_ns);
        s.read("ecu_buffered_params", e.ecu_buffered_params);
        s.finish();
    }
    if (const json* v = top.child("area")) {
        Section s(*v, "area");
        auto& a = c.platform.area;
        s.read("per_vdp_overhead_mm2", a.per_vdp_overhead_mm2);
        s.read("dac_mm2", a.dac_mm2);
        s.read("adc_mm2", a.adc_mm2);
        s.read("global_overhead_mm2", a.global_overhead_mm2);
        s.finish();
    }
    if (const json* v = top.child("fpv")) {
        Section s(*v, "fpv");
        s.read("mean_nm", c.fpv.mean_nm);
        s.read("sigma_nm", c.fpv.sigma_nm);
        s.read("seed", c.fpv.seed);
        s.finish();
    }
    if (const json* v = top.child("accelerator")) {
        Section s(*v, "accelerator");
        auto& a = c.accelerator;
        const bool has_nw = s.has("n_w");
        s.read("n_a", a.n_a);
        s.read("n_w", a.n_w);
        if (!has_nw) a.n_w = a.n_a;
        s.read("n_b", a.n_b);
        s.read("n_wg", a.n_wg);
        s.read("n_vdp", a.n_vdp);
        s.read("mrs_per_bank_max", a.mrs_per_bank_max);
        s.read("channel_spacing_nm", a.channel_spacing_nm);
        s.read("mr_pitch_um", a.mr_pitch_um);
        s.finish();
    }
    if (const json* v = top.child("sweep")) {
        Section s(*v, "sweep");
        auto& w = c.sweep;
        s.read("n_a", w.n_a);
        s.read("n_vdp", w.n_vdp);
        s.read("n_wg", w.n_wg);
        s.read("n_b", w.n_b);
        s.read("tuning_fraction", w.tuning_fraction);
        s.read("threads", w.threads);
        if (const json* wl = s.child("workloads")) {
            if (!wl->is_array()) throw ConfigError("'sweep.workloads' must be an array");
            w.workloads.clear();
            for (std::size_t i = 0; i < wl->size(); ++i) {
                Section ws((*wl)[i], "sweep.workloads[" + std::to_string(i) + "]");
                Workload item;
                ws.read("name", item.name);
                ws.read("parameters", item.parameters);
                ws.read("activation_bits", item.activation_bits);
                ws.finish();
                w.workloads.push_back(item);
            }
        }
        s.finish();
    }
    if (const json* v = top.child("experiment")) {
        Section s(*v, "experiment");
        auto& e = c.experiment;
        s.read("tuning_fraction", e.tuning_fraction);
        s.read("fpv_maps", e.fpv_maps);
        s.read("fpv_seed", e.fpv_seed);
        s.read("dse_seed", e.dse_seed);
        s.read("report_channels", e.report_channels);
        if (const json* d = s.child("dataset")) {
            Section ds(*d, "experiment.dataset");
            ds.read("classes", e.dataset.classes);
            ds.read("features", e.dataset.features);
            ds.read("samples_per_class", e.dataset.samples_per_class);
            ds.read("spread", e.dataset.spread);
            ds.read("seed", e.dataset.seed);
            ds.finish();
        }
        if (const json* t = s.child("train")) {
            Section ts(*t, "experiment.train");
            ts.read("hidden", e.train.hidden);
            ts.read("activation_bits", e.train.activation_bits);
            ts.read("init_scale", e.train.init_scale);
            ts.read("init_seed", e.train.init_seed);
            ts.read("epochs", e.train.options.epochs);
            ts.read("learning_rate", e.train.options.learning_rate);
            ts.read("batch_size", e.train.options.batch_size);
            ts.read("seed", e.train.options.seed);
            ts.finish();
        }
        s.finish();
    }
    top.read("output_dir", c.output_dir);
    top.finish();
    c.validate();
    return c;
}

ToolkitConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

ToolkitConfig resolve_config(const std::string& explicit_path) {
    if (!explicit_path.empty()) return load_config_file(explicit_path);
    if (const char* env = std::getenv("MRBNN_CONFIG"); env && *env) return load_config_file(env);
    return default_config();
}

std::string serialize_config(const ToolkitConfig& c) {
    ojson j;
    j["devices"] = {{"multibit", design_json(c.platform.activation_mr)},
                    {"singlebit", design_json(c.platform.weight_mr)},
                    {"broadband", design_json(c.platform.broadband_mr)}};
    const auto& t = c.platform.tuning;
    j["tuning"] = {{"eo_power_uw_per_nm", t.eo_power_uw_per_nm},
                   {"eo_max_shift_nm", t.eo_max_shift_nm},
                   {"eo_latency_ns", t.eo_latency_ns},
                   {"to_power_mw_per_fsr", t.to_power_mw_per_fsr},
                   {"to_latency_us", t.to_latency_us},
                   {"fsr_nm", t.fsr_nm},
                   {"crosstalk_eta", t.crosstalk_eta},
                   {"crosstalk_decay_um", t.crosstalk_decay_um},
                   {"heater_efficiency_nm_per_mw", t.heater_efficiency_nm_per_mw}};
    const auto& l = c.platform.loss;
    j["loss"] = {{"propagation_db_per_cm", l.propagation_db_per_cm},
                 {"splitter_db", l.splitter_db},
                 {"combiner_db", l.combiner_db},
                 {"mr_through_db", l.mr_through_db},
                 {"mr_modulation_db", l.mr_modulation_db},
                 {"eo_tuning_db_per_cm", l.eo_tuning_db_per_cm},
                 {"to_tuning_db_per_cm", l.to_tuning_db_per_cm},
                 {"detector_sensitivity_dbm", l.detector_sensitivity_dbm}};
    const auto& d = c.platform.devices;
    j["electronics"] = {{"vcsel", device_json(d.vcsel)},
                        {"tia", device_json(d.tia)},
                        {"photodetector", device_json(d.photodetector)},
                        {"dac", device_json(d.dac)},
                        {"adc", device_json(d.adc)}};
    const auto& e = c.platform.ecu;
    j["ecu"] = {{"clock_ghz", e.clock_ghz},
                {"local_buffer_ns", e.local_buffer_ns},
                {"vector_distribution_ns", e.vector_distribution_ns},
                {"parameter_buffering_ns", e.parameter_buffering_ns},
                {"t_del_ns", e.t_del_ns},
                {"ecu_buffered_params", e.ecu_buffered_params}};
    const auto& a = c.platform.area;
    j["area"] = {{"per_vdp_overhead_mm2", a.per_vdp_overhead_mm2},
                 {"dac_mm2", a.dac_mm2},
                 {"adc_mm2", a.adc_mm2},
                 {"global_overhead_mm2", a.global_overhead_mm2}};
    j["fpv"] = {{"mean_nm", c.fpv.mean_nm}, {"sigma_nm", c.fpv.sigma_nm}, {"seed", c.fpv.seed}};
    const auto& acc = c.accelerator;
    j["accelerator"] = {{"n_a", acc.n_a},
                        {"n_w", acc.n_w},
                        {"n_b", acc.n_b},
                        {"n_wg", acc.n_wg},
                        {"n_vdp", acc.n_vdp},
                        {"mrs_per_bank_max", acc.mrs_per_bank_max},
                        {"channel_spacing_nm", acc.channel_spacing_nm},
                        {"mr_pitch_um", acc.mr_pitch_um}};
    ojson workloads = ojson::array();
    for (const auto& w : c.sweep.workloads)
        workloads.push_back({{"name", w.name}, {"parameters", w.parameters}, {"activation_bits", w.activation_bits}});
    j["sweep"] = {{"n_a", c.sweep.n_a},
                  {"n_vdp", c.sweep.n_vdp},
                  {"n_wg", c.sweep.n_wg},
                  {"n_b", c.sweep.n_b},
                  {"tuning_fraction", c.sweep.tuning_fraction},
                  {"threads", c.sweep.threads},
                  {"workloads", workloads}};
    const auto& x = c.experiment;
    j["experiment"] = {{"tuning_fraction", x.tuning_fraction},
                       {"fpv_maps", x.fpv_maps},
                       {"fpv_seed", x.fpv_seed},
                       {"dse_seed", x.dse_seed},
                       {"report_channels", x.report_channels},
                       {"dataset",
                        {{"classes", x.dataset.classes},
                         {"features", x.dataset.features},
                         {"samples_per_class", x.dataset.samples_per_class},
                         {"spread", x.dataset.spread},
                         {"seed", x.dataset.seed}}},
                       {"train",
                        {{"hidden", x.train.hidden},
                         {"activation_bits", x.train.activation_bits},
                         {"init_scale", x.train.init_scale},
                         {"init_seed", x.train.init_seed},
                         {"epochs", x.train.options.epochs},
                         {"learning_rate", x.train.options.learning_rate},
                         {"batch_size", x.train.options.batch_size},
                         {"seed", x.train.options.seed}}}};
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

} // namespace mrbnn
