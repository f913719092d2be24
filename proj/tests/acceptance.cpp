// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "mrbnn/commands.hpp"
#include "mrbnn/config.hpp"
#include "mrbnn/csv.hpp"
#include "mrbnn/dse.hpp"
#include "mrbnn/mapping.hpp"
#include "mrbnn/model_io.hpp"
#include "mrbnn/random.hpp"
#include "mrbnn/simulator.hpp"
#include "mrbnn/tuning.hpp"

#include "json.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

using namespace mrbnn;
using namespace mrbnn::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && s <= budget_s;
    if (!pass) ++failures;
    std::printf("criterion %2d: %s  %s [%.2f s, budget %.0f s]\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), s,
                budget_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "mrbnn_acceptance";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& bytes) {
    std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct SweepAt {
    double a0 = 0.0, a08 = 0.0, a1 = 0.0;
};

SweepAt sweep_three(const ToolkitConfig& cfg, const std::string& model_path) {
    const std::vector<double> fr{0.0, 0.8, 1.0};
    const auto lines = split_lines(cmd::fpv_sweep(cfg, model_path, fr, cfg.experiment.fpv_maps).primary);
    SweepAt s;
    s.a0 = parse_double(split_csv_line(lines[1])[1]);
    s.a08 = parse_double(split_csv_line(lines[2])[1]);
    s.a1 = parse_double(split_csv_line(lines[3])[1]);
    return s;
}

bool saturates(const SweepAt& s) { return std::abs(s.a08 - s.a1) <= 0.02 && s.a0 < s.a1; }

} // namespace

int main() {
    std::printf("mrbnn acceptance run\n");

    criterion(1, 1.0, [] {
        const MrDesign d = default_design(RingClass::MultiBit);
        const double q = fwhm_and_q(d).q_factor;
        std::vector<double> ch(15);
        for (std::size_t i = 0; i < ch.size(); ++i) ch[i] = d.resonant_wavelength_nm + (double(i) - 7.0);
        const Resolution r = channel_resolution(ch, q);
        const bool q_ok = std::abs(q - 5000.0) <= 500.0;
        return Outcome{q_ok && r.levels >= 16.0 && r.bits >= 4,
                       fmt("Q=%.1f levels=%.3f bits=%.0f", q, r.levels, r.bits)};
    });

    criterion(2, 1.0, [] {
        double lo = 1.0, hi = 0.0, worst_unit = 0.0, worst_critical = 0.0;
        for (int i = 0; i < 22; ++i)
            for (int j = 0; j < 22; ++j)
                for (int k = 0; k < 21; ++k) {
                    const double r = 0.01 + 0.98 * i / 21.0, a = 0.01 + 0.99 * j / 21.0;
                    const double phi = 2.0 * std::numbers::pi * k / 20.0;
                    const double t = allpass_transmission(r, a, phi);
                    lo = std::min(lo, t);
                    hi = std::max(hi, t);
                    worst_unit = std::max(worst_unit, std::abs(allpass_transmission(r, 1.0, phi) - 1.0));
                    if (k == 0) worst_critical = std::max(worst_critical, allpass_transmission(r, r, 0.0));
                }
        const bool ok = lo >= 0.0 && hi <= 1.0 && worst_unit <= 1e-9 && worst_critical <= 1e-9;
        return Outcome{ok, fmt("T in [%.3g, %.12g]; |T-1| at a=1 <= %.1e", lo, hi, worst_unit) +
                               fmt("; T at critical coupling <= %.1e", worst_critical)};
    });

    criterion(3, 5.0, [] {
        int violations = 0;
        for (std::uint64_t trial = 0; trial < 1000; ++trial) {
            const std::uint64_t s = derive_seed(2718, trial);
            const std::size_t n = 2 + static_cast<std::size_t>(uniform01(s, 0) * 14.0);
            ThermalCrosstalkMatrix k;
            k.k = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            std::uint64_t idx = 1;
            for (std::size_t i = 0; i < n; ++i) {
                const double budget = 0.99 * uniform01(s, idx++);
                std::vector<double> raw(n);
                double sum = 0.0;
                for (std::size_t j = 0; j < n; ++j) sum += raw[j] = j == i ? 0.0 : uniform01(s, idx++);
                for (std::size_t j = 0; j < n; ++j)
                    if (j != i) k.k(Eigen::Index(i), Eigen::Index(j)) = budget * raw[j] / sum;
            }
            std::vector<double> t(n);
            for (auto& v : t) v = 9.0 * uniform01(s, idx++);
            const TedResult r = ted_tuning_power(t, k, 0.66);
            if (r.p_ted_mw > r.p_naive_mw * (1.0 + 1e-9)) ++violations;
        }
        const TuningParams p;
        const std::vector<double> ones(10, 1.0);
        const double r5 = ted_tuning_power(ones, uniform_spacing(10, 5.0), p).reduction_fraction;
        const double r7 = ted_tuning_power(ones, uniform_spacing(10, 7.0), p).reduction_fraction;
        const bool ok = violations == 0 && std::abs(r5 - 0.51) <= 0.10 && std::abs(r7 - 0.41) <= 0.10;
        return Outcome{ok, fmt("violations=%.0f/1000 reduction@5um=%.4f @7um=%.4f", violations, r5, r7)};
    });

    criterion(4, 2.0, [] {
        const std::vector<MrDesign> designs{default_design(RingClass::MultiBit)};
        FpvStatistics s;
        s.seed = 2026;
        const FpvMap m = sample_fpv_map(designs, s, 10000);
        const bool ok = std::abs(m.std_shift_nm - 24.417) <= 0.05 * 24.417 && std::abs(m.mean_shift_nm + 0.1461) <= 0.5;
        return Outcome{ok, fmt("sigma=%.4f nm mean=%.4f nm", m.std_shift_nm, m.mean_shift_nm)};
    });

    criterion(5, 60.0, [] {
        const ToolkitConfig cfg = default_config();
        const fs::path model = scratch_dir() / "toy.model";
        write_file(model, cmd::train_toy(cfg, cfg.experiment.dataset.seed).primary);
        const SweepAt s = sweep_three(cfg, model.string());
        return Outcome{saturates(s), fmt("acc(0.0)=%.6f acc(0.8)=%.6f acc(1.0)=%.6f", s.a0, s.a08, s.a1) +
                                         fmt(" over %.0f maps", double(cfg.experiment.fpv_maps))};
    });

    criterion(6, 10.0, [] {
        int mismatches = 0;
        for (std::uint64_t t = 0; t < 100; ++t) {
            const std::uint64_t s = derive_seed(66, t);
            const std::size_t g = 1 + static_cast<std::size_t>(uniform01(s, 0) * 20.0);
            if (t % 2 == 0) {
                const std::size_t oc = 1 + std::size_t(uniform01(s, 1) * 4), ic = 1 + std::size_t(uniform01(s, 2) * 3);
                const std::size_t kk = 1 + std::size_t(uniform01(s, 3) * 3), hw = kk + std::size_t(uniform01(s, 4) * 6);
                const Shape ks{oc, ic, kk, kk}, as{ic, hw, hw};
                const auto k = int_vec(derive_seed(s, 1), shape_size(ks), -1, 1);
                const auto a = int_vec(derive_seed(s, 2), shape_size(as), 0, 15);
                std::vector<std::int64_t> direct;
                const std::size_t o_hw = hw - kk + 1;
                for (std::size_t o = 0; o < oc; ++o)
                    for (std::size_t oy = 0; oy < o_hw; ++oy)
                        for (std::size_t ox = 0; ox < o_hw; ++ox) {
                            std::int64_t y = 0;
                            for (std::size_t c = 0; c < ic; ++c)
                                for (std::size_t dy = 0; dy < kk; ++dy)
                                    for (std::size_t dx = 0; dx < kk; ++dx)
                                        y += k[((o * ic + c) * kk + dy) * kk + dx] * a[(c * hw + oy + dy) * hw + ox + dx];
                            direct.push_back(y);
                        }
                if (decompose_conv<std::int64_t>(k, ks, a, as, g).reconstruct() != direct) ++mismatches;
            } else {
                const std::size_t out = 1 + std::size_t(uniform01(s, 1) * 16), in = 1 + std::size_t(uniform01(s, 2) * 64);
                const auto w = int_vec(derive_seed(s, 1), out * in, -1, 1);
                const auto a = int_vec(derive_seed(s, 2), in, 0, 15);
                std::vector<std::int64_t> direct(out, 0);
                for (std::size_t o = 0; o < out; ++o)
                    for (std::size_t i = 0; i < in; ++i) direct[o] += w[o * in + i] * a[i];
                if (decompose_fc<std::int64_t>(w, out, a, g).reconstruct() != direct) ++mismatches;
            }
        }
        return Outcome{mismatches == 0, fmt("mismatches=%.0f over 100 layers", mismatches)};
    });

    criterion(7, 5.0, [] {
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const QuantModel m = random_model(derive_seed(700, s), s % 2 == 0, true);
            for (std::uint64_t i = 0; i < 3; ++i) {
                const Tensor x = random_input(derive_seed(701 + s, i), m.input_shape);
                const auto a = reference_inference(m, x, BnMode::Folded);
                const auto b = reference_inference(m, x, BnMode::Explicit);
                for (std::size_t k = 0; k < a.logits.size(); ++k) worst = std::max(worst, std::abs(a.logits[k] - b.logits[k]));
            }
        }
        return Outcome{worst <= 1e-9, fmt("max |folded - explicit| = %.3e over 100 models", worst)};
    });

    criterion(8, 1.0, [] {
        QuantModel m;
        m.input_shape = {3};
        m.activation_bits = 8;
        m.layers.push_back(Layer::fully_connected(2, 3, {1.0, -1.0, 1.0, 1.0, 1.0, -1.0}));
        m.layers.push_back(Layer::activation(0.0, 1.0, false));
        m.layers.push_back(Layer::fully_connected(1, 2, {0.7, -0.4}, false));
        const Sample s{{1.0, 0.2, 0.6}, 1};
        const Gradients g = ste_backward(m, s);
        double worst = 0.0;
        for (std::size_t li : {std::size_t{0}, std::size_t{2}})
            for (std::size_t k = 0; k < m.layers[li].weights.size(); ++k) {
                QuantModel up = m, dn = m;
                up.layers[li].weights[k] += 1e-6;
                dn.layers[li].weights[k] -= 1e-6;
                const double fd = (surrogate_loss(up, s) - surrogate_loss(dn, s)) / 2e-6;
                worst = std::max(worst, std::abs(g.per_layer[li][k] - fd) / std::max(1.0, std::abs(fd)));
            }
        return Outcome{worst <= 1e-4, fmt("max relative error %.3e", worst)};
    });

    criterion(9, 1.0, [] {
        const Platform p;
        AcceleratorConfig po;
        po.n_a = po.n_w = 50;
        po.n_vdp = 200;
        po.n_wg = 10;
        const PipelineTiming t = pipeline_time(60642, po, p.ecu, p.devices, p.tuning);
        bool affine = true;
        for (std::uint64_t X = 0; X < 1000; ++X) {
            const double lhs = pipeline_total_ns(t, X, t.x);
            const double rhs = t.t_del_ns + t.delta_t_ns * static_cast<double>(X) + t.buffering_ns * static_cast<double>(t.x);
            if (lhs != rhs) affine = false;
        }
        const double bw = required_bandwidth_gb_s(po, 4, t.delta_t_ns);
        const bool ok = affine && bw >= 93.75 / 2.0 && bw <= 93.75 * 2.0;
        return Outcome{ok, std::string("affine=") + (affine ? "yes" : "no") +
                               fmt(" required bandwidth %.3f GB/s (reference 93.75)", bw)};
    });

    criterion(10, 120.0, [] {
        const ToolkitConfig cfg = default_config();
        const ParetoResult r = run_sweep(cfg.sweep, cfg.accelerator, cfg.platform, cfg.fpv, cfg.experiment.dse_seed);
        const DsePoint* eo = nullptr;
        const DsePoint* po = nullptr;
        for (const auto& p : r.points) {
            if (p.n_a == 10 && p.n_vdp == 50 && p.n_wg == 10) eo = &p;
            if (p.n_a == 50 && p.n_vdp == 200 && p.n_wg == 10) po = &p;
        }
        if (!eo || !po) return Outcome{false, "a reference triple is missing from the sweep"};
        std::vector<Objectives> obj;
        for (const auto& p : r.points) obj.push_back(p.objectives());
        bool same = true;
        for (std::size_t i = 0; i < obj.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < obj.size(); ++j)
                if (i != j && dominates(obj[j], obj[i])) dominated = true;
            if (dominated == r.points[i].pareto) same = false;
        }
        const bool fps = po->fps > eo->fps;
        const bool fpw = eo->fps_per_watt() > po->fps_per_watt();
        return Outcome{fps && fpw && same,
                       fmt("FPS %.4g vs %.4g; FPS/W %.4g", po->fps, eo->fps, eo->fps_per_watt()) +
                           fmt(" vs %.4g; pareto %.0f of %.0f points, oracle agrees: ", po->fps_per_watt(),
                               double(std::count_if(r.points.begin(), r.points.end(),
                                                    [](const DsePoint& p) { return p.pareto; })),
                               double(r.points.size())) +
                           (same ? "yes" : "no")};
    });

    std::printf("criterion 11: EXCLUDED  cross-accelerator ratios, absolute inference times and dataset "
                "accuracies are not reproducible at desk scale\n");

    criterion(12, 120.0, [] {
        ToolkitConfig cfg = default_config();
        cfg.experiment.fpv_maps = 5;
        const fs::path model = scratch_dir() / "determinism.model";
        const std::string m1 = cmd::train_toy(cfg, 1).primary;
        const std::string m2 = cmd::train_toy(cfg, 1).primary;
        write_file(model, m1);
        const std::vector<double> fr = cmd::parse_fractions("");
        int differing = 0, total = 0;
        auto same = [&](const cmd::Output& a, const cmd::Output& b) {
            ++total;
            if (a.primary != b.primary || a.summary != b.summary) ++differing;
        };
        ++total;
        if (m1 != m2) ++differing;
        for (const char* c : {"multibit", "singlebit", "broadband"})
            same(cmd::device_report(cfg, c), cmd::device_report(cfg, c));
        same(cmd::fpv_sweep(cfg, model.string(), fr, 5), cmd::fpv_sweep(cfg, model.string(), fr, 5));
        same(cmd::simulate(cfg, model.string(), std::nullopt, ""), cmd::simulate(cfg, model.string(), std::nullopt, ""));
        same(cmd::simulate(cfg, "", 60642, "50,200,10"), cmd::simulate(cfg, "", 60642, "50,200,10"));
        same(cmd::dse(cfg), cmd::dse(cfg));
        return Outcome{differing == 0, fmt("%.0f of %.0f command outputs differ between runs", differing, total)};
    });

    // Robustness of criterion 5 to the dataset seed; informational only.
    {
        const ToolkitConfig cfg = default_config();
        int held = 0;
        const int seeds = 6;
        for (int k = 1; k <= seeds; ++k) {
            const fs::path model = scratch_dir() / ("robust_" + std::to_string(k) + ".model");
            write_file(model, cmd::train_toy(cfg, static_cast<std::uint64_t>(k)).primary);
            const SweepAt s = sweep_three(cfg, model.string());
            if (saturates(s)) ++held;
            std::printf("  info: dataset seed %d: acc(0.0)=%.6f acc(0.8)=%.6f acc(1.0)=%.6f\n", k, s.a0, s.a08, s.a1);
        }
        std::printf("  info: saturation shape held for %d of %d dataset seeds\n", held, seeds);
    }

    fs::remove_all(scratch_dir());
    std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
