// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "support.hpp"

#include "mrbnn/simulator.hpp"

#include <cmath>
#include <numbers>

using namespace mrbnn;
using namespace mrbnn::testing;

namespace {

AcceleratorConfig arch(std::size_t a, std::size_t v, std::size_t w) {
    AcceleratorConfig c;
    c.n_a = c.n_w = a;
    c.n_vdp = v;
    c.n_wg = w;
    return c;
}

ChipFpvMap quiet_map(const AcceleratorConfig& cfg, const Platform& p) {
    FpvStatistics s;
    s.sigma_nm = {0.0, 0.0, 0.0};
    return sample_chip_fpv(cfg, p, s, cfg.mrs_per_arm());
}

struct Trained {
    QuantModel model;
    Dataset data;
};

// The toy model the command-line trainer produces with default settings.
const Trained& trained() {
    static const Trained t = [] {
        Trained r;
        r.data = make_blobs({});
        r.model = ste_train(make_mlp(3, 16, 3, 4, 3, 0.5), r.data, TrainOptions{}).model;
        return r;
    }();
    return t;
}

} // namespace

TEST_SUITE("simulator") {

TEST_CASE("laser sizing") {
    CHECK(laser_power(1, 0.0, -20.0).mw == doctest::Approx(0.01));
    CHECK(laser_power(10, 3.0, -20.0).mw == doctest::Approx(0.199526231496888).epsilon(1e-12));
    const double base = laser_power(4, 7.0, -20.0).dbm;
    CHECK(laser_power(4, 17.0, -20.0).dbm == doctest::Approx(base + 10.0));
    CHECK(laser_power(4, 7.0 + 10.0 * std::log10(2.0), -20.0).mw ==
          doctest::Approx(2.0 * laser_power(4, 7.0, -20.0).mw));
    CHECK(laser_power(20, 7.0, -20.0).mw == doctest::Approx(5.0 * laser_power(4, 7.0, -20.0).mw));
    CHECK_THROWS_AS(laser_power(0, 1.0, -20.0), DomainError);
}

TEST_CASE("path loss") {
    const LossBudget b;
    CHECK(path_loss_db(OpticalPath{}, b) == 0.0);
    OpticalPath p;
    p.length_cm = 0.2;
    CHECK(path_loss_db(p, b) == doctest::Approx(0.2));
    p.length_cm = 1.0;
    p.splitter_stages = 1;
    p.combiners = 1;
    CHECK(path_loss_db(p, b) == doctest::Approx(2.03));

    const Platform plat;
    const LossReport small = loss_accounting(arch(10, 50, 10), plat);
    const LossReport big = loss_accounting(arch(10, 100, 10), plat);
    CHECK(big.total_db > small.total_db);
    CHECK(small.fanout_db == doctest::Approx(10.0 * std::log10(500.0)));
}

TEST_CASE("pipeline timing") {
    const Platform p;
    const AcceleratorConfig po = arch(50, 200, 10);
    const double t_del = optical_path_latency_ns(p.devices, p.tuning);
    CHECK(t_del == doctest::Approx(54.4858));

    const PipelineTiming zero = pipeline_time(0, po, p.ecu, p.devices, p.tuning);
    CHECK(zero.X == 0);
    CHECK(zero.total_ns == doctest::Approx(t_del));

    CHECK(pipeline_time(100000, po, p.ecu, p.devices, p.tuning).X == 1);
    CHECK(pipeline_time(100001, po, p.ecu, p.devices, p.tuning).X == 2);
    CHECK(pipeline_time(13570186, po, p.ecu, p.devices, p.tuning).X == 136);

    const PipelineTiming t = pipeline_time(60642, po, p.ecu, p.devices, p.tuning);
    for (std::uint64_t X = 0; X < 5; ++X)
        CHECK(pipeline_total_ns(t, X + 1, 1) - pipeline_total_ns(t, X, 1) == doctest::Approx(t.delta_t_ns));

    EcuTiming fixed = p.ecu;
    fixed.t_del_ns = 10.0;
    CHECK(pipeline_time(0, po, fixed, p.devices, p.tuning).total_ns == doctest::Approx(10.0));
}

TEST_CASE("power, energy per bit and bandwidth") {
    const Platform p;
    const AcceleratorConfig po = arch(50, 200, 10);
    SUBCASE("parameter-free workload has no energy per bit") {
        const SimReport r = power_and_epb({"empty", 0, 4}, po, p, quiet_map(po, p), 0.8);
        CHECK_FALSE(r.epb_pj_per_bit.has_value());
        CHECK(r.to_json().find("\"epb_pj_per_bit\": null") != std::string::npos);
    }
    SUBCASE("breakdown adds up and bandwidth is in range") {
        const SimReport r = power_and_epb({"m", 60642, 4}, po, p, quiet_map(po, p), 0.8);
        CHECK(r.total_power_mw == doctest::Approx(r.power_mw.total()));
        CHECK(r.n_lambda == 5);
        CHECK(r.required_bandwidth_gb_s == doctest::Approx(109.375));
        CHECK(r.required_bandwidth_gb_s >= 93.75 / 2.0);
        CHECK(r.required_bandwidth_gb_s <= 93.75 * 2.0);
        REQUIRE(r.epb_pj_per_bit.has_value());
        CHECK(*r.epb_pj_per_bit == doctest::Approx(r.total_power_mw * r.timing.total_ns / (60642.0 * 5.0)));
        // at fixed power, energy per bit times frame rate is constant
        const SimReport big = power_and_epb({"m", 13570186, 4}, po, p, quiet_map(po, p), 0.8);
        CHECK(big.total_power_mw == doctest::Approx(r.total_power_mw));
        CHECK(*big.epb_pj_per_bit * big.fps * 13570186.0 == doctest::Approx(*r.epb_pj_per_bit * r.fps * 60642.0));
    }
    SUBCASE("doubling the VDP count") {
        for (std::size_t v : {25, 50, 100}) {
            const AcceleratorConfig a = arch(10, v, 10), b = arch(10, 2 * v, 10);
            const SimReport ra = power_and_epb({"m", 1546570, 4}, a, p, quiet_map(a, p), 0.8);
            const SimReport rb = power_and_epb({"m", 1546570, 4}, b, p, quiet_map(b, p), 0.8);
            CHECK(rb.timing.delta_t_ns * rb.timing.X <= ra.timing.delta_t_ns * ra.timing.X);
            CHECK(rb.total_power_mw > ra.total_power_mw);
        }
    }
    SUBCASE("passband limit") {
        const AcceleratorConfig wide = arch(21, 10, 1);
        CHECK_THROWS_AS(power_and_epb({"m", 10, 4}, wide, p, ChipFpvMap{}, 0.8), PhysicalConstraintError);
    }
}

TEST_CASE("area") {
    Platform p;
    p.area = {0.0, 0.0, 0.0, 0.0};
    AcceleratorConfig one = arch(1, 1, 1);
    one.n_b = 0;
    one.mr_pitch_um = 5.0;
    // activation ring of radius 5 um and weight ring of radius 1.5 um, each padded by half a pitch
    const double expect = std::numbers::pi * (7.5 * 7.5 + 4.0 * 4.0) * 1e-6;
    CHECK(area_estimate(one, p) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::numbers::pi * 7.5 * 7.5 == doctest::Approx(176.714586764426));

    const Platform d;
    CHECK(area_estimate(arch(1, 1, 1), d) > d.area.global_overhead_mm2);
    for (std::size_t a = 1; a < 15; ++a) CHECK(area_estimate(arch(a + 1, 50, 10), d) > area_estimate(arch(a, 50, 10), d));
    for (std::size_t v : {25, 50, 100}) CHECK(area_estimate(arch(10, 2 * v, 10), d) > area_estimate(arch(10, v, 10), d));
}

TEST_CASE("chip FPV map") {
    const Platform p;
    const AcceleratorConfig c = arch(4, 3, 2);
    FpvStatistics s;
    s.seed = 7;
    const ChipFpvMap m = sample_chip_fpv(c, p, s, 4);
    CHECK(m.lanes == 6);
    CHECK(m.activation_nm.size() == 24);
    CHECK(m.broadband_nm.size() == 6);
    CHECK_FALSE(m.all_zero());
    CHECK(quiet_map(c, p).all_zero());
    const ChipFpvMap again = sample_chip_fpv(c, p, s, 4);
    CHECK(again.weight_neg_nm == m.weight_neg_nm);
    CHECK(m.weight_pos_nm != m.weight_neg_nm);
}

TEST_CASE("photonic inference") {
    const Trained& t = trained();
    const Platform p;
    const AcceleratorConfig cfg = arch(4, 3, 2);
    const double ref = accuracy(t.model, t.data);
    CHECK(ref >= 0.9);

    SUBCASE("ideal chip or full correction reproduces the reference") {
        const ChipFpvMap noisy = sample_chip_fpv(cfg, p, FpvStatistics{}, cfg.n_a);
        const NoisyResult r = noisy_inference(t.model, t.data, cfg, p, noisy, 1.0);
        CHECK(r.accuracy == doctest::Approx(ref));
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            const auto e = reference_inference(t.model, Tensor(t.model.input_shape, t.data[i].x));
            for (std::size_t k = 0; k < e.logits.size(); ++k)
                CHECK(std::abs(r.outputs[i].logits[k] - e.logits[k]) <= 1e-9);
        }
        const ChipFpvMap quiet = sample_chip_fpv(cfg, p, FpvStatistics{{0, 0, 0}, {0, 0, 0}, 0}, cfg.n_a);
        CHECK(noisy_inference(t.model, t.data, cfg, p, quiet, 0.0).accuracy == doctest::Approx(ref));
    }
    SUBCASE("more correction never hurts on average") {
        const std::vector<double> fr{0.0, 1.0};
        const auto rows = fpv_fraction_sweep(t.model, t.data, AcceleratorConfig{}, p, FpvStatistics{}, fr, 20, 2026);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].mean_accuracy >= rows[0].mean_accuracy);
        CHECK(rows[1].std_accuracy == 0.0);
        CHECK(rows[1].mean_accuracy == doctest::Approx(ref));
    }
    SUBCASE("argument checks") {
        const ChipFpvMap m = sample_chip_fpv(cfg, p, FpvStatistics{}, cfg.n_a);
        CHECK_THROWS_AS(noisy_inference(t.model, t.data, cfg, p, m, 1.2), DomainError);
        CHECK_THROWS_AS(noisy_inference(t.model, t.data, cfg, p, ChipFpvMap{}, 0.5), DomainError);
        const std::vector<double> fr{0.5};
        CHECK_THROWS_AS(fpv_fraction_sweep(t.model, t.data, cfg, p, FpvStatistics{}, fr, 0, 1), DomainError);
    }
}

} // TEST_SUITE
