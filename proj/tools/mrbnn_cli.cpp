// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the toolkit only through the C API.

#include "mrbnn/mrbnn.h"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

const char* prefix_for(int code) {
    switch (code) {
    case MRBNN_ERR_USAGE: return "error[usage]";
    case MRBNN_ERR_DATA: return "error[data]";
    case MRBNN_ERR_PHYSICAL: return "error[physical]";
    default: return "error[internal]";
    }
}

int report(mrbnn_status st) {
    std::string msg = mrbnn_last_error();
    for (auto& c : msg)
        if (c == '\n') c = ' ';
    std::fprintf(stderr, "%s: %s\n", prefix_for(st), msg.c_str());
    return static_cast<int>(st);
}

bool write_file(const std::string& path, const mrbnn_buffer& buf) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(buf.data, static_cast<std::streamsize>(buf.size));
    return static_cast<bool>(out);
}

struct Buffers {
    mrbnn_buffer primary{nullptr, 0};
    mrbnn_buffer summary{nullptr, 0};
    ~Buffers() {
        mrbnn_buffer_free(&primary);
        mrbnn_buffer_free(&summary);
    }
};

struct ContextGuard {
    mrbnn_context* ctx = nullptr;
    ~ContextGuard() { mrbnn_context_destroy(ctx); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microring BNN accelerator toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(mrbnn_version()));

    std::string config_path;
    app.add_option("--config", config_path, "Config file (JSON with comments); defaults to $MRBNN_CONFIG");

    std::string out_path, summary_path;
    auto add_outputs = [&](CLI::App* sub, const char* out_flag, const char* what) {
        sub->add_option(out_flag, out_path, what)->required();
        sub->add_option("--summary", summary_path, "Also write the JSON summary to this file");
    };

    std::string ring_class;
    auto* dev = app.add_subcommand("device-report", "Transmission spectrum and resolution of one ring class");
    dev->add_option("--class", ring_class, "multibit | singlebit | broadband")->required();
    add_outputs(dev, "--out", "Spectrum CSV");

    std::string model_path, fractions;
    std::size_t seeds = 0;
    auto* fpv = app.add_subcommand("fpv-sweep", "Accuracy vs tuned fraction of FPV shift");
    fpv->add_option("--model", model_path, "Model file")->required();
    fpv->add_option("--fractions", fractions, "Comma-separated fractions in [0,1]");
    fpv->add_option("--seeds", seeds, "Number of FPV maps (default from config)")->check(CLI::PositiveNumber);
    add_outputs(fpv, "--out", "Sweep CSV");

    std::string arch;
    std::uint64_t parameters = 0;
    auto* sim = app.add_subcommand("simulate", "Power, latency and energy report for one architecture");
    auto* sim_model = sim->add_option("--model", model_path, "Model file");
    auto* sim_params = sim->add_option("--parameters", parameters, "Bare parameter count instead of a model");
    sim_model->excludes(sim_params);
    sim->add_option("--arch", arch, "n_a,n_vdp,n_wg (default from config)");
    add_outputs(sim, "--out", "Report JSON");

    auto* dse = app.add_subcommand("dse", "Design-space sweep with Pareto picks");
    add_outputs(dse, "--out", "Scatter CSV");

    std::uint64_t dataset_seed = 0;
    auto* train = app.add_subcommand("train-toy", "Train the synthetic-blob MLP");
    auto* seed_opt = train->add_option("--dataset-seed", dataset_seed, "Dataset seed (default from config)");
    add_outputs(train, "--out-model", "Model file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        for (auto& c : msg)
            if (c == '\n') c = ' ';
        std::fprintf(stderr, "error[usage]: %s\n", msg.c_str());
        std::cerr << app.help();
        return MRBNN_ERR_USAGE;
    }

    ContextGuard guard;
    if (mrbnn_status st = mrbnn_context_create(config_path.c_str(), &guard.ctx); st != MRBNN_OK) return report(st);
    const mrbnn_context* ctx = guard.ctx;

    Buffers buf;
    mrbnn_status st = MRBNN_OK;
    if (dev->parsed()) {
        st = mrbnn_device_report(ctx, ring_class.c_str(), &buf.primary, &buf.summary);
    } else if (fpv->parsed()) {
        st = mrbnn_fpv_sweep(ctx, model_path.c_str(), fractions.c_str(), seeds, &buf.primary, &buf.summary);
    } else if (sim->parsed()) {
        const bool has_params = sim_params->count() > 0;
        if (!has_params && model_path.empty()) {
            std::fprintf(stderr, "error[usage]: simulate needs --model or --parameters\n");
            return MRBNN_ERR_USAGE;
        }
        st = mrbnn_simulate(ctx, has_params ? nullptr : model_path.c_str(), has_params ? 1 : 0, parameters,
                            arch.empty() ? nullptr : arch.c_str(), &buf.primary, &buf.summary);
    } else if (dse->parsed()) {
        st = mrbnn_dse(ctx, &buf.primary, &buf.summary);
    } else if (train->parsed()) {
        st = mrbnn_train_toy(ctx, seed_opt->count() > 0 ? 1 : 0, dataset_seed, &buf.primary, &buf.summary);
    }
    if (st != MRBNN_OK) return report(st);

    if (!write_file(out_path, buf.primary)) {
        std::fprintf(stderr, "error[data]: cannot write '%s'\n", out_path.c_str());
        return MRBNN_ERR_DATA;
    }
    if (!summary_path.empty() && !write_file(summary_path, buf.summary)) {
        std::fprintf(stderr, "error[data]: cannot write '%s'\n", summary_path.c_str());
        return MRBNN_ERR_DATA;
    }
    std::fwrite(buf.summary.data, 1, buf.summary.size, stdout);
    return 0;
}
