// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#include "doctest.h"

#include "mrbnn/mrbnn.h"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct Buffer {
    mrbnn_buffer b{nullptr, 0};
    ~Buffer() { mrbnn_buffer_free(&b); }
    std::string str() const { return b.data ? std::string(b.data, b.size) : std::string(); }
};

struct Context {
    mrbnn_context* ctx = nullptr;
    explicit Context(const char* json) { REQUIRE(mrbnn_context_from_json(json, &ctx) == MRBNN_OK); }
    ~Context() { mrbnn_context_destroy(ctx); }
};

constexpr const char* kFast = R"({"experiment": {"fpv_maps": 2, "train": {"epochs": 5}}})";

} // namespace

TEST_CASE("version and status codes") {
    CHECK(std::string(mrbnn_version()).size() > 0);
    CHECK(MRBNN_OK == 0);
    CHECK(MRBNN_ERR_USAGE == 2);
    CHECK(MRBNN_ERR_DATA == 3);
    CHECK(MRBNN_ERR_PHYSICAL == 4);
}

TEST_CASE("context creation") {
    mrbnn_context* ctx = nullptr;
    CHECK(mrbnn_context_from_json("{\"bogus\": 1}", &ctx) == MRBNN_ERR_USAGE);
    CHECK(ctx == nullptr);
    CHECK(std::string(mrbnn_last_error()).find("bogus") != std::string::npos);
    CHECK(mrbnn_context_create("/nonexistent/cfg.json", &ctx) == MRBNN_ERR_USAGE);
    CHECK(mrbnn_context_from_json("{}", nullptr) == MRBNN_ERR_USAGE);

    Context c("{}");
    Buffer cfg;
    CHECK(mrbnn_context_config_json(c.ctx, &cfg.b) == MRBNN_OK);
    CHECK(cfg.b.data[cfg.b.size] == '\0');
    mrbnn_context* again = nullptr;
    REQUIRE(mrbnn_context_from_json(cfg.b.data, &again) == MRBNN_OK);
    Buffer cfg2;
    CHECK(mrbnn_context_config_json(again, &cfg2.b) == MRBNN_OK);
    CHECK(cfg.str() == cfg2.str());
    mrbnn_context_destroy(again);
    mrbnn_context_destroy(nullptr);
}

TEST_CASE("device math") {
    double v = 0.0;
    CHECK(mrbnn_fwhm_from_q(1550.0, 5000.0, &v) == MRBNN_OK);
    CHECK(v == doctest::Approx(0.31));
    CHECK(mrbnn_allpass_transmission(0.9, 0.9, 0.0, &v) == MRBNN_OK);
    CHECK(v == doctest::Approx(0.0));
    CHECK(mrbnn_allpass_transmission(1.0, 1.0, 0.0, &v) == MRBNN_OK);
    CHECK(v == 1.0);
    CHECK(mrbnn_allpass_transmission(NAN, 0.9, 0.0, &v) == MRBNN_ERR_USAGE);
    CHECK(mrbnn_fwhm_from_q(1550.0, -1.0, &v) == MRBNN_ERR_USAGE);
    CHECK(mrbnn_crosstalk_phi(1550.0, 1550.0, 5000.0, &v) == MRBNN_OK);
    CHECK(v == doctest::Approx(1.0));
    CHECK(mrbnn_crosstalk_phi(1550.0, 1551.0, 5000.0, nullptr) == MRBNN_ERR_USAGE);
}

TEST_CASE("commands") {
    Context c(kFast);
    SUBCASE("device report") {
        Buffer csv, sum;
        REQUIRE(mrbnn_device_report(c.ctx, "multibit", &csv.b, &sum.b) == MRBNN_OK);
        CHECK(csv.str().rfind("wavelength_nm,transmission\n", 0) == 0);
        const auto j = nlohmann::json::parse(sum.str());
        CHECK(j["bits"].get<int>() >= 4);
        CHECK(mrbnn_device_report(c.ctx, "quadbit", &csv.b, nullptr) == MRBNN_ERR_USAGE);
        CHECK(mrbnn_device_report(c.ctx, "singlebit", nullptr, nullptr) == MRBNN_OK);
    }
    SUBCASE("simulate") {
        Buffer out, sum;
        REQUIRE(mrbnn_simulate(c.ctx, nullptr, 1, 60642, "50,200,10", &out.b, &sum.b) == MRBNN_OK);
        const auto j = nlohmann::json::parse(out.str());
        CHECK(j["pipeline"]["X"].get<int>() == 1);
        CHECK(mrbnn_simulate(c.ctx, nullptr, 0, 0, nullptr, &out.b, nullptr) == MRBNN_ERR_USAGE);
        CHECK(mrbnn_simulate(c.ctx, nullptr, 1, 10, "21,10,1", &out.b, nullptr) == MRBNN_ERR_PHYSICAL);
        CHECK(std::string(mrbnn_last_error()).find("exceed") != std::string::npos);
        CHECK(mrbnn_simulate(c.ctx, nullptr, 1, 10, "a,b", &out.b, nullptr) == MRBNN_ERR_USAGE);
    }
    SUBCASE("train, load and sweep") {
        namespace fs = std::filesystem;
        const fs::path path = fs::temp_directory_path() / "mrbnn_c_api_model.bin";
        Buffer model, sum;
        REQUIRE(mrbnn_train_toy(c.ctx, 0, 0, &model.b, &sum.b) == MRBNN_OK);
        std::ofstream(path, std::ios::binary).write(model.b.data, static_cast<std::streamsize>(model.b.size));

        mrbnn_model* m = nullptr;
        REQUIRE(mrbnn_model_load(path.c_str(), &m) == MRBNN_OK);
        std::uint64_t n = 0;
        CHECK(mrbnn_model_parameter_count(m, &n) == MRBNN_OK);
        CHECK(n == 96);
        Buffer meta;
        CHECK(mrbnn_model_metadata(m, &meta.b) == MRBNN_OK);
        CHECK(nlohmann::json::parse(meta.str()).contains("training_accuracy"));
        mrbnn_model_destroy(m);

        Buffer csv;
        REQUIRE(mrbnn_fpv_sweep(c.ctx, path.c_str(), "0,1", 0, &csv.b, nullptr) == MRBNN_OK);
        const std::string rows = csv.str();
        CHECK(std::count(rows.begin(), rows.end(), '\n') == 3);
        CHECK(mrbnn_fpv_sweep(c.ctx, path.c_str(), "0,2", 0, &csv.b, nullptr) == MRBNN_ERR_USAGE);

        std::string bad = model.str();
        bad[bad.size() - 2] = static_cast<char>(bad[bad.size() - 2] ^ 1);
        std::ofstream(path, std::ios::binary).write(bad.data(), static_cast<std::streamsize>(bad.size()));
        CHECK(mrbnn_model_load(path.c_str(), &m) == MRBNN_ERR_DATA);
        CHECK(mrbnn_fpv_sweep(c.ctx, path.c_str(), nullptr, 0, &csv.b, nullptr) == MRBNN_ERR_DATA);
        fs::remove(path);
    }
}
