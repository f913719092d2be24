// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include "support.hpp"

#include "mrbnn/config.hpp"
#include "mrbnn/csv.hpp"
#include "mrbnn/model_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace mrbnn;
using namespace mrbnn::testing;

TEST_SUITE("config_io") {

TEST_CASE("config defaults round-trip") {
    const ToolkitConfig d = default_config();
    CHECK(parse_config(serialize_config(d)) == d);
    CHECK(parse_config("{}") == d);
    CHECK(serialize_config(parse_config(serialize_config(d))) == serialize_config(d));
}

TEST_CASE("config overrides and validation") {
    const ToolkitConfig c = parse_config(R"({
        // comments are allowed
        "accelerator": {"n_a": 15, "n_vdp": 20},
        /* block comments too */
        "experiment": {"fpv_maps": 7, "dataset": {"seed": 4}}
    })");
    CHECK(c.accelerator.n_a == 15);
    CHECK(c.accelerator.n_w == 15);
    CHECK(c.accelerator.n_vdp == 20);
    CHECK(c.experiment.fpv_maps == 7);
    CHECK(c.experiment.dataset.seed == 4);
    CHECK(parse_config(serialize_config(c)) == c);

    CHECK_THROWS_AS(parse_config(R"({"acelerator": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"accelerator": {"n_vdpp": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"accelerator": {"n_vdp": "many"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"accelerator": {"n_vdp": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"fpv": {"sigma_nm": [-1, 0, 0]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[]"), ConfigError);
}

TEST_CASE("config file resolution") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "mrbnn_config_test";
    fs::create_directories(dir);
    const fs::path a = dir / "a.json", b = dir / "b.json";
    std::ofstream(a) << R"({"experiment": {"fpv_maps": 3}})";
    std::ofstream(b) << R"({"experiment": {"fpv_maps": 9}})";

    ::unsetenv("MRBNN_CONFIG");
    CHECK(resolve_config("") == default_config());
    ::setenv("MRBNN_CONFIG", b.c_str(), 1);
    CHECK(resolve_config("").experiment.fpv_maps == 9);
    CHECK(resolve_config(a.string()).experiment.fpv_maps == 3);
    ::unsetenv("MRBNN_CONFIG");
    CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("model file round-trip") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        ModelFile f;
        f.model = round_to_float32(random_model(derive_seed(90, s), s % 2 == 0, s % 3 == 0));
        f.metadata_json = R"({"n":3,"note":"x"})";
        const std::string bytes = serialize_model(f);
        const ModelFile back = deserialize_model(bytes);
        CHECK(back.model == f.model);
        CHECK(serialize_model(back) == bytes);
        CHECK(back.model.parameter_count() == f.model.parameter_count());
    }
}

TEST_CASE("float32 rounding") {
    QuantModel m;
    m.input_shape = {1};
    m.layers.push_back(Layer::fully_connected(1, 1, {0.1}));
    const QuantModel r = round_to_float32(m);
    CHECK(r.layers[0].weights[0] == static_cast<double>(0.1f));
    CHECK(round_to_float32(r) == r);
}

TEST_CASE("corrupted model files") {
    ModelFile f;
    f.model = round_to_float32(random_model(5, false, true));
    const std::string bytes = serialize_model(f);

    SUBCASE("payload bit flip") {
        std::string bad = bytes;
        bad[bad.size() - 3] = static_cast<char>(bad[bad.size() - 3] ^ 0x10);
        CHECK_THROWS_AS(deserialize_model(bad), ChecksumError);
    }
    SUBCASE("truncation") {
        CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 4)), DataError);
        CHECK_THROWS_AS(deserialize_model(bytes.substr(0, 10)), DataError);
        CHECK_THROWS_AS(deserialize_model(""), DataError);
    }
    SUBCASE("wrong magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(deserialize_model(bad), DataError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_model("/nonexistent/mrbnn.model"), DataError); }
}

TEST_CASE("crc32") {
    CHECK(crc32_of("") == 0u);
    CHECK(crc32_of("123456789") == 0xCBF43926u);
}

TEST_CASE("nine significant digits") {
    CHECK(format_sig9(1.0) == "1.00000000");
    CHECK(format_sig9(0.0) == "0.00000000");
    CHECK(format_sig9(123.456) == "123.456000");
    CHECK(format_sig9(-0.000123456789) == "-0.000123456789");
    CHECK(format_sig9(1.0 / 3.0) == "0.333333333");
    CHECK(format_sig9(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_sig9(-std::numeric_limits<double>::infinity()) == "-inf");
    for (std::uint64_t k = 0; k < 200; ++k) {
        const double v = std::pow(10.0, 8.0 * uniform01(3, k) - 4.0);
        CHECK(parse_double(format_sig9(v)) == doctest::Approx(v).epsilon(1e-8));
    }
    CHECK(split_csv_line("a,,b") == std::vector<std::string>{"a", "", "b"});
    CHECK(split_lines("x\ny\n") == std::vector<std::string>{"x", "y"});
    CHECK_THROWS_AS(parse_double("1.5x"), DataError);
}

} // TEST_SUITE
