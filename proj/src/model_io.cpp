// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/model_io.hpp"

#include "mrbnn/errors.hpp"

#include "json.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <sstream>

namespace mrbnn {

namespace {

using ojson = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr const char* kMagic = "mrbnn-model v1\n";

void put_f32(std::string& out, double v) {
    const float f = static_cast<float>(v);
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xFFU));
}

double get_f32(const std::string& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw DataError("model payload is truncated");
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    pos += 4;
    float f;
    std::memcpy(&f, &u, 4);
    return static_cast<double>(f);
}

const char* pool_name(PoolMode m) { return m == PoolMode::Max ? "max" : "average"; }

template <class T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(std::string("model header field '") + key + "': " + e.what());
    }
}

} // namespace

std::uint32_t crc32_of(const std::string& bytes) {
    uLong c = crc32(0L, Z_NULL, 0);
    c = crc32(c, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    return static_cast<std::uint32_t>(c);
}

std::string serialize_model(const ModelFile& file) {
    const QuantModel& m = file.model;
    m.validate();
    std::string payload;
    ojson layers = ojson::array();
    for (const auto& l : m.layers) {
        ojson lj;
        lj["kind"] = to_string(l.kind);
        switch (l.kind) {
        case LayerKind::FullyConnected:
        case LayerKind::Conv2d:
            lj["weight_shape"] = l.weight_shape;
            lj["binarized"] = l.binarized;
            if (l.kind == LayerKind::Conv2d) lj["stride"] = l.stride;
            for (double w : l.weights) put_f32(payload, w);
            break;
        case LayerKind::BatchNorm:
            lj["channels"] = l.bn.channels();
            lj["epsilon"] = l.bn.epsilon;
            for (const auto* v : {&l.bn.gamma, &l.bn.beta, &l.bn.mean, &l.bn.variance})
                for (double x : *v) put_f32(payload, x);
            break;
        case LayerKind::Activation:
            lj["range_lo"] = l.range_lo;
            lj["range_hi"] = l.range_hi;
            lj["quantize"] = l.quantize;
            break;
        case LayerKind::Pool:
            lj["window"] = l.pool_window;
            lj["mode"] = pool_name(l.pool_mode);
            break;
        }
        layers.push_back(lj);
    }
    ojson meta;
    try {
        meta = ojson::parse(file.metadata_json);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model metadata is not valid JSON: ") + e.what());
    }
    if (!meta.is_object()) throw DataError("model metadata must be a JSON object");

    ojson h;
    h["input_shape"] = m.input_shape;
    h["activation_bits"] = m.activation_bits;
    h["last_layer_full_precision"] = m.last_layer_full_precision;
    h["input_lo"] = m.input_lo;
    h["input_hi"] = m.input_hi;
    h["layers"] = layers;
    h["metadata"] = meta;
    h["payload_encoding"] = "float32-le";
    h["payload_bytes"] = payload.size();
    h["crc32"] = crc32_of(payload);
    const std::string header = h.dump(2) + "\n";
    return std::string(kMagic) + "header_bytes " + std::to_string(header.size()) + "\n" + header + payload;
}

ModelFile deserialize_model(const std::string& bytes) {
    const std::size_t magic_len = std::strlen(kMagic);
    if (bytes.compare(0, magic_len, kMagic) != 0) throw DataError("not a model file (bad magic line)");
    const std::size_t eol = bytes.find('\n', magic_len);
    const std::string prefix = "header_bytes ";
    if (eol == std::string::npos || bytes.compare(magic_len, prefix.size(), prefix) != 0)
        throw DataError("model file lacks a header_bytes line");
    const std::string count = bytes.substr(magic_len + prefix.size(), eol - magic_len - prefix.size());
    if (count.empty() || count.find_first_not_of("0123456789") != std::string::npos)
        throw DataError("model header_bytes is not a number");
    const std::size_t header_len = std::stoull(count);
    const std::size_t header_start = eol + 1;
    if (header_len > bytes.size() - header_start) throw DataError("model header is truncated");

    ojson h;
    try {
        h = ojson::parse(bytes.substr(header_start, header_len));
    } catch (const json::parse_error& e) {
        throw DataError(std::string("model header is not valid JSON: ") + e.what());
    }
    const std::string payload = bytes.substr(header_start + header_len);
    if (field<std::size_t>(h, "payload_bytes") != payload.size())
        throw DataError("model payload size does not match its header");
    if (field<std::uint32_t>(h, "crc32") != crc32_of(payload)) throw ChecksumError("model payload checksum mismatch");
    if (field<std::string>(h, "payload_encoding") != "float32-le") throw DataError("unsupported payload encoding");

    ModelFile file;
    QuantModel& m = file.model;
    m.input_shape = field<Shape>(h, "input_shape");
    m.activation_bits = field<int>(h, "activation_bits");
    m.last_layer_full_precision = field<bool>(h, "last_layer_full_precision");
    m.input_lo = field<double>(h, "input_lo");
    m.input_hi = field<double>(h, "input_hi");
    std::size_t pos = 0;
    const json& layers = h.at("layers");
    if (!layers.is_array()) throw DataError("model layers must be an array");
    for (const auto& lj : layers) {
        Layer l;
        l.kind = layer_kind_from_string(field<std::string>(lj, "kind"));
        switch (l.kind) {
        case LayerKind::FullyConnected:
        case LayerKind::Conv2d: {
            l.weight_shape = field<Shape>(lj, "weight_shape");
            const std::size_t rank = l.kind == LayerKind::Conv2d ? 4 : 2;
            if (l.weight_shape.size() != rank) throw DataError("linear layer has a malformed weight_shape");
            l.binarized = field<bool>(lj, "binarized");
            if (l.kind == LayerKind::Conv2d) l.stride = field<std::size_t>(lj, "stride");
            const std::size_t n = shape_size(l.weight_shape);
            if (n > (payload.size() - pos) / 4) throw DataError("model payload is truncated");
            l.weights.resize(n);
            for (auto& w : l.weights) w = get_f32(payload, pos);
            break;
        }
        case LayerKind::BatchNorm: {
            const auto c = field<std::size_t>(lj, "channels");
            if (c > (payload.size() - pos) / 16) throw DataError("model payload is truncated");
            l.bn.epsilon = field<double>(lj, "epsilon");
            for (auto* v : {&l.bn.gamma, &l.bn.beta, &l.bn.mean, &l.bn.variance}) {
                v->resize(c);
                for (auto& x : *v) x = get_f32(payload, pos);
            }
            break;
        }
        case LayerKind::Activation:
            l.range_lo = field<double>(lj, "range_lo");
            l.range_hi = field<double>(lj, "range_hi");
            l.quantize = field<bool>(lj, "quantize");
            break;
        case LayerKind::Pool: {
            l.pool_window = field<std::size_t>(lj, "window");
            const auto mode = field<std::string>(lj, "mode");
            if (mode != "max" && mode != "average") throw DataError("unknown pool mode '" + mode + "'");
            l.pool_mode = mode == "max" ? PoolMode::Max : PoolMode::Average;
            break;
        }
        }
        m.layers.push_back(std::move(l));
    }
    if (pos != payload.size()) throw DataError("model payload has trailing bytes");
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw DataError(std::string("model is inconsistent: ") + e.what());
    }
    if (h.contains("metadata")) file.metadata_json = h["metadata"].dump();
    return file;
}

void save_model(const std::string& path, const ModelFile& file) {
    const std::string bytes = serialize_model(file);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write model file '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("failed writing model file '" + path + "'");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_model(ss.str());
}

QuantModel round_to_float32(const QuantModel& model) {
    QuantModel m = model;
    auto round = [](std::vector<double>& v) {
        for (auto& x : v) x = static_cast<double>(static_cast<float>(x));
    };
    for (auto& l : m.layers) {
        round(l.weights);
        round(l.bn.gamma);
        round(l.bn.beta);
        round(l.bn.mean);
        round(l.bn.variance);
    }
    return m;
}

} // namespace mrbnn
