// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Model file layout:
//   "mrbnn-model v1\n"
//   "header_bytes <N>\n"
//   <N bytes of JSON header: layers, shapes, quantization, metadata,
//    payload_bytes, crc32>
//   <payload: little-endian float32, layer order, row-major; per layer the
//    weights, then BN gamma, beta, mean, variance>

#pragma once

#include "mrbnn/bnn.hpp"

#include <cstdint>
#include <string>

namespace mrbnn {

struct ModelFile {
    QuantModel model;
    std::string metadata_json = "{}";  ///< free-form JSON object
};

std::uint32_t crc32_of(const std::string& bytes);

std::string serialize_model(const ModelFile& file);
/// Throws DataError on malformed input and ChecksumError on CRC mismatch.
ModelFile deserialize_model(const std::string& bytes);

void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

/// Round every stored tensor through float32, as the file does.
QuantModel round_to_float32(const QuantModel& model);

} // namespace mrbnn
