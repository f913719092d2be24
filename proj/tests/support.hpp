// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Random model and tensor builders shared by the test binaries.

#pragma once

#include "mrbnn/bnn.hpp"
#include "mrbnn/random.hpp"

#include <cstdint>
#include <vector>

namespace mrbnn::testing {

inline std::vector<double> uniform_vec(std::uint64_t seed, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = lo + (hi - lo) * uniform01(seed, k);
    return v;
}

inline std::vector<std::int64_t> int_vec(std::uint64_t seed, std::size_t n, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> v(n);
    const double span = static_cast<double>(hi - lo + 1);
    for (std::size_t k = 0; k < n; ++k) {
        auto x = lo + static_cast<std::int64_t>(uniform01(seed, k) * span);
        v[k] = x > hi ? hi : x;
    }
    return v;
}

/// BN with positive gamma; mean and beta zeroed when `centred`.
inline BatchNormParams random_bn(std::uint64_t seed, std::size_t channels, bool centred) {
    BatchNormParams bn;
    bn.gamma = uniform_vec(derive_seed(seed, 1), channels, 0.5, 2.0);
    bn.variance = uniform_vec(derive_seed(seed, 2), channels, 0.2, 3.0);
    bn.mean = centred ? std::vector<double>(channels, 0.0) : uniform_vec(derive_seed(seed, 3), channels, -0.5, 0.5);
    bn.beta = centred ? std::vector<double>(channels, 0.0) : uniform_vec(derive_seed(seed, 4), channels, -0.5, 0.5);
    return bn;
}

/// Conv(+BN)+Act[+Pool] -> FC(+BN)+Act -> FC head, or an MLP when `conv` is false.
inline QuantModel random_model(std::uint64_t seed, bool conv, bool centred_bn) {
    QuantModel m;
    m.activation_bits = 4;
    const double scale = 0.3;
    std::size_t flat = 0;
    if (conv) {
        const std::size_t ic = 1 + static_cast<std::size_t>(uniform01(seed, 0) * 2.0);
        const std::size_t oc = 2 + static_cast<std::size_t>(uniform01(seed, 1) * 3.0);
        const std::size_t k = 2 + static_cast<std::size_t>(uniform01(seed, 2) * 2.0);
        const std::size_t hw = 7;
        m.input_shape = {ic, hw, hw};
        m.layers.push_back(Layer::conv2d(oc, ic, k, k, uniform_vec(derive_seed(seed, 10), oc * ic * k * k, -1, 1)));
        m.layers.push_back(Layer::batch_norm(random_bn(derive_seed(seed, 11), oc, centred_bn)));
        m.layers.push_back(Layer::activation(0.0, 1.0, true));
        const std::size_t o = hw - k + 1;
        if (o % 2 == 0) {
            m.layers.push_back(Layer::pool(2, uniform01(seed, 3) < 0.5 ? PoolMode::Max : PoolMode::Average));
            flat = oc * (o / 2) * (o / 2);
        } else {
            flat = oc * o * o;
        }
    } else {
        flat = 3 + static_cast<std::size_t>(uniform01(seed, 4) * 10.0);
        m.input_shape = {flat};
    }
    const std::size_t hidden = 4 + static_cast<std::size_t>(uniform01(seed, 5) * 8.0);
    const std::size_t classes = 2 + static_cast<std::size_t>(uniform01(seed, 6) * 3.0);
    m.layers.push_back(Layer::fully_connected(hidden, flat, uniform_vec(derive_seed(seed, 20), hidden * flat, -1, 1)));
    m.layers.push_back(Layer::batch_norm(random_bn(derive_seed(seed, 21), hidden, centred_bn)));
    m.layers.push_back(Layer::activation(0.0, 1.0, true));
    m.layers.push_back(Layer::fully_connected(classes, hidden,
                                              uniform_vec(derive_seed(seed, 30), classes * hidden, -scale, scale), false));
    m.validate();
    return m;
}

inline Tensor random_input(std::uint64_t seed, const Shape& shape) {
    return Tensor(shape, uniform_vec(seed, shape_size(shape), 0.0, 1.0));
}

} // namespace mrbnn::testing
