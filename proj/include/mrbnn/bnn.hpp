// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

// Partially binarized networks: 1-bit weights through sign(), n-bit
// activations, batch-norm folding and a straight-through-estimator trainer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrbnn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);

struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0);
    Tensor(Shape s, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    bool operator==(const Tensor&) const = default;
};

enum class LayerKind { Conv2d, FullyConnected, BatchNorm, Activation, Pool };
enum class PoolMode { Max, Average };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

struct BatchNormParams {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> mean;
    std::vector<double> variance;
    double epsilon = 1e-5;

    std::size_t channels() const { return gamma.size(); }
    bool operator==(const BatchNormParams&) const = default;
};

struct Layer {
    LayerKind kind = LayerKind::FullyConnected;

    // Conv2d: [out_c, in_c, kh, kw]; FullyConnected: [out, in].
    Shape weight_shape;
    std::vector<double> weights;  ///< full-precision shadow weights
    bool binarized = true;
    std::size_t stride = 1;

    BatchNormParams bn;

    // Activation: ReLU, then clamp + uniform quantization when `quantize`.
    double range_lo = 0.0;
    double range_hi = 1.0;
    bool quantize = true;

    std::size_t pool_window = 2;
    PoolMode pool_mode = PoolMode::Max;

    bool is_linear() const { return kind == LayerKind::Conv2d || kind == LayerKind::FullyConnected; }
    std::size_t out_channels() const { return weight_shape.empty() ? 0 : weight_shape[0]; }
    /// Length of the dot product behind one output element.
    std::size_t fan_in() const;

    static Layer fully_connected(std::size_t out, std::size_t in, std::vector<double> w, bool binarized = true);
    static Layer conv2d(std::size_t out_c, std::size_t in_c, std::size_t kh, std::size_t kw,
                        std::vector<double> w, std::size_t stride = 1, bool binarized = true);
    static Layer batch_norm(BatchNormParams params);
    static Layer activation(double lo = 0.0, double hi = 1.0, bool quantize = true);
    static Layer pool(std::size_t window, PoolMode mode = PoolMode::Max);

    bool operator==(const Layer&) const = default;
};

struct QuantModel {
    Shape input_shape;
    std::vector<Layer> layers;
    int activation_bits = 4;
    bool last_layer_full_precision = true;
    double input_lo = 0.0;
    double input_hi = 1.0;

    /// Throws DomainError when the layer shapes do not chain.
    void validate() const;
    Shape output_shape() const;
    /// Shape entering layer `index`.
    Shape shape_before(std::size_t index) const;
    std::size_t parameter_count() const;
    std::optional<std::size_t> last_linear_index() const;
    /// Whether layer `index` is read through sign() at inference.
    bool uses_sign(std::size_t index) const;

    bool operator==(const QuantModel&) const = default;
};

/// sign(w) with sign(0) = +1.
int binarize(double w);

/// Clamp to [lo, hi], then round onto 2^bits evenly spaced levels.
double quantize_activation(double v, int bits, double lo, double hi);

struct FoldedLayer {
    std::size_t base_layer = 0;
    std::vector<double> c_fold;  ///< gamma / sqrt(var + eps), per output channel
};

FoldedLayer bn_fold(const Layer& linear, const BatchNormParams& bn, std::size_t base_layer = 0);

enum class BnMode {
    Folded,   ///< C_fold * f(A W); mean and beta dropped
    Explicit  ///< f((A W - mean) * gamma / sqrt(var + eps) + beta)
};

struct InferenceResult {
    std::vector<double> logits;
    std::size_t predicted = 0;
};

/// Applies every layer that is not a Conv2d/FullyConnected product. Shared by
/// the exact reference path and the photonic simulator.
class ElectronicStage {
public:
    ElectronicStage(const QuantModel& model, BnMode mode);
    /// Quantized model input.
    Tensor prepare_input(const Tensor& input) const;
    /// Run layers [first, last) that follow a linear layer's raw product.
    Tensor apply(const Tensor& x, std::size_t first, std::size_t last) const;

private:
    const QuantModel& model_;
    BnMode mode_;
};

/// Exact product of one linear layer; weights read through sign() when binarized.
Tensor linear_forward(const QuantModel& model, std::size_t layer_index, const Tensor& x);

InferenceResult reference_inference(const QuantModel& model, const Tensor& input, BnMode mode = BnMode::Folded);

struct Sample {
    std::vector<double> x;
    int label = 0;
};

using Dataset = std::vector<Sample>;

struct BlobSpec {
    std::size_t classes = 3;
    std::size_t features = 3;
    std::size_t samples_per_class = 200;
    double spread = 0.14;
    std::uint64_t seed = 1;

    bool operator==(const BlobSpec&) const = default;
};

/// Gaussian blobs clipped to [0, 1]. With classes <= features class c sits at
/// 0.75 on feature c and 0.25 elsewhere; otherwise centres follow the bits of c.
Dataset make_blobs(const BlobSpec& spec);

/// Two-layer MLP skeleton: binarized hidden FC + quantized ReLU + full-precision head.
QuantModel make_mlp(std::size_t features, std::size_t hidden, std::size_t classes, int activation_bits,
                    std::uint64_t init_seed, double init_scale = 0.5);

struct TrainOptions {
    std::size_t epochs = 50;
    double learning_rate = 0.01;
    std::size_t batch_size = 16;
    std::uint64_t seed = 7;

    bool operator==(const TrainOptions&) const = default;
};

struct TrainResult {
    QuantModel model;
    std::vector<double> epoch_loss;  ///< mean training loss after each epoch
    double train_accuracy = 0.0;
    std::size_t best_epoch = 0;  ///< epoch whose weights are returned; 0 = initial weights
};

/// Plain SGD on shadow weights; forward/backward read sign(W), the sign
/// derivative is passed straight through. FC/Activation layers only. Returns
/// the weights with the lowest end-of-epoch loss (initial weights included).
TrainResult ste_train(const QuantModel& model, const Dataset& data, const TrainOptions& options);

/// Gradients w.r.t. each linear layer's shadow weights, indexed by layer.
struct Gradients {
    std::vector<std::vector<double>> per_layer;
    double loss = 0.0;
};

/// STE backward for one sample. Output dim 1 uses logistic loss on labels
/// {0, 1}; wider outputs use softmax cross-entropy.
Gradients ste_backward(const QuantModel& model, const Sample& sample);

/// Loss of the network with sign() and activation quantization replaced by
/// identity (ReLU kept). Used for finite-difference checks of ste_backward.
double surrogate_loss(const QuantModel& model, const Sample& sample);

double accuracy(const QuantModel& model, const Dataset& data, BnMode mode = BnMode::Folded);

} // namespace mrbnn
