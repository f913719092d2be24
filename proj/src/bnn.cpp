// Copyright 2026 The mrbnn Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrbnn/bnn.hpp"

#include "mrbnn/errors.hpp"
#include "mrbnn/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mrbnn {

std::size_t shape_size(const Shape& shape) {
    if (shape.empty()) return 0;
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(shape_size(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != shape_size(shape)) throw DomainError("tensor data does not match its shape");
}

std::string to_string(LayerKind kind) {
    switch (kind) {
    case LayerKind::Conv2d: return "conv2d";
    case LayerKind::FullyConnected: return "fully_connected";
    case LayerKind::BatchNorm: return "batch_norm";
    case LayerKind::Activation: return "activation";
    case LayerKind::Pool: return "pool";
    }
    return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
    if (name == "conv2d") return LayerKind::Conv2d;
    if (name == "fully_connected") return LayerKind::FullyConnected;
    if (name == "batch_norm") return LayerKind::BatchNorm;
    if (name == "activation") return LayerKind::Activation;
    if (name == "pool") return LayerKind::Pool;
    throw DataError("unknown layer kind '" + name + "'");
}

std::size_t Layer::fan_in() const {
    if (kind == LayerKind::FullyConnected) return weight_shape.at(1);
    if (kind == LayerKind::Conv2d) return weight_shape.at(1) * weight_shape.at(2) * weight_shape.at(3);
    return 0;
}

Layer Layer::fully_connected(std::size_t out, std::size_t in, std::vector<double> w, bool binarized) {
    if (w.size() != out * in) throw DomainError("fully-connected weight count mismatch");
    Layer l;
    l.kind = LayerKind::FullyConnected;
    l.weight_shape = {out, in};
    l.weights = std::move(w);
    l.binarized = binarized;
    return l;
}

Layer Layer::conv2d(std::size_t out_c, std::size_t in_c, std::size_t kh, std::size_t kw, std::vector<double> w,
                    std::size_t stride, bool binarized) {
    if (w.size() != out_c * in_c * kh * kw) throw DomainError("conv weight count mismatch");
    if (stride == 0) throw DomainError("conv stride must be at least 1");
    Layer l;
    l.kind = LayerKind::Conv2d;
    l.weight_shape = {out_c, in_c, kh, kw};
    l.weights = std::move(w);
    l.stride = stride;
    l.binarized = binarized;
    return l;
}

Layer Layer::batch_norm(BatchNormParams params) {
    Layer l;
    l.kind = LayerKind::BatchNorm;
    l.bn = std::move(params);
    return l;
}

Layer Layer::activation(double lo, double hi, bool quantize) {
    Layer l;
    l.kind = LayerKind::Activation;
    l.range_lo = lo;
    l.range_hi = hi;
    l.quantize = quantize;
    return l;
}

Layer Layer::pool(std::size_t window, PoolMode mode) {
    Layer l;
    l.kind = LayerKind::Pool;
    l.pool_window = window;
    l.pool_mode = mode;
    return l;
}

namespace {

std::size_t channel_count(const Shape& s) { return s.size() == 3 ? s[0] : shape_size(s); }

Shape next_shape(const Layer& layer, const Shape& in) {
    switch (layer.kind) {
    case LayerKind::FullyConnected:
        if (shape_size(in) != layer.weight_shape[1])
            throw DomainError("fully-connected input size does not match its weights");
        return {layer.weight_shape[0]};
    case LayerKind::Conv2d: {
        if (in.size() != 3 || in[0] != layer.weight_shape[1])
            throw DomainError("conv input must be [C,H,W] with matching channels");
        const std::size_t kh = layer.weight_shape[2], kw = layer.weight_shape[3];
        if (kh == 0 || kw == 0) throw DomainError("conv kernel is empty");
        if (kh > in[1] || kw > in[2]) throw DomainError("conv kernel larger than its input");
        return {layer.weight_shape[0], (in[1] - kh) / layer.stride + 1, (in[2] - kw) / layer.stride + 1};
    }
    case LayerKind::BatchNorm: {
        const auto& bn = layer.bn;
        const std::size_t c = bn.gamma.size();
        if (bn.beta.size() != c || bn.mean.size() != c || bn.variance.size() != c)
            throw DomainError("batch-norm parameter vectors differ in length");
        if (c != channel_count(in)) throw DomainError("batch-norm channel count mismatch");
        if (!(bn.epsilon > 0.0)) throw DomainError("batch-norm epsilon must be positive");
        for (double v : bn.variance)
            if (v < 0.0) throw DomainError("batch-norm variance must be non-negative");
        return in;
    }
    case LayerKind::Activation:
        if (!(layer.range_lo < layer.range_hi)) throw DomainError("activation range must satisfy lo < hi");
        return in;
    case LayerKind::Pool:
        if (in.size() != 3) throw DomainError("pooling needs a [C,H,W] input");
        if (layer.pool_window == 0 || layer.pool_window > in[1] || layer.pool_window > in[2])
            throw DomainError("pool window does not fit its input");
        return {in[0], in[1] / layer.pool_window, in[2] / layer.pool_window};
    }
    return in;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

} // namespace

void QuantModel::validate() const {
    if (activation_bits < 1) throw DomainError("activation_bits must be at least 1");
    if (!(input_lo < input_hi)) throw DomainError("input range must satisfy lo < hi");
    if (shape_size(input_shape) == 0) throw DomainError("model input shape is empty");
    Shape s = input_shape;
    for (const auto& layer : layers) {
        if (layer.is_linear() && layer.weights.size() != shape_size(layer.weight_shape))
            throw DomainError("layer weights do not match the declared shape");
        s = next_shape(layer, s);
    }
}

Shape QuantModel::shape_before(std::size_t index) const {
    Shape s = input_shape;
    for (std::size_t i = 0; i < index && i < layers.size(); ++i) s = next_shape(layers[i], s);
    return s;
}

Shape QuantModel::output_shape() const { return shape_before(layers.size()); }

std::size_t QuantModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers)
        if (l.is_linear()) n += l.weights.size();
    return n;
}

std::optional<std::size_t> QuantModel::last_linear_index() const {
    for (std::size_t i = layers.size(); i-- > 0;)
        if (layers[i].is_linear()) return i;
    return std::nullopt;
}

bool QuantModel::uses_sign(std::size_t index) const {
    const Layer& l = layers.at(index);
    if (!l.is_linear() || !l.binarized) return false;
    return !(last_layer_full_precision && last_linear_index() == index);
}

int binarize(double w) {
    require_finite(w, "weight");
    return w >= 0.0 ? 1 : -1;
}

double quantize_activation(double v, int bits, double lo, double hi) {
    if (bits < 1) throw DomainError("bits must be at least 1");
    if (!(lo < hi)) throw DomainError("quantization range must satisfy lo < hi");
    require_finite(v, "activation");
    const double steps = std::ldexp(1.0, bits) - 1.0;
    const double c = std::clamp(v, lo, hi);
    const double level = std::round((c - lo) / (hi - lo) * steps);
    return lo + level * (hi - lo) / steps;
}

FoldedLayer bn_fold(const Layer& linear, const BatchNormParams& bn, std::size_t base_layer) {
    if (linear.is_linear() && bn.gamma.size() != linear.out_channels())
        throw DomainError("batch-norm channel count does not match the layer outputs");
    FoldedLayer f;
    f.base_layer = base_layer;
    f.c_fold.resize(bn.gamma.size());
    for (std::size_t c = 0; c < bn.gamma.size(); ++c) {
        const double denom = bn.variance.at(c) + bn.epsilon;
        if (!(denom > 0.0)) throw DomainError("batch-norm variance + epsilon must be positive");
        f.c_fold[c] = bn.gamma[c] / std::sqrt(denom);
    }
    return f;
}

ElectronicStage::ElectronicStage(const QuantModel& model, BnMode mode) : model_(model), mode_(mode) {}

Tensor ElectronicStage::prepare_input(const Tensor& input) const {
    if (input.shape != model_.input_shape && shape_size(input.shape) != shape_size(model_.input_shape))
        throw DomainError("input shape does not match the model");
    Tensor x(model_.input_shape, input.data);
    for (double& v : x.data) v = quantize_activation(v, model_.activation_bits, model_.input_lo, model_.input_hi);
    return x;
}

Tensor ElectronicStage::apply(const Tensor& in, std::size_t first, std::size_t last) const {
    Tensor x = in;
    std::vector<double> pending_scale;
    for (std::size_t i = first; i < last; ++i) {
        const Layer& layer = model_.layers[i];
        const std::size_t per_channel = x.shape.size() == 3 ? x.shape[1] * x.shape[2] : 1;
        switch (layer.kind) {
        case LayerKind::BatchNorm: {
            const auto& bn = layer.bn;
            if (mode_ == BnMode::Folded) {
                std::size_t base = i;
                while (base > 0 && !model_.layers[base].is_linear()) --base;
                const FoldedLayer f = bn_fold(model_.layers[base], bn, base);
                const bool before_activation =
                    i + 1 < last && model_.layers[i + 1].kind == LayerKind::Activation;
                if (before_activation) {
                    pending_scale = f.c_fold;
                } else {
                    for (std::size_t k = 0; k < x.size(); ++k) x.data[k] *= f.c_fold[k / per_channel];
                }
            } else {
                for (std::size_t k = 0; k < x.size(); ++k) {
                    const std::size_t c = k / per_channel;
                    const double scale = bn.gamma[c] / std::sqrt(bn.variance[c] + bn.epsilon);
                    x.data[k] = (x.data[k] - bn.mean[c]) * scale + bn.beta[c];
                }
            }
            break;
        }
        case LayerKind::Activation:
            for (std::size_t k = 0; k < x.size(); ++k) {
                double v = relu(x.data[k]);
                if (!pending_scale.empty()) v = pending_scale[k / per_channel] * v;
                if (layer.quantize) v = quantize_activation(v, model_.activation_bits, layer.range_lo, layer.range_hi);
                x.data[k] = v;
            }
            pending_scale.clear();
            break;
        case LayerKind::Pool: {
            const std::size_t c = x.shape[0], h = x.shape[1], w = x.shape[2], win = layer.pool_window;
            Tensor out({c, h / win, w / win});
            for (std::size_t ch = 0; ch < c; ++ch)
                for (std::size_t oy = 0; oy < h / win; ++oy)
                    for (std::size_t ox = 0; ox < w / win; ++ox) {
                        double acc = layer.pool_mode == PoolMode::Max ? -INFINITY : 0.0;
                        for (std::size_t dy = 0; dy < win; ++dy)
                            for (std::size_t dx = 0; dx < win; ++dx) {
                                const double v = x.data[(ch * h + oy * win + dy) * w + ox * win + dx];
                                acc = layer.pool_mode == PoolMode::Max ? std::max(acc, v) : acc + v;
                            }
                        if (layer.pool_mode == PoolMode::Average) acc /= static_cast<double>(win * win);
                        out.data[(ch * (h / win) + oy) * (w / win) + ox] = acc;
                    }
            x = std::move(out);
            break;
        }
        case LayerKind::Conv2d:
        case LayerKind::FullyConnected:
            throw DomainError("linear layer reached the electronic stage");
        }
    }
    return x;
}

Tensor linear_forward(const QuantModel& model, std::size_t index, const Tensor& x) {
    const Layer& layer = model.layers.at(index);
    const bool sign = model.uses_sign(index);
    auto weight = [&](std::size_t k) { return sign ? static_cast<double>(binarize(layer.weights[k])) : layer.weights[k]; };

    if (layer.kind == LayerKind::FullyConnected) {
        const std::size_t out = layer.weight_shape[0], in = layer.weight_shape[1];
        if (x.size() != in) throw DomainError("fully-connected input size mismatch");
        Tensor y({out});
        for (std::size_t o = 0; o < out; ++o) {
            double acc = 0.0;
            for (std::size_t i = 0; i < in; ++i) acc += weight(o * in + i) * x.data[i];
            y.data[o] = acc;
        }
        return y;
    }
    if (layer.kind == LayerKind::Conv2d) {
        const Shape out_shape = next_shape(layer, x.shape);
        const std::size_t oc = layer.weight_shape[0], ic = layer.weight_shape[1];
        const std::size_t kh = layer.weight_shape[2], kw = layer.weight_shape[3];
        const std::size_t h = x.shape[1], w = x.shape[2];
        const std::size_t oh = out_shape[1], ow = out_shape[2];
        Tensor y(out_shape);
        for (std::size_t o = 0; o < oc; ++o)
            for (std::size_t oy = 0; oy < oh; ++oy)
                for (std::size_t ox = 0; ox < ow; ++ox) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < ic; ++c)
                        for (std::size_t ky = 0; ky < kh; ++ky)
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                const double a = x.data[(c * h + oy * layer.stride + ky) * w + ox * layer.stride + kx];
                                acc += weight(((o * ic + c) * kh + ky) * kw + kx) * a;
                            }
                    y.data[(o * oh + oy) * ow + ox] = acc;
                }
        return y;
    }
    throw DomainError("layer is not linear");
}

namespace {

std::size_t argmax_prediction(const std::vector<double>& logits) {
    if (logits.size() == 1) return logits[0] >= 0.0 ? 1 : 0;
    return static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

} // namespace

InferenceResult reference_inference(const QuantModel& model, const Tensor& input, BnMode mode) {
    model.validate();
    ElectronicStage stage(model, mode);
    Tensor x = stage.prepare_input(input);
    std::size_t i = 0;
    while (i < model.layers.size()) {
        std::size_t next = i;
        if (model.layers[i].is_linear()) {
            x = linear_forward(model, i, x);
            ++next;
        }
        std::size_t end = next;
        while (end < model.layers.size() && !model.layers[end].is_linear()) ++end;
        x = stage.apply(x, next, end);
        i = end;
    }
    InferenceResult r;
    r.logits = std::move(x.data);
    r.predicted = argmax_prediction(r.logits);
    return r;
}

Dataset make_blobs(const BlobSpec& spec) {
    if (spec.classes < 2 || spec.features < 1 || spec.samples_per_class < 1)
        throw DomainError("blob dataset needs >= 2 classes, >= 1 feature and >= 1 sample per class");
    std::vector<std::vector<double>> centres(spec.classes, std::vector<double>(spec.features));
    for (std::size_t c = 0; c < spec.classes; ++c)
        for (std::size_t f = 0; f < spec.features; ++f) {
            if (spec.classes <= spec.features) {
                centres[c][f] = f == c ? 0.75 : 0.25;
            } else if (f < 63 && c < (std::size_t{1} << std::min<std::size_t>(spec.features, 20))) {
                centres[c][f] = 0.25 + 0.5 * static_cast<double>((c >> f) & 1U);
            } else {
                centres[c][f] = 0.2 + 0.6 * uniform01(derive_seed(spec.seed, 0xC3), c * spec.features + f);
            }
        }
    Dataset data;
    data.reserve(spec.classes * spec.samples_per_class);
    std::uint64_t draw = 0;
    for (std::size_t n = 0; n < spec.samples_per_class; ++n)
        for (std::size_t c = 0; c < spec.classes; ++c) {
            Sample s;
            s.label = static_cast<int>(c);
            s.x.resize(spec.features);
            for (std::size_t f = 0; f < spec.features; ++f)
                s.x[f] = std::clamp(centres[c][f] + spec.spread * standard_normal(spec.seed, draw++), 0.0, 1.0);
            data.push_back(std::move(s));
        }
    return data;
}

QuantModel make_mlp(std::size_t features, std::size_t hidden, std::size_t classes, int activation_bits,
                    std::uint64_t init_seed, double init_scale) {
    auto init = [&](std::size_t n, std::uint64_t label) {
        std::vector<double> w(n);
        const std::uint64_t s = derive_seed(init_seed, label);
        for (std::size_t k = 0; k < n; ++k) w[k] = init_scale * (2.0 * uniform01(s, k) - 1.0);
        return w;
    };
    QuantModel m;
    m.input_shape = {features};
    m.activation_bits = activation_bits;
    m.layers.push_back(Layer::fully_connected(hidden, features, init(hidden * features, 1), true));
    m.layers.push_back(Layer::activation(0.0, 1.0, true));
    m.layers.push_back(Layer::fully_connected(classes, hidden, init(classes * hidden, 2), false));
    m.validate();
    return m;
}

namespace {

void require_trainable(const QuantModel& model) {
    model.validate();
    for (const auto& l : model.layers)
        if (l.kind != LayerKind::FullyConnected && l.kind != LayerKind::Activation)
            throw DomainError("the trainer supports fully-connected and activation layers only");
}

struct ForwardTrace {
    std::vector<std::vector<double>> inputs;  // input to each layer
    std::vector<double> output;
};

// `exact` selects the STE network (sign + quantization) versus the smooth
// surrogate (identity in place of both).
ForwardTrace trace_forward(const QuantModel& model, const std::vector<double>& x0, bool exact) {
    ForwardTrace t;
    std::vector<double> x(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i)
        x[i] = quantize_activation(x0[i], model.activation_bits, model.input_lo, model.input_hi);
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& l = model.layers[li];
        t.inputs.push_back(x);
        if (l.kind == LayerKind::FullyConnected) {
            const std::size_t out = l.weight_shape[0], in = l.weight_shape[1];
            const bool sign = exact && model.uses_sign(li);
            std::vector<double> y(out, 0.0);
            for (std::size_t o = 0; o < out; ++o)
                for (std::size_t i = 0; i < in; ++i) {
                    const double w = sign ? static_cast<double>(binarize(l.weights[o * in + i])) : l.weights[o * in + i];
                    y[o] += w * x[i];
                }
            x = std::move(y);
        } else {
            for (double& v : x) {
                v = relu(v);
                if (exact && l.quantize) v = quantize_activation(v, model.activation_bits, l.range_lo, l.range_hi);
            }
        }
    }
    t.output = std::move(x);
    return t;
}

double loss_and_grad(const std::vector<double>& z, int label, std::vector<double>* dz) {
    if (z.size() == 1) {
        const double t = label != 0 ? 1.0 : -1.0;
        const double m = -t * z[0];
        const double loss = m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
        if (dz) *dz = {-t / (1.0 + std::exp(-m))};
        return loss;
    }
    if (label < 0 || static_cast<std::size_t>(label) >= z.size()) throw DomainError("label out of range");
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    const double lse = zmax + std::log(sum);
    if (dz) {
        dz->resize(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) (*dz)[k] = std::exp(z[k] - lse);
        (*dz)[static_cast<std::size_t>(label)] -= 1.0;
    }
    return lse - z[static_cast<std::size_t>(label)];
}

} // namespace

Gradients ste_backward(const QuantModel& model, const Sample& sample) {
    require_trainable(model);
    if (sample.x.size() != shape_size(model.input_shape)) throw DomainError("sample size does not match model input");
    const ForwardTrace t = trace_forward(model, sample.x, true);
    std::vector<double> grad;
    Gradients g;
    g.loss = loss_and_grad(t.output, sample.label, &grad);
    g.per_layer.resize(model.layers.size());
    for (std::size_t li = model.layers.size(); li-- > 0;) {
        const Layer& l = model.layers[li];
        const std::vector<double>& in = t.inputs[li];
        if (l.kind == LayerKind::FullyConnected) {
            const std::size_t out = l.weight_shape[0], n_in = l.weight_shape[1];
            const bool sign = model.uses_sign(li);
            auto& gw = g.per_layer[li];
            gw.assign(out * n_in, 0.0);
            std::vector<double> gin(n_in, 0.0);
            for (std::size_t o = 0; o < out; ++o)
                for (std::size_t i = 0; i < n_in; ++i) {
                    const std::size_t k = o * n_in + i;
                    gw[k] = grad[o] * in[i];  // d sign(w)/dw passed straight through
                    const double w = sign ? static_cast<double>(binarize(l.weights[k])) : l.weights[k];
                    gin[i] += grad[o] * w;
                }
            grad = std::move(gin);
        } else {
            for (std::size_t k = 0; k < grad.size(); ++k) {
                const double z = in[k];
                const bool pass = l.quantize ? (z > 0.0 && z < l.range_hi) : z > 0.0;
                if (!pass) grad[k] = 0.0;
            }
        }
    }
    return g;
}

double surrogate_loss(const QuantModel& model, const Sample& sample) {
    require_trainable(model);
    const ForwardTrace t = trace_forward(model, sample.x, false);
    return loss_and_grad(t.output, sample.label, nullptr);
}

TrainResult ste_train(const QuantModel& model, const Dataset& data, const TrainOptions& options) {
    require_trainable(model);
    if (data.empty()) throw DomainError("training set is empty");
    if (options.batch_size == 0) throw DomainError("batch size must be at least 1");
    require_finite(options.learning_rate, "learning rate");

    TrainResult result;
    result.model = model;
    QuantModel& m = result.model;
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto mean_loss = [&]() {
        double total = 0.0;
        for (const auto& s : data) total += loss_and_grad(trace_forward(m, s.x, true).output, s.label, nullptr);
        return total / static_cast<double>(data.size());
    };

    // Units whose binarized fan-in is all negative never fire on non-negative
    // inputs and stop receiving gradient, so long runs can decay; keep the
    // lowest-loss snapshot.
    QuantModel best = m;
    double best_loss = mean_loss();
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        const std::uint64_t shuffle_seed = derive_seed(options.seed, epoch);
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(shuffle_seed, i) * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop = std::min(order.size(), start + options.batch_size);
            std::vector<std::vector<double>> acc(m.layers.size());
            for (std::size_t b = start; b < stop; ++b) {
                Gradients g = ste_backward(m, data[order[b]]);
                for (std::size_t li = 0; li < m.layers.size(); ++li) {
                    if (g.per_layer[li].empty()) continue;
                    if (acc[li].empty()) acc[li].assign(g.per_layer[li].size(), 0.0);
                    for (std::size_t k = 0; k < acc[li].size(); ++k) acc[li][k] += g.per_layer[li][k];
                }
            }
            const double scale = options.learning_rate / static_cast<double>(stop - start);
            for (std::size_t li = 0; li < m.layers.size(); ++li)
                for (std::size_t k = 0; k < acc[li].size(); ++k) m.layers[li].weights[k] -= scale * acc[li][k];
        }
        result.epoch_loss.push_back(mean_loss());
        if (result.epoch_loss.back() < best_loss) {
            best_loss = result.epoch_loss.back();
            best = m;
            result.best_epoch = epoch + 1;
        }
    }
    m = std::move(best);
    result.train_accuracy = accuracy(m, data);
    return result;
}

double accuracy(const QuantModel& model, const Dataset& data, BnMode mode) {
    if (data.empty()) return 0.0;
    std::size_t correct = 0;
    for (const auto& s : data) {
        const auto r = reference_inference(model, Tensor(model.input_shape, s.x), mode);
        if (r.predicted == static_cast<std::size_t>(s.label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

} // namespace mrbnn
