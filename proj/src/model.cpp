#include "retinet/model.hpp"

#include <algorithm>
#include <cmath>

namespace retinet {

void LayerSpec::validate() const {
    switch (kind) {
    case LayerKind::Conv2d:
        if (in_channels < 1 || out_channels < 1)
            throw ConfigError(tag + ": conv channels must be positive");
        if (kernel_size < 1) throw ConfigError(tag + ": kernel size must be positive");
        if (padding < 0) throw ConfigError(tag + ": padding must be non-negative");
        if (stride < 1) throw ConfigError(tag + ": stride must be positive");
        break;
    case LayerKind::MaxPool2d:
        if (pool_size < 1 || pool_stride < 1)
            throw ConfigError(tag + ": pool size/stride must be positive");
        break;
    case LayerKind::Dense:
        if (in_features < 1 || out_features < 1)
            throw ConfigError(tag + ": dense features must be positive");
        break;
    case LayerKind::Dropout:
        if (dropout_p < 0.0f || dropout_p >= 1.0f)
            throw ConfigError(tag + ": dropout p must be in [0,1)");
        break;
    default:
        break;
    }
}

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::LeNet5 ? "lenet5" : "retilenet";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lenet5") return ModelKind::LeNet5;
    if (name == "retilenet") return ModelKind::RetiLeNet;
    throw ConfigError("unknown model '" + name + "' (expected lenet5 or retilenet)");
}

void ModelSpec::validate() const {
    if (in_channels != 1 && in_channels != 3)
        throw ConfigError("model: in_channels must be 1 or 3");
    if (input_size != 28 && input_size != 32)
        throw ConfigError("model: unsupported input_size (expected 28 or 32)");
    if (kernel_size < 1 || kernel_size % 2 == 0)
        throw ConfigError("model: precortical kernel_size must be odd");
    if (dropout_p < 0.0f || dropout_p >= 1.0f)
        throw ConfigError("model: dropout_p must be in [0,1)");
    if (num_classes < 2) throw ConfigError("model: num_classes must be >= 2");
}

namespace {

// ------------------------------------------------------------- layer impls

struct Conv2dLayer final : Layer {
    Conv2dLayer(const LayerSpec& s, Rng& rng)
        : Layer(s.tag), stride(s.stride), padding(s.padding) {
        const int fan_in = s.in_channels * s.kernel_size * s.kernel_size;
        const float limit = std::sqrt(6.0f / static_cast<float>(fan_in));
        weight = {tag() + ".weight",
                  Tensor::uniform({s.out_channels, s.in_channels, s.kernel_size, s.kernel_size},
                                  -limit, limit, rng),
                  Tensor({s.out_channels, s.in_channels, s.kernel_size, s.kernel_size})};
        bias = {tag() + ".bias", Tensor({s.out_channels}), Tensor({s.out_channels})};
    }

    Tensor forward(const Tensor& in, bool, Rng*) override {
        cached_input = in;
        return conv2d_forward(in, weight.value, bias.value, stride, padding);
    }
    Tensor backward(const Tensor& grad_out) override {
        ConvGrads g = conv2d_backward(grad_out, cached_input, weight.value, stride, padding);
        weight.grad = std::move(g.weight);
        bias.grad = std::move(g.bias);
        return std::move(g.input);
    }
    std::vector<Param*> params() override { return {&weight, &bias}; }

    int stride, padding;
    Param weight, bias;
    Tensor cached_input;
};

struct MaxPoolLayer final : Layer {
    explicit MaxPoolLayer(const LayerSpec& s)
        : Layer(s.tag), size(s.pool_size), stride(s.pool_stride) {}

    Tensor forward(const Tensor& in, bool, Rng*) override {
        input_shape = in.shape();
        cached = maxpool2d_forward(in, size, stride);
        return cached.output;
    }
    Tensor backward(const Tensor& grad_out) override {
        return maxpool2d_backward(grad_out, cached, input_shape);
    }

    int size, stride;
    PoolResult cached;
    std::vector<int> input_shape;
};

struct DenseLayer final : Layer {
    DenseLayer(const LayerSpec& s, Rng& rng) : Layer(s.tag) {
        const float limit = std::sqrt(6.0f / static_cast<float>(s.in_features));
        weight = {tag() + ".weight",
                  Tensor::uniform({s.out_features, s.in_features}, -limit, limit, rng),
                  Tensor({s.out_features, s.in_features})};
        bias = {tag() + ".bias", Tensor({s.out_features}), Tensor({s.out_features})};
    }

    Tensor forward(const Tensor& in, bool, Rng*) override {
        cached_input = in;
        return dense_forward(in, weight.value, bias.value);
    }
    Tensor backward(const Tensor& grad_out) override {
        DenseGrads g = dense_backward(grad_out, cached_input, weight.value);
        weight.grad = std::move(g.weight);
        bias.grad = std::move(g.bias);
        return std::move(g.input);
    }
    std::vector<Param*> params() override { return {&weight, &bias}; }

    Param weight, bias;
    Tensor cached_input;
};

struct TanhLayer final : Layer {
    explicit TanhLayer(const LayerSpec& s) : Layer(s.tag) {}
    Tensor forward(const Tensor& in, bool, Rng*) override {
        cached_output = tanh_forward(in);
        return cached_output;
    }
    Tensor backward(const Tensor& grad_out) override {
        return tanh_backward(grad_out, cached_output);
    }
    Tensor cached_output;
};

struct ReluLayer final : Layer {
    explicit ReluLayer(const LayerSpec& s) : Layer(s.tag) {}
    Tensor forward(const Tensor& in, bool, Rng*) override {
        cached_input = in;
        return relu_forward(in);
    }
    Tensor backward(const Tensor& grad_out) override {
        return relu_backward(grad_out, cached_input);
    }
    Tensor cached_input;
};

struct DropoutLayer final : Layer {
    explicit DropoutLayer(const LayerSpec& s) : Layer(s.tag), p(s.dropout_p) {}
    Tensor forward(const Tensor& in, bool training, Rng* rng) override {
        if (training && p > 0.0f && rng == nullptr)
            throw ConfigError(tag() + ": training-mode dropout needs an rng");
        Rng unused(0);
        DropoutResult r = dropout_forward(in, p, training, rng ? *rng : unused);
        mask = std::move(r.mask);
        return std::move(r.output);
    }
    Tensor backward(const Tensor& grad_out) override {
        return dropout_backward(grad_out, mask);
    }
    float p;
    Tensor mask;
};

struct FlattenLayer final : Layer {
    explicit FlattenLayer(const LayerSpec& s) : Layer(s.tag) {}
    Tensor forward(const Tensor& in, bool, Rng*) override {
        input_shape = in.shape();
        const int n = in.dim(0);
        const int features = static_cast<int>(in.numel()) / n;
        return Tensor({n, features}, in.vec());
    }
    Tensor backward(const Tensor& grad_out) override {
        return Tensor(input_shape, grad_out.vec());
    }
    std::vector<int> input_shape;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& s, Rng& rng) {
    s.validate();
    switch (s.kind) {
    case LayerKind::Conv2d:    return std::make_unique<Conv2dLayer>(s, rng);
    case LayerKind::MaxPool2d: return std::make_unique<MaxPoolLayer>(s);
    case LayerKind::Dense:     return std::make_unique<DenseLayer>(s, rng);
    case LayerKind::Tanh:      return std::make_unique<TanhLayer>(s);
    case LayerKind::ReLU:      return std::make_unique<ReluLayer>(s);
    case LayerKind::Dropout:   return std::make_unique<DropoutLayer>(s);
    case LayerKind::Flatten:   return std::make_unique<FlattenLayer>(s);
    }
    throw ConfigError("unknown layer kind");
}

LayerSpec conv_spec(std::string tag, int in_c, int out_c, int k, int pad) {
    LayerSpec s;
    s.kind = LayerKind::Conv2d;
    s.tag = std::move(tag);
    s.in_channels = in_c;
    s.out_channels = out_c;
    s.kernel_size = k;
    s.stride = 1;
    s.padding = pad;
    return s;
}

LayerSpec plain_spec(LayerKind kind, std::string tag) {
    LayerSpec s;
    s.kind = kind;
    s.tag = std::move(tag);
    return s;
}

LayerSpec pool_spec(std::string tag) {
    LayerSpec s;
    s.kind = LayerKind::MaxPool2d;
    s.tag = std::move(tag);
    s.pool_size = 2;
    s.pool_stride = 2;
    return s;
}

LayerSpec dense_spec(std::string tag, int in_f, int out_f) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.tag = std::move(tag);
    s.in_features = in_f;
    s.out_features = out_f;
    return s;
}

LayerSpec dropout_spec(std::string tag, float p) {
    LayerSpec s;
    s.kind = LayerKind::Dropout;
    s.tag = std::move(tag);
    s.dropout_p = p;
    return s;
}

} // namespace

std::vector<LayerSpec> model_layer_specs(const ModelSpec& spec) {
    spec.validate();
    std::vector<LayerSpec> out;
    const int n = spec.in_channels;

    if (spec.name == ModelKind::RetiLeNet) {
        const int k = spec.kernel_size;
        const int pad = (k - 1) / 2;  // preserves the spatial dims
        for (int i = 1; i <= 3; ++i) {
            const std::string idx = std::to_string(i);
            out.push_back(conv_spec("precortical.conv" + idx, n, n, k, pad));
            out.push_back(dropout_spec("precortical.drop" + idx, spec.dropout_p));
            out.push_back(plain_spec(LayerKind::Tanh, "precortical.tanh" + idx));
        }
    }

    // 28x28 inputs are padded up so the backbone sees the 32x32 geometry.
    const int pad1 = spec.input_size == 28 ? 2 : 0;
    out.push_back(conv_spec("backbone.conv1", n, 6, 5, pad1));
    out.push_back(plain_spec(LayerKind::ReLU, "backbone.relu1"));
    out.push_back(pool_spec("backbone.pool1"));
    out.push_back(conv_spec("backbone.conv2", 6, 16, 5, 0));
    out.push_back(plain_spec(LayerKind::ReLU, "backbone.relu2"));
    out.push_back(pool_spec("backbone.pool2"));
    out.push_back(plain_spec(LayerKind::Flatten, "backbone.flatten"));
    out.push_back(dense_spec("backbone.fc1", 400, 120));
    out.push_back(plain_spec(LayerKind::ReLU, "backbone.relu3"));
    out.push_back(dense_spec("backbone.fc2", 120, 84));
    out.push_back(plain_spec(LayerKind::ReLU, "backbone.relu4"));
    out.push_back(dense_spec("backbone.fc3", 84, spec.num_classes));
    return out;
}

Model build_model(const ModelSpec& spec, Rng& rng) {
    Model m;
    m.spec_ = spec;
    m.layer_specs_ = model_layer_specs(spec);
    for (const LayerSpec& ls : m.layer_specs_)
        m.layers_.push_back(make_layer(ls, rng));
    return m;
}

Tensor Model::forward(const Tensor& batch, bool training, Rng* rng,
                      const std::string& tap_tag, Tensor* tap_out) {
    if (batch.rank() != 4 || batch.dim(1) != spec_.in_channels ||
        batch.dim(2) != spec_.input_size || batch.dim(3) != spec_.input_size)
        throw ConfigError("model: batch shape " + batch.shape_str() +
                          " does not match spec");
    if (!tap_tag.empty() && !has_layer(tap_tag))
        throw ConfigError("model: no layer tagged '" + tap_tag + "'");

    Tensor x = batch;
    for (auto& layer : layers_) {
        x = layer->forward(x, training, rng);
        if (!tap_tag.empty() && layer->tag() == tap_tag && tap_out != nullptr)
            *tap_out = x;
    }
    return x;
}

void Model::backward(const Tensor& grad_logits) {
    Tensor g = grad_logits;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
        g = (*it)->backward(g);
}

std::vector<Param*> Model::params() {
    std::vector<Param*> out;
    for (auto& layer : layers_)
        for (Param* p : layer->params()) out.push_back(p);
    return out;
}

std::vector<Tensor*> Model::param_values() {
    std::vector<Tensor*> out;
    for (Param* p : params()) out.push_back(&p->value);
    return out;
}

std::vector<const Tensor*> Model::param_grads() const {
    std::vector<const Tensor*> out;
    for (auto& layer : const_cast<Model*>(this)->layers_)
        for (Param* p : layer->params()) out.push_back(&p->grad);
    return out;
}

void Model::zero_grad() {
    for (Param* p : params()) p->grad.fill(0.0f);
}

size_t Model::param_count() const {
    size_t n = 0;
    for (auto& layer : const_cast<Model*>(this)->layers_)
        for (Param* p : layer->params()) n += p->value.numel();
    return n;
}

bool Model::has_layer(const std::string& tag) const {
    for (const auto& layer : layers_)
        if (layer->tag() == tag) return true;
    return false;
}

LayerStats compute_stats(const std::string& tag, std::vector<float> values) {
    if (values.empty()) throw ConfigError("stats: empty sample");
    LayerStats s;
    s.layer_tag = tag;
    s.sample_count = static_cast<int64_t>(values.size());

    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double h = q * static_cast<double>(values.size() - 1);
        const size_t lo = static_cast<size_t>(h);
        if (lo + 1 >= values.size()) return values.back();
        const double frac = h - static_cast<double>(lo);
        return static_cast<float>(values[lo] + frac * (values[lo + 1] - values[lo]));
    };
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    const float iqr = s.q3 - s.q1;
    s.whisker_low = std::max(values.front(), s.q1 - 1.5f * iqr);
    s.whisker_high = std::min(values.back(), s.q3 + 1.5f * iqr);

    double sum = 0.0;
    for (float v : values) sum += v;
    s.mean = static_cast<float>(sum / static_cast<double>(values.size()));
    double sq = 0.0;
    for (float v : values) {
        const double d = v - s.mean;
        sq += d * d;
    }
    s.stddev = static_cast<float>(std::sqrt(sq / static_cast<double>(values.size())));
    return s;
}

std::pair<LayerStats, LayerStats> capture_layer_stats(
    Model& model, const Tensor& images, const std::string& layer_tag) {
    Tensor tapped;
    model.forward(images, /*training=*/false, nullptr, layer_tag, &tapped);
    LayerStats before = compute_stats("input", images.vec());
    LayerStats after = compute_stats(layer_tag, tapped.vec());
    return {before, after};
}

} // namespace retinet
