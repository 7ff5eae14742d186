#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "retinet/ops.hpp"
#include "retinet/rng.hpp"
#include "retinet/tensor.hpp"

namespace retinet {

enum class LayerKind { Conv2d, MaxPool2d, Dense, Tanh, ReLU, Dropout, Flatten };

struct LayerSpec {
    LayerKind kind;
    std::string tag;
    // Conv2d
    int in_channels = 0, out_channels = 0, kernel_size = 0, stride = 1, padding = 0;
    // MaxPool2d
    int pool_size = 0, pool_stride = 0;
    // Dense
    int in_features = 0, out_features = 0;
    // Dropout
    float dropout_p = 0.0f;

    void validate() const;
};

enum class ModelKind { LeNet5, RetiLeNet };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelSpec {
    ModelKind name = ModelKind::LeNet5;
    int in_channels = 1;      // 1 (MNIST/FashionMNIST) or 3 (SVHN)
    int input_size = 28;      // 28 or 32
    int kernel_size = 7;      // precortical conv size, odd
    float dropout_p = 0.2f;   // precortical dropout
    int num_classes = 10;

    void validate() const;
};

struct Param {
    std::string tag;
    Tensor value;
    Tensor grad;
};

class Layer {
public:
    explicit Layer(std::string tag) : tag_(std::move(tag)) {}
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& in, bool training, Rng* rng) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Param*> params() { return {}; }
    const std::string& tag() const { return tag_; }

private:
    std::string tag_;
};

// Layer list + parameters. Assembled by build_model; the two architectures
// share the identical backbone so accuracy deltas isolate the precortical
// block.
class Model {
public:
    Model() = default;
    Model(Model&&) = default;
    Model& operator=(Model&&) = default;

    const ModelSpec& spec() const { return spec_; }

    // tap_tag, when non-empty, captures the named layer's output into
    // *tap_out. Unknown tag -> ConfigError. rng is required only when
    // training with dropout_p > 0.
    Tensor forward(const Tensor& batch, bool training, Rng* rng = nullptr,
                   const std::string& tap_tag = {}, Tensor* tap_out = nullptr);
    void backward(const Tensor& grad_logits);

    std::vector<Param*> params();
    std::vector<Tensor*> param_values();
    std::vector<const Tensor*> param_grads() const;
    void zero_grad();
    size_t param_count() const;
    bool has_layer(const std::string& tag) const;

    const std::vector<LayerSpec>& layer_specs() const { return layer_specs_; }

    friend Model build_model(const ModelSpec& spec, Rng& rng);

private:
    ModelSpec spec_;
    std::vector<LayerSpec> layer_specs_;
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Expands a ModelSpec into the layer list:
//   RetiLeNet: [Conv(n->n,k,pad=(k-1)/2) -> Dropout(p) -> Tanh] x3, backbone
//   LeNet5:    backbone only
// Backbone: Conv(n->6,5,pad 2 for 28-inputs / 0 for 32) -> ReLU -> MaxPool2 ->
// Conv(6->16,5) -> ReLU -> MaxPool2 -> Flatten -> Dense(400->120) -> ReLU ->
// Dense(120->84) -> ReLU -> Dense(84->classes).
std::vector<LayerSpec> model_layer_specs(const ModelSpec& spec);

// Instantiates layers and initializes weights He-uniform fan-in, biases zero.
Model build_model(const ModelSpec& spec, Rng& rng);

// ---------------------------------------------------------------- stats

// Five-number style summary of an activation batch, for the pixel
// distribution before/after the first precortical conv.
struct LayerStats {
    std::string layer_tag;
    float q1 = 0, median = 0, q3 = 0;
    float whisker_low = 0, whisker_high = 0;  // 1.5*IQR, clamped to observed
    float mean = 0, stddev = 0;
    int64_t sample_count = 0;
};

LayerStats compute_stats(const std::string& tag, std::vector<float> values);

// "before" summarizes the input pixels, "after" the tapped layer's output,
// both over the whole batch in eval mode.
std::pair<LayerStats, LayerStats> capture_layer_stats(
    Model& model, const Tensor& images, const std::string& layer_tag);

// Tag of the layer the Fig-style stats are captured at.
inline const char* kFirstPrecorticalConv = "precortical.conv1";

} // namespace retinet
