#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gasca/layers.hpp"

namespace gasca {

struct Shape3 {
    int c = 0, h = 0, w = 0;
    bool operator==(const Shape3&) const = default;
    std::int64_t numel() const { return static_cast<std::int64_t>(c) * h * w; }
    std::string str() const;
};

/// One stacking unit: encoder block xi (downsample) and its mirrored decoder
/// block delta (upsample). The decoder restores the encoder's input shape,
/// and the code never has more elements than the input.
class ShallowAutoencoder {
public:
    ShallowAutoencoder(int stage_index, Shape3 input_shape, std::vector<Layer> encoder,
                       std::vector<Layer> decoder);

    Tensor encode_forward(const Tensor& x);
    Tensor decode_forward(const Tensor& code);
    Tensor reconstruct(const Tensor& x) { return decode_forward(encode_forward(x)); }

    // Backwards follow the matching forward call; they return the gradient
    // wrt that call's input.
    Tensor encode_backward(const Tensor& upstream, bool accumulate = true);
    Tensor decode_backward(const Tensor& upstream, bool accumulate = true);

    int stage_index() const { return stage_index_; }
    Shape3 input_shape() const { return input_shape_; }
    Shape3 code_shape() const { return code_shape_; }
    std::vector<Parameter*> parameters();

    std::vector<Layer>& encoder() { return encoder_; }
    const std::vector<Layer>& encoder() const { return encoder_; }
    std::vector<Layer>& decoder() { return decoder_; }
    const std::vector<Layer>& decoder() const { return decoder_; }

private:
    int stage_index_;
    Shape3 input_shape_;
    Shape3 code_shape_;
    std::vector<Layer> encoder_;
    std::vector<Layer> decoder_;
};

/// Ordered shallow autoencoders applied as mirrored nesting:
/// xi_1 ... xi_m, delta_m ... delta_1.
class GeneratorStack {
public:
    /// Optional instrumentation; called with "xi<k>" / "delta<k>" per block.
    std::function<void(const std::string&)> block_hook;

    Tensor encode(const Tensor& x);
    Tensor reconstruct(const Tensor& x);
    /// Backprop through the last reconstruct(); returns grad wrt its input.
    Tensor backward(const Tensor& grad_output, bool accumulate = true);

    /// Appends a stage (new stage innermost). Existing stage parameters are
    /// not touched.
    void push_stage(ShallowAutoencoder stage);

    int depth() const { return static_cast<int>(stages_.size()); }
    bool empty() const { return stages_.empty(); }
    Shape3 input_shape() const;
    Shape3 code_shape() const;
    std::vector<Parameter*> parameters();

    ShallowAutoencoder& stage(int i) { return stages_[static_cast<std::size_t>(i)]; }
    const ShallowAutoencoder& stage(int i) const { return stages_[static_cast<std::size_t>(i)]; }

private:
    std::vector<ShallowAutoencoder> stages_;
};

/// Feature block phi (conv + leaky_relu) plus probability head h
/// (flatten + dense + sigmoid), output one probability per batch item.
class ShallowDiscriminator {
public:
    ShallowDiscriminator(int stage_index, Shape3 input_shape, std::vector<Layer> features,
                         std::vector<Layer> head);

    Tensor features_forward(const Tensor& x);
    Tensor head_forward(const Tensor& f);
    Tensor discriminate(const Tensor& x) { return head_forward(features_forward(x)); }
    /// Backprop through the last discriminate(); returns grad wrt input.
    Tensor backward(const Tensor& upstream, bool accumulate = true);

    int stage_index() const { return stage_index_; }
    Shape3 input_shape() const { return input_shape_; }
    Shape3 feature_shape() const { return feature_shape_; }
    std::vector<Parameter*> parameters();

    std::vector<Layer>& features() { return features_; }
    const std::vector<Layer>& features() const { return features_; }
    std::vector<Layer>& head() { return head_; }
    const std::vector<Layer>& head() const { return head_; }

private:
    int stage_index_;
    Shape3 input_shape_;
    Shape3 feature_shape_;
    std::vector<Layer> features_;
    std::vector<Layer> head_;
};

/// Feature blocks phi_1 ... phi_K plus the newest stage's head; earlier heads
/// are retired when a stage is pushed.
class DiscriminatorStack {
public:
    std::function<void(const std::string&)> block_hook;  // "phi<k>" / "h<k>"

    Tensor discriminate(const Tensor& x);
    Tensor backward(const Tensor& grad_prob, bool accumulate = true);

    void push_stage(ShallowDiscriminator stage);

    int depth() const { return static_cast<int>(blocks_.size()); }
    bool empty() const { return blocks_.empty(); }
    Shape3 input_shape() const;
    Shape3 feature_shape() const;
    std::vector<Parameter*> parameters();

    struct FeatureBlock {
        int stage_index;
        Shape3 input_shape;
        Shape3 output_shape;
        std::vector<Layer> layers;
    };
    FeatureBlock& block(int i) { return blocks_[static_cast<std::size_t>(i)]; }
    const FeatureBlock& block(int i) const { return blocks_[static_cast<std::size_t>(i)]; }
    std::vector<Layer>& head() { return head_; }
    const std::vector<Layer>& head() const { return head_; }
    int head_stage() const { return head_stage_; }

private:
    std::vector<FeatureBlock> blocks_;
    std::vector<Layer> head_;
    int head_stage_ = 0;
};

struct ConvGeometry {
    int kernel_size = 4;
    int stride = 2;
    int padding = 1;
};

/// conv(in->hidden, stride 2) + leaky_relu(0.2) encoder, mirrored
/// conv_transpose decoder closed by output_activation. Requires spatial dims
/// divisible by the stride and hidden channels that keep the code no larger
/// than the input.
ShallowAutoencoder make_shallow_autoencoder(int stage_index, Shape3 input_shape, int hidden_channels,
                                            LayerKind output_activation, SeededRng& rng,
                                            ConvGeometry geo = {});

/// conv(in->hidden, stride 2) + leaky_relu(0.2) feature block, dense + sigmoid head.
ShallowDiscriminator make_shallow_discriminator(int stage_index, Shape3 input_shape, int hidden_channels,
                                                SeededRng& rng, ConvGeometry geo = {});

}  // namespace gasca
