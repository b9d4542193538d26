#include "gasca/model.hpp"

#include <sstream>
#include <stdexcept>

namespace gasca {

std::string Shape3::str() const {
    std::ostringstream os;
    os << "(" << c << "x" << h << "x" << w << ")";
    return os.str();
}

namespace {

Shape3 chain_output_shape(const std::vector<Layer>& layers, Shape3 in, const char* who) {
    std::vector<int> shape = {1, in.c, in.h, in.w};
    for (const Layer& l : layers) shape = l.output_shape(shape);
    if (shape.size() != 4)
        throw std::invalid_argument(std::string(who) + ": layer chain does not preserve NCHW structure");
    return Shape3{shape[1], shape[2], shape[3]};
}

void require_batch_shape(const Tensor& x, Shape3 expect, const char* who) {
    if (x.rank() != 4 || x.dim(1) != expect.c || x.dim(2) != expect.h || x.dim(3) != expect.w)
        throw std::invalid_argument(std::string(who) + ": input shape " + x.shape_str() +
                                    " does not match expected (N," + std::to_string(expect.c) + "," +
                                    std::to_string(expect.h) + "," + std::to_string(expect.w) + ")");
}

Tensor run_forward(std::vector<Layer>& layers, const Tensor& x) {
    Tensor cur = x;
    for (Layer& l : layers) cur = l.forward(cur);
    return cur;
}

Tensor run_backward(std::vector<Layer>& layers, const Tensor& upstream, bool accumulate) {
    Tensor cur = upstream;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) cur = it->backward(cur, accumulate);
    return cur;
}

void collect_params(std::vector<Layer>& layers, std::vector<Parameter*>& out) {
    for (Layer& l : layers)
        for (Parameter* p : l.parameters()) out.push_back(p);
}

}  // namespace

ShallowAutoencoder::ShallowAutoencoder(int stage_index, Shape3 input_shape, std::vector<Layer> encoder,
                                       std::vector<Layer> decoder)
    : stage_index_(stage_index),
      input_shape_(input_shape),
      encoder_(std::move(encoder)),
      decoder_(std::move(decoder)) {
    if (encoder_.empty() || decoder_.empty())
        throw std::invalid_argument("ShallowAutoencoder: encoder and decoder must be nonempty");
    code_shape_ = chain_output_shape(encoder_, input_shape_, "ShallowAutoencoder");
    const Shape3 restored = chain_output_shape(decoder_, code_shape_, "ShallowAutoencoder");
    if (!(restored == input_shape_))
        throw std::invalid_argument("ShallowAutoencoder: decoder output " + restored.str() +
                                    " does not restore encoder input " + input_shape_.str());
    if (code_shape_.numel() > input_shape_.numel())
        throw std::invalid_argument("ShallowAutoencoder: code " + code_shape_.str() +
                                    " has more elements than input " + input_shape_.str());
}

Tensor ShallowAutoencoder::encode_forward(const Tensor& x) {
    require_batch_shape(x, input_shape_, "ShallowAutoencoder::encode");
    return run_forward(encoder_, x);
}

Tensor ShallowAutoencoder::decode_forward(const Tensor& code) {
    require_batch_shape(code, code_shape_, "ShallowAutoencoder::decode");
    return run_forward(decoder_, code);
}

Tensor ShallowAutoencoder::encode_backward(const Tensor& upstream, bool accumulate) {
    return run_backward(encoder_, upstream, accumulate);
}

Tensor ShallowAutoencoder::decode_backward(const Tensor& upstream, bool accumulate) {
    return run_backward(decoder_, upstream, accumulate);
}

std::vector<Parameter*> ShallowAutoencoder::parameters() {
    std::vector<Parameter*> out;
    collect_params(encoder_, out);
    collect_params(decoder_, out);
    return out;
}

Tensor GeneratorStack::encode(const Tensor& x) {
    if (empty()) throw std::logic_error("GeneratorStack::encode on empty stack");
    Tensor cur = x;
    for (auto& st : stages_) {
        if (block_hook) block_hook("xi" + std::to_string(st.stage_index()));
        cur = st.encode_forward(cur);
    }
    return cur;
}

Tensor GeneratorStack::reconstruct(const Tensor& x) {
    Tensor code = encode(x);
    Tensor cur = std::move(code);
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        if (block_hook) block_hook("delta" + std::to_string(it->stage_index()));
        cur = it->decode_forward(cur);
    }
    return cur;
}

Tensor GeneratorStack::backward(const Tensor& grad_output, bool accumulate) {
    if (empty()) throw std::logic_error("GeneratorStack::backward on empty stack");
    // reconstruct ran xi_1..xi_m, delta_m..delta_1; reverse order here.
    Tensor cur = grad_output;
    for (auto& st : stages_) cur = st.decode_backward(cur, accumulate);
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) cur = it->encode_backward(cur, accumulate);
    return cur;
}

void GeneratorStack::push_stage(ShallowAutoencoder stage) {
    if (!empty() && !(stage.input_shape() == code_shape()))
        throw std::invalid_argument("GeneratorStack::push_stage: stage input " + stage.input_shape().str() +
                                    " does not match current code shape " + code_shape().str());
    stages_.push_back(std::move(stage));
}

Shape3 GeneratorStack::input_shape() const {
    if (empty()) throw std::logic_error("GeneratorStack::input_shape on empty stack");
    return stages_.front().input_shape();
}

Shape3 GeneratorStack::code_shape() const {
    if (empty()) throw std::logic_error("GeneratorStack::code_shape on empty stack");
    return stages_.back().code_shape();
}

std::vector<Parameter*> GeneratorStack::parameters() {
    std::vector<Parameter*> out;
    for (auto& st : stages_)
        for (Parameter* p : st.parameters()) out.push_back(p);
    return out;
}

ShallowDiscriminator::ShallowDiscriminator(int stage_index, Shape3 input_shape, std::vector<Layer> features,
                                           std::vector<Layer> head)
    : stage_index_(stage_index),
      input_shape_(input_shape),
      features_(std::move(features)),
      head_(std::move(head)) {
    if (features_.empty() || head_.empty())
        throw std::invalid_argument("ShallowDiscriminator: features and head must be nonempty");
    feature_shape_ = chain_output_shape(features_, input_shape_, "ShallowDiscriminator");
    // Head must map the flattened feature block to one probability.
    std::vector<int> shape = {1, feature_shape_.c, feature_shape_.h, feature_shape_.w};
    for (const Layer& l : head_) shape = l.output_shape(shape);
    if (shape != std::vector<int>{1, 1})
        throw std::invalid_argument("ShallowDiscriminator: head must produce (batch, 1) probabilities");
}

Tensor ShallowDiscriminator::features_forward(const Tensor& x) {
    require_batch_shape(x, input_shape_, "ShallowDiscriminator::features");
    return run_forward(features_, x);
}

Tensor ShallowDiscriminator::head_forward(const Tensor& f) { return run_forward(head_, f); }

Tensor ShallowDiscriminator::backward(const Tensor& upstream, bool accumulate) {
    Tensor cur = run_backward(head_, upstream, accumulate);
    return run_backward(features_, cur, accumulate);
}

std::vector<Parameter*> ShallowDiscriminator::parameters() {
    std::vector<Parameter*> out;
    collect_params(features_, out);
    collect_params(head_, out);
    return out;
}

Tensor DiscriminatorStack::discriminate(const Tensor& x) {
    if (empty()) throw std::logic_error("DiscriminatorStack::discriminate on empty stack");
    require_batch_shape(x, input_shape(), "DiscriminatorStack::discriminate");
    Tensor cur = x;
    for (auto& b : blocks_) {
        if (block_hook) block_hook("phi" + std::to_string(b.stage_index));
        cur = run_forward(b.layers, cur);
    }
    if (block_hook) block_hook("h" + std::to_string(head_stage_));
    return run_forward(head_, cur);
}

Tensor DiscriminatorStack::backward(const Tensor& grad_prob, bool accumulate) {
    if (empty()) throw std::logic_error("DiscriminatorStack::backward on empty stack");
    Tensor cur = run_backward(head_, grad_prob, accumulate);
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
        cur = run_backward(it->layers, cur, accumulate);
    return cur;
}

void DiscriminatorStack::push_stage(ShallowDiscriminator stage) {
    if (!empty() && !(stage.input_shape() == feature_shape()))
        throw std::invalid_argument("DiscriminatorStack::push_stage: stage input " + stage.input_shape().str() +
                                    " does not match current feature shape " + feature_shape().str());
    FeatureBlock b{stage.stage_index(), stage.input_shape(), stage.feature_shape(), std::move(stage.features())};
    blocks_.push_back(std::move(b));
    head_ = std::move(stage.head());  // retire the previous head
    head_stage_ = blocks_.back().stage_index;
}

Shape3 DiscriminatorStack::input_shape() const {
    if (empty()) throw std::logic_error("DiscriminatorStack::input_shape on empty stack");
    return blocks_.front().input_shape;
}

Shape3 DiscriminatorStack::feature_shape() const {
    if (empty()) throw std::logic_error("DiscriminatorStack::feature_shape on empty stack");
    return blocks_.back().output_shape;
}

std::vector<Parameter*> DiscriminatorStack::parameters() {
    std::vector<Parameter*> out;
    for (auto& b : blocks_) collect_params(b.layers, out);
    collect_params(head_, out);
    return out;
}

namespace {

constexpr double kLeakySlope = 0.2;

void require_downsample_compatible(Shape3 in, const ConvGeometry& geo, const char* who) {
    if (in.h % geo.stride != 0 || in.w % geo.stride != 0)
        throw std::invalid_argument(std::string(who) + ": spatial dims " + in.str() +
                                    " must be divisible by stride " + std::to_string(geo.stride) +
                                    " for an exact mirrored decoder");
}

}  // namespace

ShallowAutoencoder make_shallow_autoencoder(int stage_index, Shape3 input_shape, int hidden_channels,
                                            LayerKind output_activation, SeededRng& rng, ConvGeometry geo) {
    require_downsample_compatible(input_shape, geo, "make_shallow_autoencoder");
    std::vector<Layer> encoder;
    encoder.emplace_back(LayerSpec::conv2d(input_shape.c, hidden_channels, geo.kernel_size, geo.stride, geo.padding),
                         rng);
    encoder.emplace_back(LayerSpec::leaky_relu(kLeakySlope));
    std::vector<Layer> decoder;
    decoder.emplace_back(
        LayerSpec::conv_transpose2d(hidden_channels, input_shape.c, geo.kernel_size, geo.stride, geo.padding), rng);
    decoder.emplace_back(output_activation == LayerKind::sigmoid ? LayerSpec::sigmoid()
                                                                 : LayerSpec::leaky_relu(kLeakySlope));
    return ShallowAutoencoder(stage_index, input_shape, std::move(encoder), std::move(decoder));
}

ShallowDiscriminator make_shallow_discriminator(int stage_index, Shape3 input_shape, int hidden_channels,
                                                SeededRng& rng, ConvGeometry geo) {
    require_downsample_compatible(input_shape, geo, "make_shallow_discriminator");
    std::vector<Layer> features;
    features.emplace_back(
        LayerSpec::conv2d(input_shape.c, hidden_channels, geo.kernel_size, geo.stride, geo.padding), rng);
    features.emplace_back(LayerSpec::leaky_relu(kLeakySlope));
    const std::int64_t flat =
        static_cast<std::int64_t>(hidden_channels) * (input_shape.h / geo.stride) * (input_shape.w / geo.stride);
    std::vector<Layer> head;
    head.emplace_back(LayerSpec::dense(static_cast<int>(flat), 1), rng);
    head.emplace_back(LayerSpec::sigmoid());
    return ShallowDiscriminator(stage_index, input_shape, std::move(features), std::move(head));
}

}  // namespace gasca
