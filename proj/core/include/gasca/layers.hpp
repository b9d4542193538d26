#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gasca/param.hpp"
#include "gasca/rng.hpp"
#include "gasca/tensor.hpp"

namespace gasca {

enum class LayerKind : std::uint8_t { conv, conv_transpose, dense, leaky_relu, sigmoid };

const char* layer_kind_name(LayerKind kind);

/// Static description of one layer. Parametric kinds (conv, conv_transpose,
/// dense) get weights/bias at Layer construction time.
struct LayerSpec {
    LayerKind kind = LayerKind::conv;
    int in_channels = 0;   // dense: input features
    int out_channels = 0;  // dense: output features
    int kernel_size = 0;
    int stride = 1;
    int padding = 0;
    double alpha = 0.0;  // leaky_relu slope

    static LayerSpec conv2d(int in_c, int out_c, int kernel, int stride, int padding);
    static LayerSpec conv_transpose2d(int in_c, int out_c, int kernel, int stride, int padding);
    static LayerSpec dense(int in_features, int out_features);
    static LayerSpec leaky_relu(double alpha);
    static LayerSpec sigmoid();

    bool parametric() const {
        return kind == LayerKind::conv || kind == LayerKind::conv_transpose || kind == LayerKind::dense;
    }
    void validate() const;
};

// --- stateless layer math -------------------------------------------------
//
// Convolution is cross-correlation (no kernel flip), NCHW layout.
// conv weights: (out_c, in_c, k, k). conv_transpose weights: (in_c, out_c, k, k),
// so conv_transpose2d_forward with a conv's weight tensor is the exact adjoint
// of conv2d_forward under the same stride/padding.

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride, int padding);

struct ConvGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};

ConvGrads conv2d_backward(const Tensor& input, const Tensor& weights, int stride, int padding,
                          const Tensor& upstream);

Tensor conv_transpose2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride,
                                int padding);

ConvGrads conv_transpose2d_backward(const Tensor& input, const Tensor& weights, int stride, int padding,
                                    const Tensor& upstream);

// Flattens trailing dims; y = W x + b per batch row. weights: (out, in).
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

ConvGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& upstream);

Tensor activation_forward(const Tensor& x, LayerKind kind, double alpha);

// leaky_relu differentiates via x, sigmoid via y; pass both.
Tensor activation_backward(const Tensor& x, const Tensor& y, LayerKind kind, double alpha,
                           const Tensor& upstream);

std::vector<int> layer_output_shape(const LayerSpec& spec, const std::vector<int>& input_shape);

// --- stateful layer -------------------------------------------------------

/// One layer with its parameters and the forward cache needed by backward.
/// backward() must follow the forward() it differentiates; single logical
/// thread per instance.
class Layer {
public:
    explicit Layer(LayerSpec spec);              // zero-initialized parameters
    Layer(LayerSpec spec, SeededRng& rng);       // uniform +-sqrt(6/(fan_in+fan_out)), zero bias

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& upstream, bool accumulate_param_grads = true);

    std::vector<int> output_shape(const std::vector<int>& input_shape) const {
        return layer_output_shape(spec_, input_shape);
    }

    const LayerSpec& spec() const { return spec_; }
    bool has_params() const { return spec_.parametric(); }
    Parameter& weights() { return weights_; }
    const Parameter& weights() const { return weights_; }
    Parameter& bias() { return bias_; }
    const Parameter& bias() const { return bias_; }
    std::vector<Parameter*> parameters();

private:
    LayerSpec spec_;
    Parameter weights_;
    Parameter bias_;
    Tensor input_cache_;
    Tensor output_cache_;
};

}  // namespace gasca
