#include "gasca/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace gasca {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv: return "conv";
        case LayerKind::conv_transpose: return "conv_transpose";
        case LayerKind::dense: return "dense";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::sigmoid: return "sigmoid";
    }
    return "?";
}

LayerSpec LayerSpec::conv2d(int in_c, int out_c, int kernel, int stride, int padding) {
    LayerSpec s;
    s.kind = LayerKind::conv;
    s.in_channels = in_c;
    s.out_channels = out_c;
    s.kernel_size = kernel;
    s.stride = stride;
    s.padding = padding;
    s.validate();
    return s;
}

LayerSpec LayerSpec::conv_transpose2d(int in_c, int out_c, int kernel, int stride, int padding) {
    LayerSpec s;
    s.kind = LayerKind::conv_transpose;
    s.in_channels = in_c;
    s.out_channels = out_c;
    s.kernel_size = kernel;
    s.stride = stride;
    s.padding = padding;
    s.validate();
    return s;
}

LayerSpec LayerSpec::dense(int in_features, int out_features) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.in_channels = in_features;
    s.out_channels = out_features;
    s.validate();
    return s;
}

LayerSpec LayerSpec::leaky_relu(double alpha) {
    LayerSpec s;
    s.kind = LayerKind::leaky_relu;
    s.alpha = alpha;
    s.validate();
    return s;
}

LayerSpec LayerSpec::sigmoid() {
    LayerSpec s;
    s.kind = LayerKind::sigmoid;
    return s;
}

void LayerSpec::validate() const {
    switch (kind) {
        case LayerKind::conv:
        case LayerKind::conv_transpose:
            if (in_channels < 1 || out_channels < 1)
                throw std::invalid_argument(std::string(layer_kind_name(kind)) + ": channels must be >= 1");
            if (kernel_size < 1) throw std::invalid_argument(std::string(layer_kind_name(kind)) + ": kernel_size must be >= 1");
            if (stride < 1) throw std::invalid_argument(std::string(layer_kind_name(kind)) + ": stride must be >= 1");
            if (padding < 0) throw std::invalid_argument(std::string(layer_kind_name(kind)) + ": padding must be >= 0");
            break;
        case LayerKind::dense:
            if (in_channels < 1 || out_channels < 1)
                throw std::invalid_argument("dense: feature counts must be >= 1");
            break;
        case LayerKind::leaky_relu:
            if (!(alpha > 0.0 && alpha < 1.0))
                throw std::invalid_argument("leaky_relu: alpha must lie in (0, 1), got " + std::to_string(alpha));
            break;
        case LayerKind::sigmoid:
            break;
    }
}

namespace {

void require_rank4(const Tensor& t, const char* who) {
    if (t.rank() != 4)
        throw std::invalid_argument(std::string(who) + ": expected NCHW input, got shape " + t.shape_str());
}

void require_shape(const Tensor& t, const std::vector<int>& shape, const char* who, const char* what) {
    if (t.shape() != shape)
        throw std::invalid_argument(std::string(who) + ": " + what + " shape " + t.shape_str() +
                                    " does not match expected " + shape_to_string(shape));
}

int conv_out_extent(int in, int kernel, int stride, int padding) {
    return (in + 2 * padding - kernel) / stride + 1;
}

int conv_transpose_out_extent(int in, int kernel, int stride, int padding) {
    return (in - 1) * stride - 2 * padding + kernel;
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride, int padding) {
    require_rank4(input, "conv2d_forward");
    require_rank4(weights, "conv2d_forward");
    const int N = input.dim(0), C_in = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int C_out = weights.dim(0), K = weights.dim(2);
    if (weights.dim(1) != C_in)
        throw std::invalid_argument("conv2d_forward: input shape " + input.shape_str() +
                                    " has channel count incompatible with weights " + weights.shape_str());
    if (weights.dim(3) != K)
        throw std::invalid_argument("conv2d_forward: non-square kernel " + weights.shape_str());
    require_shape(bias, {C_out}, "conv2d_forward", "bias");
    const int OH = conv_out_extent(H, K, stride, padding);
    const int OW = conv_out_extent(W, K, stride, padding);
    if (OH < 1 || OW < 1)
        throw std::invalid_argument("conv2d_forward: zero-sized output for input " + input.shape_str() +
                                    " with kernel " + weights.shape_str() + " stride " + std::to_string(stride) +
                                    " padding " + std::to_string(padding));

    Tensor out({N, C_out, OH, OW});
    const double* in = input.data();
    const double* w = weights.data();
    double* o = out.data();
    for (int n = 0; n < N; ++n) {
        for (int co = 0; co < C_out; ++co) {
            const double b = bias[co];
            for (int oh = 0; oh < OH; ++oh) {
                for (int ow = 0; ow < OW; ++ow) {
                    double acc = b;
                    const int h0 = oh * stride - padding;
                    const int w0 = ow * stride - padding;
                    for (int ci = 0; ci < C_in; ++ci) {
                        const double* in_c = in + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
                        const double* w_c = w + ((static_cast<std::int64_t>(co) * C_in + ci) * K) * K;
                        for (int kh = 0; kh < K; ++kh) {
                            const int ih = h0 + kh;
                            if (ih < 0 || ih >= H) continue;
                            for (int kw = 0; kw < K; ++kw) {
                                const int iw = w0 + kw;
                                if (iw < 0 || iw >= W) continue;
                                acc += in_c[static_cast<std::int64_t>(ih) * W + iw] * w_c[kh * K + kw];
                            }
                        }
                    }
                    o[((static_cast<std::int64_t>(n) * C_out + co) * OH + oh) * OW + ow] = acc;
                }
            }
        }
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor& input, const Tensor& weights, int stride, int padding,
                          const Tensor& upstream) {
    require_rank4(input, "conv2d_backward");
    const int N = input.dim(0), C_in = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int C_out = weights.dim(0), K = weights.dim(2);
    if (weights.dim(1) != C_in)
        throw std::invalid_argument("conv2d_backward: input shape " + input.shape_str() +
                                    " incompatible with weights " + weights.shape_str());
    const int OH = conv_out_extent(H, K, stride, padding);
    const int OW = conv_out_extent(W, K, stride, padding);
    require_shape(upstream, {N, C_out, OH, OW}, "conv2d_backward", "upstream");

    ConvGrads g{Tensor({N, C_in, H, W}), Tensor(weights.shape()), Tensor({C_out})};
    const double* in = input.data();
    const double* w = weights.data();
    const double* up = upstream.data();
    double* gi = g.input.data();
    double* gw = g.weights.data();
    for (int n = 0; n < N; ++n) {
        for (int co = 0; co < C_out; ++co) {
            double gb = 0.0;
            for (int oh = 0; oh < OH; ++oh) {
                for (int ow = 0; ow < OW; ++ow) {
                    const double u = up[((static_cast<std::int64_t>(n) * C_out + co) * OH + oh) * OW + ow];
                    gb += u;
                    const int h0 = oh * stride - padding;
                    const int w0 = ow * stride - padding;
                    for (int ci = 0; ci < C_in; ++ci) {
                        const double* in_c = in + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
                        double* gi_c = gi + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
                        const double* w_c = w + ((static_cast<std::int64_t>(co) * C_in + ci) * K) * K;
                        double* gw_c = gw + ((static_cast<std::int64_t>(co) * C_in + ci) * K) * K;
                        for (int kh = 0; kh < K; ++kh) {
                            const int ih = h0 + kh;
                            if (ih < 0 || ih >= H) continue;
                            for (int kw = 0; kw < K; ++kw) {
                                const int iw = w0 + kw;
                                if (iw < 0 || iw >= W) continue;
                                gw_c[kh * K + kw] += in_c[static_cast<std::int64_t>(ih) * W + iw] * u;
                                gi_c[static_cast<std::int64_t>(ih) * W + iw] += w_c[kh * K + kw] * u;
                            }
                        }
                    }
                }
            }
            g.bias[co] += gb;
        }
    }
    return g;
}

Tensor conv_transpose2d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias, int stride,
                                int padding) {
    require_rank4(input, "conv_transpose2d_forward");
    require_rank4(weights, "conv_transpose2d_forward");
    const int N = input.dim(0), C_in = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int C_out = weights.dim(1), K = weights.dim(2);
    if (weights.dim(0) != C_in)
        throw std::invalid_argument("conv_transpose2d_forward: input shape " + input.shape_str() +
                                    " has channel count incompatible with weights " + weights.shape_str());
    require_shape(bias, {C_out}, "conv_transpose2d_forward", "bias");
    const int OH = conv_transpose_out_extent(H, K, stride, padding);
    const int OW = conv_transpose_out_extent(W, K, stride, padding);
    if (OH < 1 || OW < 1)
        throw std::invalid_argument("conv_transpose2d_forward: zero-sized output for input " + input.shape_str() +
                                    " with kernel " + weights.shape_str() + " stride " + std::to_string(stride) +
                                    " padding " + std::to_string(padding));

    Tensor out({N, C_out, OH, OW});
    double* o = out.data();
    for (int n = 0; n < N; ++n)
        for (int co = 0; co < C_out; ++co) {
            const double b = bias[co];
            double* o_c = o + ((static_cast<std::int64_t>(n) * C_out + co) * OH) * OW;
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(OH) * OW; ++i) o_c[i] = b;
        }

    const double* in = input.data();
    const double* w = weights.data();
    for (int n = 0; n < N; ++n) {
        for (int ci = 0; ci < C_in; ++ci) {
            const double* in_c = in + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
            for (int ih = 0; ih < H; ++ih) {
                for (int iw = 0; iw < W; ++iw) {
                    const double v = in_c[static_cast<std::int64_t>(ih) * W + iw];
                    const int h0 = ih * stride - padding;
                    const int w0 = iw * stride - padding;
                    for (int co = 0; co < C_out; ++co) {
                        double* o_c = o + ((static_cast<std::int64_t>(n) * C_out + co) * OH) * OW;
                        const double* w_c = w + ((static_cast<std::int64_t>(ci) * C_out + co) * K) * K;
                        for (int kh = 0; kh < K; ++kh) {
                            const int oh = h0 + kh;
                            if (oh < 0 || oh >= OH) continue;
                            for (int kw = 0; kw < K; ++kw) {
                                const int ow = w0 + kw;
                                if (ow < 0 || ow >= OW) continue;
                                o_c[static_cast<std::int64_t>(oh) * OW + ow] += v * w_c[kh * K + kw];
                            }
                        }
                    }
                }
            }
        }
    }
    return out;
}

ConvGrads conv_transpose2d_backward(const Tensor& input, const Tensor& weights, int stride, int padding,
                                    const Tensor& upstream) {
    require_rank4(input, "conv_transpose2d_backward");
    const int N = input.dim(0), C_in = input.dim(1), H = input.dim(2), W = input.dim(3);
    const int C_out = weights.dim(1), K = weights.dim(2);
    if (weights.dim(0) != C_in)
        throw std::invalid_argument("conv_transpose2d_backward: input shape " + input.shape_str() +
                                    " incompatible with weights " + weights.shape_str());
    const int OH = conv_transpose_out_extent(H, K, stride, padding);
    const int OW = conv_transpose_out_extent(W, K, stride, padding);
    require_shape(upstream, {N, C_out, OH, OW}, "conv_transpose2d_backward", "upstream");

    ConvGrads g{Tensor({N, C_in, H, W}), Tensor(weights.shape()), Tensor({C_out})};
    const double* in = input.data();
    const double* w = weights.data();
    const double* up = upstream.data();
    double* gi = g.input.data();
    double* gw = g.weights.data();
    double* gb = g.bias.data();

    for (int n = 0; n < N; ++n)
        for (int co = 0; co < C_out; ++co) {
            const double* up_c = up + ((static_cast<std::int64_t>(n) * C_out + co) * OH) * OW;
            double acc = 0.0;
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(OH) * OW; ++i) acc += up_c[i];
            gb[co] += acc;
        }

    for (int n = 0; n < N; ++n) {
        for (int ci = 0; ci < C_in; ++ci) {
            const double* in_c = in + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
            double* gi_c = gi + ((static_cast<std::int64_t>(n) * C_in + ci) * H) * W;
            for (int ih = 0; ih < H; ++ih) {
                for (int iw = 0; iw < W; ++iw) {
                    const double v = in_c[static_cast<std::int64_t>(ih) * W + iw];
                    const int h0 = ih * stride - padding;
                    const int w0 = iw * stride - padding;
                    double acc = 0.0;
                    for (int co = 0; co < C_out; ++co) {
                        const double* up_c = up + ((static_cast<std::int64_t>(n) * C_out + co) * OH) * OW;
                        const double* w_c = w + ((static_cast<std::int64_t>(ci) * C_out + co) * K) * K;
                        double* gw_c = gw + ((static_cast<std::int64_t>(ci) * C_out + co) * K) * K;
                        for (int kh = 0; kh < K; ++kh) {
                            const int oh = h0 + kh;
                            if (oh < 0 || oh >= OH) continue;
                            for (int kw = 0; kw < K; ++kw) {
                                const int ow = w0 + kw;
                                if (ow < 0 || ow >= OW) continue;
                                const double u = up_c[static_cast<std::int64_t>(oh) * OW + ow];
                                acc += w_c[kh * K + kw] * u;
                                gw_c[kh * K + kw] += v * u;
                            }
                        }
                    }
                    gi_c[static_cast<std::int64_t>(ih) * W + iw] += acc;
                }
            }
        }
    }
    return g;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (input.rank() < 2)
        throw std::invalid_argument("dense_forward: input must have a batch dimension, got " + input.shape_str());
    const int N = input.dim(0);
    const std::int64_t F = input.size() / N;
    const int out_f = weights.dim(0);
    if (weights.rank() != 2 || weights.dim(1) != F)
        throw std::invalid_argument("dense_forward: flattened input " + input.shape_str() +
                                    " does not match weights " + weights.shape_str());
    require_shape(bias, {out_f}, "dense_forward", "bias");

    Tensor out({N, out_f});
    const double* in = input.data();
    const double* w = weights.data();
    for (int n = 0; n < N; ++n) {
        const double* x = in + static_cast<std::int64_t>(n) * F;
        for (int o = 0; o < out_f; ++o) {
            const double* w_row = w + static_cast<std::int64_t>(o) * F;
            double acc = bias[o];
            for (std::int64_t f = 0; f < F; ++f) acc += w_row[f] * x[f];
            out[static_cast<std::int64_t>(n) * out_f + o] = acc;
        }
    }
    return out;
}

ConvGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& upstream) {
    const int N = input.dim(0);
    const std::int64_t F = input.size() / N;
    const int out_f = weights.dim(0);
    if (weights.rank() != 2 || weights.dim(1) != F)
        throw std::invalid_argument("dense_backward: flattened input " + input.shape_str() +
                                    " does not match weights " + weights.shape_str());
    require_shape(upstream, {N, out_f}, "dense_backward", "upstream");

    ConvGrads g{Tensor(input.shape()), Tensor(weights.shape()), Tensor({out_f})};
    const double* in = input.data();
    const double* w = weights.data();
    const double* up = upstream.data();
    double* gi = g.input.data();
    double* gw = g.weights.data();
    for (int n = 0; n < N; ++n) {
        const double* x = in + static_cast<std::int64_t>(n) * F;
        double* gx = gi + static_cast<std::int64_t>(n) * F;
        for (int o = 0; o < out_f; ++o) {
            const double u = up[static_cast<std::int64_t>(n) * out_f + o];
            g.bias[o] += u;
            const double* w_row = w + static_cast<std::int64_t>(o) * F;
            double* gw_row = gw + static_cast<std::int64_t>(o) * F;
            for (std::int64_t f = 0; f < F; ++f) {
                gw_row[f] += x[f] * u;
                gx[f] += w_row[f] * u;
            }
        }
    }
    return g;
}

Tensor activation_forward(const Tensor& x, LayerKind kind, double alpha) {
    Tensor y(x.shape());
    if (kind == LayerKind::leaky_relu) {
        for (std::int64_t i = 0; i < x.size(); ++i) {
            const double v = x[i];
            y[i] = v >= 0.0 ? v : alpha * v;
        }
    } else if (kind == LayerKind::sigmoid) {
        for (std::int64_t i = 0; i < x.size(); ++i) {
            const double v = x[i];
            if (v >= 0.0) {
                y[i] = 1.0 / (1.0 + std::exp(-v));
            } else {
                const double e = std::exp(v);
                y[i] = e / (1.0 + e);
            }
        }
    } else {
        throw std::invalid_argument("activation_forward: kind must be leaky_relu or sigmoid");
    }
    return y;
}

Tensor activation_backward(const Tensor& x, const Tensor& y, LayerKind kind, double alpha,
                           const Tensor& upstream) {
    if (!upstream.same_shape(x))
        throw std::invalid_argument("activation_backward: upstream shape " + upstream.shape_str() +
                                    " does not match input " + x.shape_str());
    Tensor g(x.shape());
    if (kind == LayerKind::leaky_relu) {
        for (std::int64_t i = 0; i < x.size(); ++i) g[i] = (x[i] >= 0.0 ? 1.0 : alpha) * upstream[i];
    } else if (kind == LayerKind::sigmoid) {
        for (std::int64_t i = 0; i < x.size(); ++i) g[i] = y[i] * (1.0 - y[i]) * upstream[i];
    } else {
        throw std::invalid_argument("activation_backward: kind must be leaky_relu or sigmoid");
    }
    return g;
}

std::vector<int> layer_output_shape(const LayerSpec& spec, const std::vector<int>& in) {
    switch (spec.kind) {
        case LayerKind::conv: {
            if (in.size() != 4) throw std::invalid_argument("conv: expected NCHW input shape");
            const int oh = conv_out_extent(in[2], spec.kernel_size, spec.stride, spec.padding);
            const int ow = conv_out_extent(in[3], spec.kernel_size, spec.stride, spec.padding);
            return {in[0], spec.out_channels, oh, ow};
        }
        case LayerKind::conv_transpose: {
            if (in.size() != 4) throw std::invalid_argument("conv_transpose: expected NCHW input shape");
            const int oh = conv_transpose_out_extent(in[2], spec.kernel_size, spec.stride, spec.padding);
            const int ow = conv_transpose_out_extent(in[3], spec.kernel_size, spec.stride, spec.padding);
            return {in[0], spec.out_channels, oh, ow};
        }
        case LayerKind::dense:
            return {in[0], spec.out_channels};
        case LayerKind::leaky_relu:
        case LayerKind::sigmoid:
            return in;
    }
    throw std::invalid_argument("layer_output_shape: unknown kind");
}

namespace {

Tensor make_weights(const LayerSpec& spec) {
    switch (spec.kind) {
        case LayerKind::conv:
            return Tensor({spec.out_channels, spec.in_channels, spec.kernel_size, spec.kernel_size});
        case LayerKind::conv_transpose:
            return Tensor({spec.in_channels, spec.out_channels, spec.kernel_size, spec.kernel_size});
        case LayerKind::dense:
            return Tensor({spec.out_channels, spec.in_channels});
        default:
            return Tensor();
    }
}

void glorot_fill(Tensor& w, const LayerSpec& spec, SeededRng& rng) {
    std::int64_t fan_in = 0, fan_out = 0;
    const std::int64_t kk = static_cast<std::int64_t>(spec.kernel_size) * spec.kernel_size;
    switch (spec.kind) {
        case LayerKind::conv:
        case LayerKind::conv_transpose:
            fan_in = spec.in_channels * kk;
            fan_out = spec.out_channels * kk;
            break;
        case LayerKind::dense:
            fan_in = spec.in_channels;
            fan_out = spec.out_channels;
            break;
        default:
            return;
    }
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::int64_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-a, a);
}

}  // namespace

Layer::Layer(LayerSpec spec) : spec_(spec) {
    spec_.validate();
    if (spec_.parametric()) {
        weights_ = Parameter(make_weights(spec_));
        bias_ = Parameter(Tensor({spec_.out_channels}));
    }
}

Layer::Layer(LayerSpec spec, SeededRng& rng) : Layer(spec) {
    if (spec_.parametric()) glorot_fill(weights_.value, spec_, rng);
}

Tensor Layer::forward(const Tensor& x) {
    input_cache_ = x;
    switch (spec_.kind) {
        case LayerKind::conv:
            output_cache_ = conv2d_forward(x, weights_.value, bias_.value, spec_.stride, spec_.padding);
            break;
        case LayerKind::conv_transpose:
            output_cache_ = conv_transpose2d_forward(x, weights_.value, bias_.value, spec_.stride, spec_.padding);
            break;
        case LayerKind::dense:
            output_cache_ = dense_forward(x, weights_.value, bias_.value);
            break;
        case LayerKind::leaky_relu:
        case LayerKind::sigmoid:
            output_cache_ = activation_forward(x, spec_.kind, spec_.alpha);
            break;
    }
    return output_cache_;
}

Tensor Layer::backward(const Tensor& upstream, bool accumulate_param_grads) {
    if (input_cache_.empty())
        throw std::logic_error("Layer::backward called before forward");
    switch (spec_.kind) {
        case LayerKind::conv: {
            ConvGrads g = conv2d_backward(input_cache_, weights_.value, spec_.stride, spec_.padding, upstream);
            if (accumulate_param_grads) {
                for (std::int64_t i = 0; i < g.weights.size(); ++i) weights_.grad[i] += g.weights[i];
                for (std::int64_t i = 0; i < g.bias.size(); ++i) bias_.grad[i] += g.bias[i];
            }
            return std::move(g.input);
        }
        case LayerKind::conv_transpose: {
            ConvGrads g =
                conv_transpose2d_backward(input_cache_, weights_.value, spec_.stride, spec_.padding, upstream);
            if (accumulate_param_grads) {
                for (std::int64_t i = 0; i < g.weights.size(); ++i) weights_.grad[i] += g.weights[i];
                for (std::int64_t i = 0; i < g.bias.size(); ++i) bias_.grad[i] += g.bias[i];
            }
            return std::move(g.input);
        }
        case LayerKind::dense: {
            ConvGrads g = dense_backward(input_cache_, weights_.value, upstream);
            if (accumulate_param_grads) {
                for (std::int64_t i = 0; i < g.weights.size(); ++i) weights_.grad[i] += g.weights[i];
                for (std::int64_t i = 0; i < g.bias.size(); ++i) bias_.grad[i] += g.bias[i];
            }
            return std::move(g.input);
        }
        case LayerKind::leaky_relu:
        case LayerKind::sigmoid:
            return activation_backward(input_cache_, output_cache_, spec_.kind, spec_.alpha, upstream);
    }
    throw std::logic_error("Layer::backward: unknown kind");
}

std::vector<Parameter*> Layer::parameters() {
    if (!has_params()) return {};
    return {&weights_, &bias_};
}

}  // namespace gasca
