// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include <cblas.h>

#include "rcsnet/error.hpp"

namespace rcsnet {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::Shape: return "shape error";
    case ErrorCode::Precondition: return "precondition error";
    case ErrorCode::State: return "state error";
    case ErrorCode::Config: return "config error";
    case ErrorCode::Input: return "input error";
    case ErrorCode::Io: return "io error";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::VersionMismatch: return "version mismatch";
    case ErrorCode::ManifestMismatch: return "manifest mismatch";
    case ErrorCode::Truncated: return "truncated file";
    }
    return "error";
}

std::string to_string(const Shape& s) {
    return "(" + std::to_string(s.n) + ", " + std::to_string(s.c) + ", " + std::to_string(s.h) + ", " +
           std::to_string(s.w) + ")";
}

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
    require(shape.valid(), ErrorCode::Shape, "tensor dimensions must be >= 1, got " + to_string(shape));
    data_.assign(shape.numel(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(shape), data_(std::move(data)) {
    require(shape.valid(), ErrorCode::Shape, "tensor dimensions must be >= 1, got " + to_string(shape));
    require(data_.size() == shape.numel(), ErrorCode::Shape,
            "data length " + std::to_string(data_.size()) + " does not match shape " + to_string(shape));
}

Tensor Tensor::batch_slice(int first, int count) const {
    require(first >= 0 && count >= 1 && first + count <= shape_.n, ErrorCode::Shape, "batch slice out of range");
    Shape s = shape_;
    s.n = count;
    const std::size_t item = static_cast<std::size_t>(shape_.c) * shape_.plane();
    std::vector<float> out(data_.begin() + static_cast<std::ptrdiff_t>(first * item),
                           data_.begin() + static_cast<std::ptrdiff_t>((first + count) * item));
    return Tensor(s, std::move(out));
}

float max_abs_diff(const Tensor& a, const Tensor& b) {
    require(a.shape() == b.shape(), ErrorCode::Shape,
            "cannot compare " + to_string(a.shape()) + " with " + to_string(b.shape()));
    float worst = 0.0f;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::fabs(da[i] - db[i]));
    return worst;
}

void ConvParams::validate() const {
    require(!kernel.empty(), ErrorCode::Shape, "conv kernel is empty");
    require(kernel.h() == kernel.w(), ErrorCode::Shape, "conv kernel must be square");
    require(stride >= 1, ErrorCode::Precondition, "conv stride must be positive");
    require(padding >= 0, ErrorCode::Precondition, "conv padding must be non-negative");
    require(static_cast<int>(bias.size()) == c_out(), ErrorCode::Shape,
            "conv bias length " + std::to_string(bias.size()) + " != c_out " + std::to_string(c_out()));
}

ConvParams make_conv(int c_out, int c_in, int k, int stride) {
    ConvParams p;
    p.kernel = Tensor(Shape{c_out, c_in, k, k});
    p.bias.assign(static_cast<std::size_t>(c_out), 0.0f);
    p.stride = stride;
    p.padding = k / 2;
    return p;
}

void BNParams::validate() const {
    const auto c = gamma.size();
    require(beta.size() == c && mean.size() == c && var.size() == c, ErrorCode::Shape,
            "batch-norm parameter lengths differ");
    require(eps > 0.0f, ErrorCode::Precondition, "batch-norm eps must be positive");
    for (float v : var) require(v >= 0.0f, ErrorCode::Precondition, "batch-norm variance must be non-negative");
}

BNParams BNParams::identity(int c, float eps) {
    BNParams b;
    b.gamma.assign(static_cast<std::size_t>(c), 1.0f);
    b.beta.assign(static_cast<std::size_t>(c), 0.0f);
    b.mean.assign(static_cast<std::size_t>(c), 0.0f);
    b.var.assign(static_cast<std::size_t>(c), 1.0f - eps);
    b.eps = eps;
    return b;
}

namespace {

int conv_out_dim(int in, int k, int stride, int padding) {
    const int span = in + 2 * padding - k;
    if (span < 0) return 0;
    return span / stride + 1;
}

// Lays out the receptive fields of one batch item as a (c_in*k*k) x (h_out*w_out) matrix.
void im2col(const float* src, int channels, int h, int w, int k, int stride, int padding, int h_out, int w_out,
            float* col) {
    const std::size_t cols = static_cast<std::size_t>(h_out) * w_out;
    for (int c = 0; c < channels; ++c) {
        const float* plane = src + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                float* row = col + (static_cast<std::size_t>(c) * k * k + ky * k + kx) * cols;
                for (int oy = 0; oy < h_out; ++oy) {
                    const int iy = oy * stride - padding + ky;
                    float* dst = row + static_cast<std::size_t>(oy) * w_out;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst, dst + w_out, 0.0f);
                        continue;
                    }
                    const float* line = plane + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < w_out; ++ox) {
                        const int ix = ox * stride - padding + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? line[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

} // namespace

Tensor conv2d(const Tensor& input, const ConvParams& p) {
    p.validate();
    require(input.c() == p.c_in(), ErrorCode::Shape,
            "conv2d expects " + std::to_string(p.c_in()) + " input channels, got " + std::to_string(input.c()));
    const int k = p.k();
    const int h_out = conv_out_dim(input.h(), k, p.stride, p.padding);
    const int w_out = conv_out_dim(input.w(), k, p.stride, p.padding);
    require(h_out >= 1 && w_out >= 1, ErrorCode::Shape,
            "conv2d output would be empty for input " + to_string(input.shape()));

    Tensor out(Shape{input.n(), p.c_out(), h_out, w_out});
    const int m = p.c_out();
    const int cols = h_out * w_out;
    const int depth = p.c_in() * k * k;
    const bool direct = k == 1 && p.stride == 1 && p.padding == 0;
    std::vector<float> col;
    if (!direct) col.resize(static_cast<std::size_t>(depth) * cols);

    for (int n = 0; n < input.n(); ++n) {
        float* dst = out.plane(n, 0);
        for (int o = 0; o < m; ++o) std::fill(dst + static_cast<std::size_t>(o) * cols,
                                              dst + static_cast<std::size_t>(o + 1) * cols, p.bias[o]);
        const float* rhs = input.plane(n, 0);
        if (!direct) {
            im2col(input.plane(n, 0), input.c(), input.h(), input.w(), k, p.stride, p.padding, h_out, w_out,
                   col.data());
            rhs = col.data();
        }
        cblas_sgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, m, cols, depth, 1.0f, p.kernel.data().data(), depth,
                    rhs, cols, 1.0f, dst, cols);
    }
    return out;
}

Tensor batchnorm_infer(const Tensor& input, const BNParams& b) {
    b.validate();
    require(input.c() == b.channels(), ErrorCode::Shape,
            "batchnorm expects " + std::to_string(b.channels()) + " channels, got " + std::to_string(input.c()));
    Tensor out(input.shape());
    const std::size_t plane = input.shape().plane();
    for (int n = 0; n < input.n(); ++n) {
        for (int c = 0; c < input.c(); ++c) {
            const float scale = b.gamma[c] / std::sqrt(b.var[c] + b.eps);
            const float* src = input.plane(n, c);
            float* dst = out.plane(n, c);
            for (std::size_t i = 0; i < plane; ++i) dst[i] = (src[i] - b.mean[c]) * scale + b.beta[c];
        }
    }
    return out;
}

std::pair<Tensor, Tensor> channel_split(const Tensor& input) {
    require(input.c() % 2 == 0, ErrorCode::Precondition,
            "channel_split needs an even channel count, got " + std::to_string(input.c()));
    const int half = input.c() / 2;
    Shape s = input.shape();
    s.c = half;
    Tensor first(s);
    Tensor second(s);
    const std::size_t chunk = static_cast<std::size_t>(half) * s.plane();
    for (int n = 0; n < input.n(); ++n) {
        const float* src = input.plane(n, 0);
        std::copy(src, src + chunk, first.plane(n, 0));
        std::copy(src + chunk, src + 2 * chunk, second.plane(n, 0));
    }
    return {std::move(first), std::move(second)};
}

int shuffle_source_channel(int p, int channels, int groups) {
    // view as (groups, channels / groups), transpose, flatten
    const int per_group = channels / groups;
    return (p % groups) * per_group + p / groups;
}

Tensor channel_shuffle(const Tensor& input, int groups) {
    require(groups >= 1 && input.c() % groups == 0, ErrorCode::Precondition,
            "channel_shuffle: " + std::to_string(input.c()) + " channels not divisible by " + std::to_string(groups));
    Tensor out(input.shape());
    const std::size_t plane = input.shape().plane();
    for (int n = 0; n < input.n(); ++n) {
        for (int p = 0; p < input.c(); ++p) {
            const float* src = input.plane(n, shuffle_source_channel(p, input.c(), groups));
            std::copy(src, src + plane, out.plane(n, p));
        }
    }
    return out;
}

Tensor concat_channels(std::span<const Tensor* const> parts) {
    require(!parts.empty(), ErrorCode::Shape, "concat of zero tensors");
    Shape s = parts.front()->shape();
    s.c = 0;
    for (const Tensor* t : parts) {
        require(t->n() == s.n && t->h() == s.h && t->w() == s.w, ErrorCode::Shape,
                "concat_channels: " + to_string(parts.front()->shape()) + " vs " + to_string(t->shape()));
        s.c += t->c();
    }
    Tensor out(s);
    for (int n = 0; n < s.n; ++n) {
        float* dst = out.plane(n, 0);
        for (const Tensor* t : parts) {
            const std::size_t len = static_cast<std::size_t>(t->c()) * s.plane();
            const float* src = t->plane(n, 0);
            dst = std::copy(src, src + len, dst);
        }
    }
    return out;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    const Tensor* parts[] = {&a, &b};
    return concat_channels(parts);
}

Tensor maxpool2d(const Tensor& input, int k, int stride) {
    require(k >= 1 && stride >= 1, ErrorCode::Precondition, "maxpool window and stride must be positive");
    require(input.h() >= k && input.w() >= k, ErrorCode::Shape,
            "maxpool window " + std::to_string(k) + " exceeds input " + to_string(input.shape()));
    const int h_out = (input.h() - k) / stride + 1;
    const int w_out = (input.w() - k) / stride + 1;
    Tensor out(Shape{input.n(), input.c(), h_out, w_out});
    for (int n = 0; n < input.n(); ++n) {
        for (int c = 0; c < input.c(); ++c) {
            for (int oy = 0; oy < h_out; ++oy) {
                for (int ox = 0; ox < w_out; ++ox) {
                    float best = input.at(n, c, oy * stride, ox * stride);
                    for (int ky = 0; ky < k; ++ky)
                        for (int kx = 0; kx < k; ++kx)
                            best = std::max(best, input.at(n, c, oy * stride + ky, ox * stride + kx));
                    out.at(n, c, oy, ox) = best;
                }
            }
        }
    }
    return out;
}

Tensor upsample_nearest(const Tensor& input, int factor) {
    require(factor >= 1, ErrorCode::Precondition, "upsample factor must be >= 1");
    Tensor out(Shape{input.n(), input.c(), input.h() * factor, input.w() * factor});
    for (int n = 0; n < input.n(); ++n) {
        for (int c = 0; c < input.c(); ++c) {
            const float* src = input.plane(n, c);
            float* dst = out.plane(n, c);
            const int w_out = out.w();
            for (int y = 0; y < out.h(); ++y) {
                const float* line = src + static_cast<std::size_t>(y / factor) * input.w();
                float* row = dst + static_cast<std::size_t>(y) * w_out;
                for (int x = 0; x < w_out; ++x) row[x] = line[x / factor];
            }
        }
    }
    return out;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

float silu(float x) { return x / (1.0f + std::exp(-x)); }

void activation_inplace(Tensor& t) {
    for (float& v : t.data()) v = silu(v);
}

Tensor activation(const Tensor& input) {
    Tensor out = input;
    activation_inplace(out);
    return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
    require(a.shape() == b.shape(), ErrorCode::Shape,
            "cannot add " + to_string(b.shape()) + " to " + to_string(a.shape()));
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += db[i];
}

int configure_threads_from_env() {
    const char* env = std::getenv("RCSNET_THREADS");
    if (env == nullptr) return 0;
    const int threads = std::atoi(env);
    if (threads < 1) return 0;
    openblas_set_num_threads(threads);
    return threads;
}

} // namespace rcsnet
