// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcsnet {

/// Dimensions of a rank-4 N x C x H x W tensor. Every dimension is at least 1.
struct Shape {
    int n = 1;
    int c = 1;
    int h = 1;
    int w = 1;

    std::size_t numel() const {
        return static_cast<std::size_t>(n) * c * h * w;
    }
    std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
    bool valid() const { return n >= 1 && c >= 1 && h >= 1 && w >= 1; }

    friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense float32 tensor in row-major NCHW order.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, float fill = 0.0f);
    Tensor(Shape shape, std::vector<float> data);

    const Shape& shape() const { return shape_; }
    int n() const { return shape_.n; }
    int c() const { return shape_.c; }
    int h() const { return shape_.h; }
    int w() const { return shape_.w; }
    std::size_t numel() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    std::span<float> data() { return data_; }
    std::span<const float> data() const { return data_; }
    const std::vector<float>& values() const { return data_; }

    std::size_t offset(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
    }
    float& at(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
    float at(int n, int c, int y, int x) const { return data_[offset(n, c, y, x)]; }

    /// Pointer to the start of one H x W plane.
    float* plane(int n, int c) { return data_.data() + offset(n, c, 0, 0); }
    const float* plane(int n, int c) const { return data_.data() + offset(n, c, 0, 0); }

    /// Copy of the batch items [first, first + count).
    Tensor batch_slice(int first, int count) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_{};
    std::vector<float> data_;
};

/// Max |a - b| over all elements; shapes must match.
float max_abs_diff(const Tensor& a, const Tensor& b);

/// Convolution weights (c_out x c_in x k x k) with per-output bias.
struct ConvParams {
    Tensor kernel;
    std::vector<float> bias;
    int stride = 1;
    int padding = 0;

    int c_out() const { return kernel.n(); }
    int c_in() const { return kernel.c(); }
    int k() const { return kernel.h(); }
    std::size_t param_count() const { return kernel.numel() + bias.size(); }

    /// Checks square kernel, positive stride, and bias length.
    void validate() const;
};

/// Zero-initialized conv with the "same" padding convention (k / 2).
ConvParams make_conv(int c_out, int c_in, int k, int stride = 1);

/// Inference-mode batch-norm statistics.
struct BNParams {
    std::vector<float> gamma;
    std::vector<float> beta;
    std::vector<float> mean;
    std::vector<float> var;
    float eps = 1e-5f;

    int channels() const { return static_cast<int>(gamma.size()); }
    std::size_t param_count() const { return 4 * gamma.size(); }
    void validate() const;

    /// gamma = 1, beta = 0, mean = 0, var = 1 - eps: normalization is the identity.
    static BNParams identity(int c, float eps = 1e-5f);
};

Tensor conv2d(const Tensor& input, const ConvParams& p);
Tensor batchnorm_infer(const Tensor& input, const BNParams& b);
std::pair<Tensor, Tensor> channel_split(const Tensor& input);
/// ShuffleNet permutation: reshape channels to (groups, c / groups), transpose, flatten.
Tensor channel_shuffle(const Tensor& input, int groups);
Tensor concat_channels(const Tensor& a, const Tensor& b);
Tensor concat_channels(std::span<const Tensor* const> parts);
Tensor maxpool2d(const Tensor& input, int k, int stride);
Tensor upsample_nearest(const Tensor& input, int factor);
/// Elementwise SiLU, x * sigmoid(x).
Tensor activation(const Tensor& input);
void activation_inplace(Tensor& t);
/// a += b, shapes must match.
void add_inplace(Tensor& a, const Tensor& b);

float silu(float x);
float sigmoid(float x);

/// Source channel feeding output channel `p` of channel_shuffle(c, groups).
int shuffle_source_channel(int p, int channels, int groups);

/// Caps the BLAS thread pool from RCSNET_THREADS, if set. Returns the applied cap or 0.
int configure_threads_from_env();

} // namespace rcsnet
