// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/reparam.hpp"

#include <cmath>

#include "rcsnet/error.hpp"

namespace rcsnet {

const char* to_string(BlockMode mode) { return mode == BlockMode::Train ? "train" : "deployed"; }

RepVGGBlock::RepVGGBlock(ConvBn dense, ConvBn pointwise, std::optional<BNParams> identity) {
    dense.conv.validate();
    pointwise.conv.validate();
    dense.bn.validate();
    pointwise.bn.validate();
    require(dense.conv.k() == 3, ErrorCode::Precondition, "RepVGG dense branch must be 3x3");
    require(pointwise.conv.k() == 1, ErrorCode::Precondition, "RepVGG pointwise branch must be 1x1");
    require(dense.conv.c_in() == pointwise.conv.c_in() && dense.conv.c_out() == pointwise.conv.c_out(),
            ErrorCode::Shape, "RepVGG branches disagree on channel counts");
    require(dense.conv.stride == pointwise.conv.stride, ErrorCode::Precondition,
            "RepVGG branches disagree on stride");
    require(dense.conv.padding == 1 && pointwise.conv.padding == 0, ErrorCode::Precondition,
            "RepVGG branches need padding 1 (3x3) and 0 (1x1)");
    require(dense.bn.channels() == dense.conv.c_out() && pointwise.bn.channels() == pointwise.conv.c_out(),
            ErrorCode::Shape, "RepVGG batch-norm width differs from conv output");

    c_in_ = dense.conv.c_in();
    c_out_ = dense.conv.c_out();
    stride_ = dense.conv.stride;
    const bool identity_allowed = c_in_ == c_out_ && stride_ == 1;
    require(identity.has_value() == identity_allowed, ErrorCode::Precondition,
            identity_allowed ? "RepVGG block with c_in == c_out and stride 1 needs an identity branch"
                             : "identity branch requires c_in == c_out and stride 1");
    if (identity) {
        identity->validate();
        require(identity->channels() == c_out_, ErrorCode::Shape, "identity batch-norm width mismatch");
    }
    mode_ = BlockMode::Train;
    dense_ = std::move(dense);
    pointwise_ = std::move(pointwise);
    identity_ = std::move(identity);
}

RepVGGBlock RepVGGBlock::deployed(ConvParams fused) {
    fused.validate();
    require(fused.k() == 3 && fused.padding == 1, ErrorCode::Precondition, "deployed RepVGG conv must be 3x3, pad 1");
    RepVGGBlock blk;
    blk.mode_ = BlockMode::Deployed;
    blk.c_in_ = fused.c_in();
    blk.c_out_ = fused.c_out();
    blk.stride_ = fused.stride;
    blk.fused_ = std::move(fused);
    return blk;
}

const ConvBn& RepVGGBlock::dense() const {
    require(dense_.has_value(), ErrorCode::State, "deployed block has no dense branch");
    return *dense_;
}

const ConvBn& RepVGGBlock::pointwise() const {
    require(pointwise_.has_value(), ErrorCode::State, "deployed block has no pointwise branch");
    return *pointwise_;
}

const ConvParams& RepVGGBlock::fused() const {
    require(fused_.has_value(), ErrorCode::State, "train-mode block has no fused conv");
    return *fused_;
}

ConvBn& RepVGGBlock::dense_mut() {
    require(dense_.has_value(), ErrorCode::State, "deployed block has no dense branch");
    return *dense_;
}

ConvBn& RepVGGBlock::pointwise_mut() {
    require(pointwise_.has_value(), ErrorCode::State, "deployed block has no pointwise branch");
    return *pointwise_;
}

ConvParams& RepVGGBlock::fused_mut() {
    require(fused_.has_value(), ErrorCode::State, "train-mode block has no fused conv");
    return *fused_;
}

Tensor RepVGGBlock::forward(const Tensor& x) const {
    if (mode_ == BlockMode::Deployed) return conv2d(x, *fused_);
    Tensor sum = batchnorm_infer(conv2d(x, dense_->conv), dense_->bn);
    add_inplace(sum, batchnorm_infer(conv2d(x, pointwise_->conv), pointwise_->bn));
    if (identity_) add_inplace(sum, batchnorm_infer(x, *identity_));
    return sum;
}

std::size_t RepVGGBlock::param_count() const {
    if (mode_ == BlockMode::Deployed) return fused_->param_count();
    std::size_t total = dense_->conv.param_count() + dense_->bn.param_count() + pointwise_->conv.param_count() +
                        pointwise_->bn.param_count();
    if (identity_) total += identity_->param_count();
    return total;
}

ConvParams fuse_conv_bn(const ConvParams& p, const BNParams& b) {
    p.validate();
    b.validate();
    require(p.c_out() == b.channels(), ErrorCode::Shape,
            "fuse_conv_bn: conv has " + std::to_string(p.c_out()) + " outputs, batch-norm has " +
                std::to_string(b.channels()));
    ConvParams out = p;
    const std::size_t per_out = p.kernel.numel() / static_cast<std::size_t>(p.c_out());
    auto src = p.kernel.data();
    auto dst = out.kernel.data();
    for (int o = 0; o < p.c_out(); ++o) {
        const double denom = std::sqrt(static_cast<double>(b.var[o]) + b.eps);
        require(denom > 0.0, ErrorCode::Precondition, "batch-norm var + eps must be positive");
        const double scale = b.gamma[o] / denom;
        for (std::size_t i = 0; i < per_out; ++i) {
            const std::size_t idx = o * per_out + i;
            dst[idx] = static_cast<float>(src[idx] * scale);
        }
        out.bias[o] = static_cast<float>(b.beta[o] - b.mean[o] * scale + p.bias[o] * scale);
    }
    return out;
}

ConvParams pad_1x1_to_3x3(const ConvParams& p) {
    p.validate();
    require(p.k() == 1, ErrorCode::Precondition, "pad_1x1_to_3x3 needs a 1x1 kernel, got k=" + std::to_string(p.k()));
    ConvParams out = make_conv(p.c_out(), p.c_in(), 3, p.stride);
    for (int o = 0; o < p.c_out(); ++o)
        for (int i = 0; i < p.c_in(); ++i) out.kernel.at(o, i, 1, 1) = p.kernel.at(o, i, 0, 0);
    out.bias = p.bias;
    return out;
}

ConvParams identity_to_3x3(int channels, const BNParams& b) {
    b.validate();
    require(b.channels() == channels, ErrorCode::Shape, "identity_to_3x3: batch-norm width mismatch");
    ConvParams out = make_conv(channels, channels, 3, 1);
    for (int c = 0; c < channels; ++c) {
        const double scale = b.gamma[c] / std::sqrt(static_cast<double>(b.var[c]) + b.eps);
        out.kernel.at(c, c, 1, 1) = static_cast<float>(scale);
        out.bias[c] = static_cast<float>(b.beta[c] - b.mean[c] * scale);
    }
    return out;
}

namespace {

void accumulate(ConvParams& into, const ConvParams& term) {
    auto dst = into.kernel.data();
    auto src = term.kernel.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    for (std::size_t o = 0; o < into.bias.size(); ++o) into.bias[o] += term.bias[o];
}

} // namespace

ConvParams fuse_block(const RepVGGBlock& blk) {
    require(blk.mode() == BlockMode::Train, ErrorCode::State, "block is already deployed");
    ConvParams fused = fuse_conv_bn(blk.dense().conv, blk.dense().bn);
    accumulate(fused, pad_1x1_to_3x3(fuse_conv_bn(blk.pointwise().conv, blk.pointwise().bn)));
    if (blk.identity()) accumulate(fused, identity_to_3x3(blk.c_out(), *blk.identity()));
    fused.stride = blk.stride();
    fused.padding = 1;
    return fused;
}

RepVGGBlock convert_to_deployed(const RepVGGBlock& blk) { return RepVGGBlock::deployed(fuse_block(blk)); }

BNParams random_bn(int c, Rng& rng, const BlockInit& init) {
    BNParams b;
    b.gamma.resize(static_cast<std::size_t>(c));
    b.beta.resize(b.gamma.size());
    b.mean.resize(b.gamma.size());
    b.var.resize(b.gamma.size());
    rng.fill(b.gamma, init.gamma_lo, init.gamma_hi);
    rng.fill(b.beta, -init.beta_bound, init.beta_bound);
    rng.fill(b.mean, -init.mean_bound, init.mean_bound);
    rng.fill(b.var, init.var_lo, init.var_hi);
    b.eps = init.eps;
    return b;
}

RepVGGBlock random_repvgg_block(int c_in, int c_out, int stride, Rng& rng, const BlockInit& init) {
    auto branch = [&](int k) {
        ConvBn cb{make_conv(c_out, c_in, k, stride), {}};
        rng.fill(cb.conv.kernel, -init.weight_bound, init.weight_bound);
        rng.fill(cb.conv.bias, -init.weight_bound, init.weight_bound);
        cb.bn = random_bn(c_out, rng, init);
        return cb;
    };
    ConvBn dense = branch(3);
    ConvBn pointwise = branch(1);
    std::optional<BNParams> identity;
    if (c_in == c_out && stride == 1) identity = random_bn(c_out, rng, init);
    return RepVGGBlock(std::move(dense), std::move(pointwise), std::move(identity));
}

} // namespace rcsnet
