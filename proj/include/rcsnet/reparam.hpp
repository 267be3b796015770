// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "rcsnet/random.hpp"
#include "rcsnet/tensor.hpp"

namespace rcsnet {

enum class BlockMode { Train, Deployed };

const char* to_string(BlockMode mode);

/// A convolution followed by inference-mode batch-norm.
struct ConvBn {
    ConvParams conv;
    BNParams bn;
};

/// Three-branch RepVGG unit (3x3 conv-BN, 1x1 conv-BN, optional identity BN) and its
/// single 3x3 inference form. The identity branch exists iff c_in == c_out and stride == 1.
class RepVGGBlock {
public:
    /// Train-mode block. `dense` must be 3x3, `pointwise` 1x1, both sharing c_in, c_out and stride.
    RepVGGBlock(ConvBn dense, ConvBn pointwise, std::optional<BNParams> identity);

    /// Deployed-mode block holding only the fused 3x3 conv.
    static RepVGGBlock deployed(ConvParams fused);

    BlockMode mode() const { return mode_; }
    int c_in() const { return c_in_; }
    int c_out() const { return c_out_; }
    int stride() const { return stride_; }
    bool has_identity() const { return identity_.has_value(); }

    const ConvBn& dense() const;
    const ConvBn& pointwise() const;
    const std::optional<BNParams>& identity() const { return identity_; }
    const ConvParams& fused() const;

    ConvBn& dense_mut();
    ConvBn& pointwise_mut();
    std::optional<BNParams>& identity_mut() { return identity_; }
    ConvParams& fused_mut();

    /// Sum of the branch outputs (train) or the fused conv output (deployed), before activation.
    Tensor forward(const Tensor& x) const;

    /// Stored reals: all branch parameters in train mode, 9*c_in*c_out + c_out once deployed.
    std::size_t param_count() const;

private:
    RepVGGBlock() = default;

    BlockMode mode_ = BlockMode::Train;
    int c_in_ = 0;
    int c_out_ = 0;
    int stride_ = 1;
    std::optional<ConvBn> dense_;
    std::optional<ConvBn> pointwise_;
    std::optional<BNParams> identity_;
    std::optional<ConvParams> fused_;
};

ConvParams fuse_conv_bn(const ConvParams& p, const BNParams& b);
ConvParams pad_1x1_to_3x3(const ConvParams& p);
ConvParams identity_to_3x3(int channels, const BNParams& b);
/// Collapses a train-mode block into one 3x3 conv (summation order: 3x3, 1x1, identity).
ConvParams fuse_block(const RepVGGBlock& blk);
/// New deployed block holding fuse_block(blk).
RepVGGBlock convert_to_deployed(const RepVGGBlock& blk);

/// Value ranges for randomly generated blocks.
struct BlockInit {
    float weight_bound = 1.0f;
    float gamma_lo = 0.5f, gamma_hi = 1.5f;
    float beta_bound = 0.5f;
    float mean_bound = 0.5f;
    float var_lo = 1e-3f, var_hi = 2.0f;
    float eps = 1e-5f;
};

BNParams random_bn(int c, Rng& rng, const BlockInit& init);
/// Train-mode block; the identity branch is added whenever c_in == c_out and stride == 1.
RepVGGBlock random_repvgg_block(int c_in, int c_out, int stride, Rng& rng, const BlockInit& init = {});

} // namespace rcsnet
