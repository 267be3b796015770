// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "rcsnet/reparam.hpp"

namespace rcsnet {

/// Channel split -> RepVGG on the first half -> concat with the untouched half -> shuffle.
struct RcsUnit {
    RepVGGBlock block;
    int shuffle_groups = 2;

    int channels() const { return 2 * block.c_in(); }
    BlockMode mode() const { return block.mode(); }
    std::size_t param_count() const { return block.param_count(); }
};

/// n stacked RCS units whose input, midpoint and final outputs are aggregated once by a
/// 1x1 conv (3c -> c) followed by activation.
struct RcsOsa {
    std::vector<RcsUnit> units;
    ConvParams aggregate;

    int depth() const { return static_cast<int>(units.size()); }
    int channels() const { return aggregate.c_out(); }
    BlockMode mode() const;
    std::size_t param_count() const;

    /// 1-based indices of the units feeding the aggregation path: {0 (input), midpoint, n}.
    static std::vector<int> tap_units(int n);
};

/// Observed widths while running an RCS-OSA forward.
struct OsaTrace {
    int concat_channels = 0;
    int tap_count = 0;
    std::vector<int> tap_units;
};

Tensor rcs_forward(const Tensor& x, const RcsUnit& u);
Tensor rcs_osa_forward(const Tensor& x, const RcsOsa& osa, OsaTrace* trace = nullptr);
/// Stride-2 RepVGG block plus activation; output spatial dims are ceil(h / 2).
Tensor downsample_forward(const Tensor& x, const RepVGGBlock& blk);

RcsUnit convert_to_deployed(const RcsUnit& u);
RcsOsa convert_to_deployed(const RcsOsa& osa);

RcsUnit random_rcs_unit(int channels, Rng& rng, const BlockInit& init = {});
RcsOsa random_rcs_osa(int channels, int n, Rng& rng, const BlockInit& init = {});

} // namespace rcsnet
