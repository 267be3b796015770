// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/rcs.hpp"

#include "rcsnet/error.hpp"

namespace rcsnet {

BlockMode RcsOsa::mode() const {
    require(!units.empty(), ErrorCode::Config, "RCS-OSA needs at least one unit");
    return units.front().mode();
}

std::size_t RcsOsa::param_count() const {
    std::size_t total = aggregate.param_count();
    for (const auto& u : units) total += u.param_count();
    return total;
}

std::vector<int> RcsOsa::tap_units(int n) {
    require(n >= 1, ErrorCode::Config, "RCS-OSA depth must be >= 1, got " + std::to_string(n));
    const int midpoint = n / 2 < 1 ? 1 : n / 2;
    return {0, midpoint, n};
}

Tensor rcs_forward(const Tensor& x, const RcsUnit& u) {
    require(x.c() % 2 == 0, ErrorCode::Precondition, "RCS input needs even channels, got " + std::to_string(x.c()));
    require(x.c() == u.channels(), ErrorCode::Shape,
            "RCS unit expects " + std::to_string(u.channels()) + " channels, got " + std::to_string(x.c()));
    auto [processed, passthrough] = channel_split(x);
    processed = u.block.forward(processed);
    activation_inplace(processed);
    return channel_shuffle(concat_channels(processed, passthrough), u.shuffle_groups);
}

Tensor rcs_osa_forward(const Tensor& x, const RcsOsa& osa, OsaTrace* trace) {
    require(!osa.units.empty(), ErrorCode::Config, "RCS-OSA depth must be >= 1");
    require(x.c() == osa.channels(), ErrorCode::Shape,
            "RCS-OSA expects " + std::to_string(osa.channels()) + " channels, got " + std::to_string(x.c()));
    const std::vector<int> taps = RcsOsa::tap_units(osa.depth());

    // Only the three tapped outputs are kept alive.
    Tensor mid;
    Tensor current = x;
    for (int i = 1; i <= osa.depth(); ++i) {
        current = rcs_forward(current, osa.units[static_cast<std::size_t>(i - 1)]);
        if (i == taps[1]) mid = current;
    }
    const Tensor* parts[] = {&x, &mid, &current};
    Tensor cascade = concat_channels(parts);
    if (trace != nullptr) {
        trace->concat_channels = cascade.c();
        trace->tap_count = 3;
        trace->tap_units = taps;
    }
    Tensor out = conv2d(cascade, osa.aggregate);
    activation_inplace(out);
    return out;
}

Tensor downsample_forward(const Tensor& x, const RepVGGBlock& blk) {
    require(blk.stride() == 2, ErrorCode::Precondition, "downsample block must have stride 2");
    require(!blk.has_identity(), ErrorCode::Precondition, "downsample block cannot carry an identity branch");
    Tensor out = blk.forward(x);
    activation_inplace(out);
    return out;
}

RcsUnit convert_to_deployed(const RcsUnit& u) {
    return RcsUnit{convert_to_deployed(u.block), u.shuffle_groups};
}

RcsOsa convert_to_deployed(const RcsOsa& osa) {
    RcsOsa out;
    out.aggregate = osa.aggregate;
    out.units.reserve(osa.units.size());
    for (const auto& u : osa.units) out.units.push_back(convert_to_deployed(u));
    return out;
}

RcsUnit random_rcs_unit(int channels, Rng& rng, const BlockInit& init) {
    require(channels % 2 == 0, ErrorCode::Precondition, "RCS unit needs even channels");
    return RcsUnit{random_repvgg_block(channels / 2, channels / 2, 1, rng, init), 2};
}

RcsOsa random_rcs_osa(int channels, int n, Rng& rng, const BlockInit& init) {
    require(n >= 1, ErrorCode::Config, "RCS-OSA depth must be >= 1, got " + std::to_string(n));
    RcsOsa osa;
    for (int i = 0; i < n; ++i) osa.units.push_back(random_rcs_unit(channels, rng, init));
    osa.aggregate = make_conv(channels, 3 * channels, 1);
    rng.fill(osa.aggregate.kernel, -init.weight_bound, init.weight_bound);
    rng.fill(osa.aggregate.bias, -init.weight_bound, init.weight_bound);
    return osa;
}

} // namespace rcsnet
