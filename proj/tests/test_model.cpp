// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rcsnet/error.hpp"
#include "rcsnet/model.hpp"
#include "rcsnet/random.hpp"

using namespace rcsnet;
namespace fs = std::filesystem;

namespace {

ModelConfig tiny() {
    ModelConfig cfg;
    cfg.input_size = 64;
    cfg.stage_channels = {8, 8, 16, 16, 32};
    cfg.osa_depths = {1, 1, 2, 1};
    cfg.neck_depths = {1, 2};
    cfg.num_classes = 2;
    return cfg;
}

// Parameter tally written from the layer list, not from the graph.
std::size_t block_params(int ci, int co, int s, bool deployed) {
    if (deployed) return 9u * ci * co + co;
    std::size_t n = (9u * ci * co + co + 4u * co) + (1u * ci * co + co + 4u * co);
    if (ci == co && s == 1) n += 4u * co;
    return n;
}
std::size_t osa_params(int c, int n, bool d) { return n * block_params(c / 2, c / 2, 1, d) + 3u * c * c + c; }
std::size_t conv_params(int ci, int co) { return 1u * ci * co + co; }
std::size_t head_params(int c, int hc, bool d) { return 1u * c * hc + hc + (d ? 0u : 1u * c + hc); }

std::size_t tally(const ModelConfig& cfg, bool d) {
    const auto& ch = cfg.stage_channels;
    std::size_t t = block_params(3, ch[0], 1, d);
    for (int s = 1; s <= 4; ++s) t += block_params(ch[s - 1], ch[s], 2, d) + osa_params(ch[s], cfg.osa_depths[s - 1], d);
    const int c4 = ch[3], c5 = ch[4], hc = cfg.head_channels();
    t += conv_params(c5, c4) + conv_params(2 * c4, c4) + osa_params(c4, cfg.neck_depths[0], d);
    t += block_params(c4, c4, 2, d) + conv_params(c4 + c5, c5) + osa_params(c5, cfg.neck_depths[1], d);
    t += block_params(c4, c4, 1, d) + head_params(c4, hc, d) + block_params(c5, c5, 1, d) + head_params(c5, hc, d);
    return t;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("rcsnet_test_" + name); }

ErrorCode load_error(const ModelConfig& cfg, const fs::path& p) {
    try {
        (void)load_weights(cfg, p);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Shape;  // sentinel: no error
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST(Config, NanoParamCountsMatchTally) {
    const Model m = build_model(ModelConfig::nano(), 0);
    EXPECT_EQ(m.param_count(), tally(ModelConfig::nano(), false));
    EXPECT_EQ(m.param_count(), 2743408u);  // frozen
    const Model d = reparameterize_model(m);
    EXPECT_EQ(d.param_count(), tally(ModelConfig::nano(), true));
    EXPECT_EQ(d.param_count(), 2519688u);  // frozen
}

TEST(Config, TinyParamCountsMatchTally) {
    const Model m = build_model(tiny(), 1);
    EXPECT_EQ(m.param_count(), tally(tiny(), false));
    EXPECT_EQ(reparameterize_model(m).param_count(), tally(tiny(), true));
}

TEST(Config, HeadAnchorsTwoPerHead) {
    const ModelConfig cfg = ModelConfig::nano();
    const auto a16 = cfg.head_anchors(0);
    const auto a32 = cfg.head_anchors(1);
    EXPECT_EQ(a16[0], (AnchorBox{87, 90}));
    EXPECT_EQ(a16[1], (AnchorBox{127, 139}));
    EXPECT_EQ(a32[0], (AnchorBox{154, 171}));
    EXPECT_EQ(a32[1], (AnchorBox{191, 240}));
    EXPECT_EQ(cfg.head_strides, (std::vector<int>{16, 32}));
}

TEST(Config, AnchorSetSortsByArea) {
    const AnchorSet s({{191, 240}, {87, 90}, {154, 171}, {127, 139}});
    EXPECT_EQ(s, AnchorSet::published());
}

TEST(Config, YamlRoundTripAndHash) {
    const ModelConfig cfg = tiny();
    const ModelConfig back = parse_model_config(to_yaml(cfg));
    EXPECT_EQ(to_yaml(back), to_yaml(cfg));
    EXPECT_EQ(config_hash(back), config_hash(cfg));
    EXPECT_EQ(config_hash(cfg).size(), 16u);
    EXPECT_NE(config_hash(cfg), config_hash(ModelConfig::nano()));
}

TEST(Config, RejectsUnknownKeyNamingIt) {
    try {
        (void)parse_model_config("version: 1\nwidth_mult: 2\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Config);
        EXPECT_NE(std::string(e.what()).find("width_mult"), std::string::npos);
    }
}

TEST(Config, RejectsBadVersionAndFields) {
    auto code = [](const std::string& y) {
        try {
            (void)parse_model_config(y);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Shape;
    };
    EXPECT_EQ(code("input_size: 640\n"), ErrorCode::Config);
    EXPECT_EQ(code("version: 2\n"), ErrorCode::Config);
    EXPECT_EQ(code("version: 1\nosa_depths: [1, 0, 1, 1]\n"), ErrorCode::Config);
    EXPECT_EQ(code("version: 1\nanchors: [[10, 10], [20, 20]]\n"), ErrorCode::Config);
    EXPECT_EQ(code("version: 1\ninput_size: 100\n"), ErrorCode::Config);
    EXPECT_EQ(code("version: 1\nstage_channels: [16, 32, 64, 128, 255]\n"), ErrorCode::Config);
}

TEST(Config, ShippedNanoFileEqualsBuiltIn) {
    const ModelConfig cfg = load_model_config(fs::path(RCSNET_SOURCE_DIR) / "configs" / "nano.yaml");
    EXPECT_EQ(to_yaml(cfg), to_yaml(ModelConfig::nano()));
}

TEST(Graph, OutputShapes) {
    const ModelConfig cfg = tiny();
    const Model m = build_model(cfg, 2);
    Rng rng(2);
    const auto out = m.forward(rng.tensor(Shape{2, 3, 64, 64}, 0, 1));
    EXPECT_EQ(out.stride16.shape(), (Shape{2, 2 * (5 + 2), 4, 4}));
    EXPECT_EQ(out.stride32.shape(), (Shape{2, 2 * (5 + 2), 2, 2}));
}

TEST(Graph, WrongInputSizeIsShapeError) {
    const Model m = build_model(tiny(), 2);
    try {
        (void)m.forward(Tensor(Shape{1, 3, 96, 96}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Shape);
    }
}

TEST(Graph, NoDanglingNodes) {
    const Model m = build_model(ModelConfig::nano(), 0);
    auto sinks = m.graph().sinks();
    auto outs = m.graph().outputs();
    std::sort(sinks.begin(), sinks.end());
    std::sort(outs.begin(), outs.end());
    EXPECT_EQ(sinks, outs);
}

TEST(Graph, SeededBuildIsDeterministic) {
    const Model a = build_model(tiny(), 5);
    const Model b = build_model(tiny(), 5);
    Rng rng(1);
    const Tensor x = rng.tensor(Shape{1, 3, 64, 64}, 0, 1);
    EXPECT_EQ(a.forward(x).stride16, b.forward(x).stride16);
}

TEST(Reparam, ModelDeployedHasNoMultibranch) {
    const Model m = build_model(tiny(), 3);
    EXPECT_GT(count_multibranch_blocks(m), 0u);
    const Model d = reparameterize_model(m);
    EXPECT_EQ(count_multibranch_blocks(d), 0u);
    EXPECT_EQ(d.mode(), BlockMode::Deployed);
    try {
        (void)reparameterize_model(d);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::State);
    }
}

TEST(Reparam, TinyModelEquivalent) {
    const Model m = build_model(tiny(), 4);
    const Model d = reparameterize_model(m);
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        const Tensor x = rng.tensor(Shape{1, 3, 64, 64}, 0, 1);
        const auto a = m.forward(x);
        const auto b = d.forward(x);
        EXPECT_LE(max_abs_diff(a.stride16, b.stride16), 1e-3f);
        EXPECT_LE(max_abs_diff(a.stride32, b.stride32), 1e-3f);
    }
}

TEST(Reparam, ZeroWeightsLeavesBiasPattern) {
    Model m = build_model(tiny(), 6);
    zero_weights(m);
    Rng rng(6);
    const auto out = m.forward(rng.tensor(Shape{1, 3, 64, 64}, 0, 1));
    const auto* head = std::get_if<HeadOp>(&m.graph().nodes()[static_cast<std::size_t>(m.graph().outputs()[0])].op);
    ASSERT_NE(head, nullptr);
    for (int c = 0; c < out.stride16.c(); ++c)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) EXPECT_FLOAT_EQ(out.stride16.at(0, c, i, j), head->pred.bias[c]);
}

TEST(Weights, RoundTripBitwise) {
    const fs::path p = temp_file("roundtrip.rcsw");
    const Model m = build_model(tiny(), 7);
    save_weights(m, p);
    const Model back = load_weights(tiny(), p);
    Rng rng(7);
    const Tensor x = rng.tensor(Shape{1, 3, 64, 64}, 0, 1);
    EXPECT_EQ(m.forward(x).stride16, back.forward(x).stride16);
    EXPECT_EQ(m.forward(x).stride32, back.forward(x).stride32);
    const auto info = read_weight_manifest(p);
    EXPECT_EQ(info.version, 1u);
    EXPECT_EQ(info.mode, BlockMode::Train);
    EXPECT_EQ(info.manifest.front().name, "backbone.stem.dense.weight");
    fs::remove(p);
}

TEST(Weights, DeployedRoundTripAndSmaller) {
    const fs::path pt = temp_file("train.rcsw");
    const fs::path pd = temp_file("deployed.rcsw");
    const Model m = build_model(tiny(), 8);
    const Model d = reparameterize_model(m);
    save_weights(m, pt);
    save_weights(d, pd);
    EXPECT_LT(fs::file_size(pd), fs::file_size(pt));
    const Model back = load_weights(tiny(), pd);
    EXPECT_EQ(back.mode(), BlockMode::Deployed);
    Rng rng(8);
    const Tensor x = rng.tensor(Shape{1, 3, 64, 64}, 0, 1);
    EXPECT_EQ(d.forward(x).stride32, back.forward(x).stride32);
    fs::remove(pt);
    fs::remove(pd);
}

TEST(Weights, CorruptionsAreTyped) {
    const fs::path p = temp_file("corrupt.rcsw");
    const fs::path q = temp_file("corrupt2.rcsw");
    save_weights(build_model(tiny(), 9), p);
    const std::string good = slurp(p);

    std::string bad = good;
    bad[0] = 'X';
    spit(q, bad);
    EXPECT_EQ(load_error(tiny(), q), ErrorCode::BadMagic);

    bad = good;
    bad[4] = 9;
    spit(q, bad);
    EXPECT_EQ(load_error(tiny(), q), ErrorCode::VersionMismatch);

    spit(q, good.substr(0, good.size() - 7));
    EXPECT_EQ(load_error(tiny(), q), ErrorCode::Truncated);

    spit(q, good.substr(0, 6));
    EXPECT_EQ(load_error(tiny(), q), ErrorCode::Truncated);

    spit(q, good + "extra");
    EXPECT_EQ(load_error(tiny(), q), ErrorCode::ManifestMismatch);

    ModelConfig other = tiny();
    other.neck_depths = {2, 2};
    EXPECT_EQ(load_error(other, p), ErrorCode::ManifestMismatch);

    EXPECT_EQ(load_error(tiny(), temp_file("does_not_exist.rcsw")), ErrorCode::Io);
    fs::remove(p);
    fs::remove(q);
}

TEST(Weights, ManifestMismatchNamesNode) {
    const fs::path p = temp_file("names.rcsw");
    save_weights(build_model(tiny(), 10), p);
    ModelConfig other = tiny();
    other.stage_channels = {8, 8, 16, 16, 64};
    try {
        (void)load_weights(other, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ManifestMismatch);
        EXPECT_NE(std::string(e.what()).find("backbone.stage4"), std::string::npos) << e.what();
    }
    fs::remove(p);
}
