// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rcsnet/analysis.hpp"
#include "rcsnet/error.hpp"
#include "rcsnet/random.hpp"

using namespace rcsnet;

TEST(Flops, WorkedExamples) {
    EXPECT_EQ(flops(LayerSpec{32, 3, 64, 64}), 37748736u);
    EXPECT_EQ(flops(LayerSpec{1, 1, 1, 1}), 1u);
    EXPECT_EQ(mac(LayerSpec{32, 3, 64, 64}), 167936u);
    EXPECT_EQ(mac(LayerSpec{1, 1, 1, 1}), 3u);
}

TEST(Flops, EqualsInstrumentedConvCount) {
    Rng rng(13);
    for (int t = 0; t < 30; ++t) {
        const int k = t % 2 ? 3 : 1;
        const int m = rng.uniform_int(1, 10), c1 = rng.uniform_int(1, 8), c2 = rng.uniform_int(1, 8);
        ConvParams p = make_conv(c2, c1, k);
        std::uint64_t count = 0;
        (void)oracle::conv(Tensor(Shape{1, c1, m, m}), p, &count);
        EXPECT_EQ(flops(LayerSpec{static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k),
                                  static_cast<std::uint64_t>(c1), static_cast<std::uint64_t>(c2)}),
                  count);
    }
}

TEST(Mac, ActivationPlusWeightTerms) {
    Rng rng(14);
    for (int t = 0; t < 40; ++t) {
        const std::uint64_t m = rng.uniform_int(1, 64), k = rng.uniform_int(1, 7), c1 = rng.uniform_int(1, 128),
                            c2 = rng.uniform_int(1, 128);
        const std::uint64_t activations = m * m * c1 + m * m * c2;
        const std::uint64_t weights = k * k * c1 * c2;
        EXPECT_EQ(mac(LayerSpec{m, k, c1, c2}), activations + weights);
    }
}

TEST(CompareOsaElan, PaperConstantsAtC64M20) {
    const auto r = compare_osa_elan(64, 20, 4);
    ASSERT_TRUE(r.paper_constants.has_value());
    const auto& k = *r.paper_constants;
    EXPECT_DOUBLE_EQ(k.rcs_osa_flops, 33177600.0);
    EXPECT_DOUBLE_EQ(k.elan_flops, 65536000.0);
    EXPECT_DOUBLE_EQ(k.flops_ratio, 0.50625);
    EXPECT_DOUBLE_EQ(k.rcs_osa_mac, 236544.0);
    // 17*64*400 + 40*4096
    EXPECT_DOUBLE_EQ(k.elan_mac, 599040.0);
}

TEST(CompareOsaElan, StructuralCountOfDeployedOsa) {
    // four fused 3x3 convs on C/2 channels plus the 3C -> C aggregation: 9C^2M^2 + 3C^2M^2
    const auto r = compare_osa_elan(64, 20, 4);
    EXPECT_EQ(r.flops, 12u * 64 * 64 * 20 * 20);
    EXPECT_FALSE(r.notes.empty());
    EXPECT_FALSE(compare_osa_elan(64, 20, 2).paper_constants.has_value());
}

TEST(CompareOsaElan, ZeroDepthIsConfigError) {
    try {
        (void)compare_osa_elan(64, 20, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Config);
    }
}

TEST(ModelComplexity, SingleConvGraph) {
    Graph g;
    const int n = g.add("only", ConvOp{make_conv(8, 3, 3)}, {0});
    g.set_outputs({n});
    const auto r = model_complexity(g, Shape{1, 3, 16, 16});
    EXPECT_EQ(r.flops, flops(LayerSpec{16, 3, 3, 8}));
    EXPECT_EQ(r.mac, mac(LayerSpec{16, 3, 3, 8}));
}

TEST(ModelComplexity, NanoMatchesIndependentTally) {
    const Model m = build_model(ModelConfig::nano(), 0);
    const auto train = model_complexity(m);
    const auto deployed = model_complexity(reparameterize_model(m));
    auto f = [](std::uint64_t mm, std::uint64_t k, std::uint64_t a, std::uint64_t b) { return mm * mm * k * k * a * b; };
    auto blk = [&](std::uint64_t mm, std::uint64_t ci, std::uint64_t co, bool d) {
        return f(mm, 3, ci, co) + (d ? 0 : f(mm, 1, ci, co));
    };
    auto osa = [&](std::uint64_t mm, std::uint64_t c, std::uint64_t n, bool d) {
        return n * blk(mm, c / 2, c / 2, d) + f(mm, 1, 3 * c, c);
    };
    auto total = [&](bool d) {
        std::uint64_t t = blk(640, 3, 16, d);
        t += blk(160, 16, 32, d) + osa(160, 32, 1, d);
        t += blk(80, 32, 64, d) + osa(80, 64, 1, d);
        t += blk(40, 64, 128, d) + osa(40, 128, 2, d);
        t += blk(20, 128, 256, d) + osa(20, 256, 2, d);
        t += f(20, 1, 256, 128) + f(40, 1, 256, 128) + osa(40, 128, 1, d);
        t += blk(20, 128, 128, d) + f(20, 1, 384, 256) + osa(20, 256, 1, d);
        t += blk(40, 128, 128, d) + f(40, 1, 128, 12) + blk(20, 256, 256, d) + f(20, 1, 256, 12);
        return t;
    };
    EXPECT_EQ(train.flops, total(false));
    EXPECT_EQ(deployed.flops, total(true));
    EXPECT_EQ(train.flops, 2415411200u);     // frozen
    EXPECT_EQ(deployed.flops, 2231910400u);  // frozen
    EXPECT_LT(deployed.flops, train.flops);
    EXPECT_LT(deployed.mac, train.mac);
}

TEST(ModelComplexity, MovementRowsHaveZeroFlops) {
    const auto r = model_complexity(build_model(ModelConfig::nano(), 0));
    bool saw_shuffle = false;
    for (const auto& l : r.layers) {
        if (l.spec) continue;
        EXPECT_EQ(l.flops, 0u) << l.name;
        EXPECT_GT(l.mac, 0u) << l.name;
        saw_shuffle |= l.kind == "shuffle";
    }
    EXPECT_TRUE(saw_shuffle);
}

TEST(Labels, ParseAndReject) {
    const auto boxes = parse_labels("0 0.5 0.5 0.2 0.3\n\n1 0.1 0.2 0.05 0.05\n");
    ASSERT_EQ(boxes.size(), 2u);
    EXPECT_EQ(boxes[1].class_id, 1);
    EXPECT_DOUBLE_EQ(boxes[0].h, 0.3);
    try {
        (void)parse_labels("0 0.5 0.5 1.2 0.3\n", "a.txt");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Input);
        EXPECT_NE(std::string(e.what()).find("a.txt:1"), std::string::npos);
    }
    EXPECT_THROW((void)parse_labels("0 0.5 0.5\n"), Error);
}

TEST(CenteredIou, Values) {
    EXPECT_DOUBLE_EQ(centered_iou({10, 10}, {10, 10}), 1.0);
    EXPECT_DOUBLE_EQ(centered_iou({10, 10}, {5, 10}), 0.5);
}

TEST(KMeans, IdenticalBoxesSingleCluster) {
    const std::vector<LabelBox> boxes(20, LabelBox{0, 0.5, 0.5, 0.2, 0.2});
    const auto r = kmeans_anchors_detailed(boxes, KMeansOptions{1, 640, 0});
    ASSERT_EQ(r.anchors.size(), 1u);
    EXPECT_NEAR(r.anchors[0].w, 128.0, 1e-9);
    EXPECT_NEAR(r.anchors[0].h, 128.0, 1e-9);
    EXPECT_FALSE(r.degenerate);
    EXPECT_TRUE(r.converged);
}

TEST(KMeans, DegenerateFlag) {
    const std::vector<LabelBox> boxes(6, LabelBox{0, 0.5, 0.5, 0.2, 0.2});
    EXPECT_TRUE(kmeans_anchors_detailed(boxes, KMeansOptions{4, 640, 0}).degenerate);
}

TEST(KMeans, TwoClustersRecovered) {
    Rng rng(15);
    std::vector<LabelBox> boxes;
    double sum[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 200; ++i) {
        const int c = i % 2;
        const double base = c ? 200.0 : 50.0;
        const double w = base + rng.uniform_double(-3, 3), h = base + rng.uniform_double(-3, 3);
        sum[c][0] += w;
        sum[c][1] += h;
        boxes.push_back(LabelBox{0, 0.5, 0.5, w / 640, h / 640});
    }
    for (std::uint64_t seed : {0u, 1u, 7u}) {
        const AnchorSet a = kmeans_anchors(boxes, 2, 640, seed);
        ASSERT_EQ(a.size(), 2u);
        EXPECT_NEAR(a[0].w, sum[0][0] / 100, 1.0);
        EXPECT_NEAR(a[0].h, sum[0][1] / 100, 1.0);
        EXPECT_NEAR(a[1].w, sum[1][0] / 100, 1.0);
        EXPECT_NEAR(a[1].h, sum[1][1] / 100, 1.0);
    }
}

TEST(KMeans, ObjectiveNonIncreasingAndSeeded) {
    Rng rng(16);
    std::vector<LabelBox> boxes;
    for (int i = 0; i < 300; ++i)
        boxes.push_back(LabelBox{0, 0.5, 0.5, rng.uniform_double(0.02, 0.6), rng.uniform_double(0.02, 0.6)});
    const auto r = kmeans_anchors_detailed(boxes, KMeansOptions{4, 640, 3});
    for (std::size_t i = 1; i < r.objective.size(); ++i) EXPECT_LE(r.objective[i], r.objective[i - 1] + 1e-12);
    const auto again = kmeans_anchors_detailed(boxes, KMeansOptions{4, 640, 3});
    EXPECT_EQ(r.anchors, again.anchors);
    for (std::size_t i = 1; i < r.anchors.size(); ++i) EXPECT_LE(r.anchors[i - 1].area(), r.anchors[i].area());
}

TEST(KMeans, TooFewBoxesRejected) {
    try {
        (void)kmeans_anchors({LabelBox{0, 0.5, 0.5, 0.1, 0.1}}, 2, 640, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Input);
    }
}
