// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "rcsnet/detect.hpp"
#include "rcsnet/error.hpp"
#include "rcsnet/random.hpp"

using namespace rcsnet;

namespace {

Image random_image(int w, int h, Rng& rng) {
    Image img(w, h);
    for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

Detection det(double cx, double cy, double w, double h, double conf, int cls = 0) {
    return Detection{Box{cx, cy, w, h}, conf, cls};
}

std::vector<Detection> random_boxes(Rng& rng, int n, int classes) {
    std::vector<Detection> d;
    for (int i = 0; i < n; ++i)
        d.push_back(det(rng.uniform_double(0, 100), rng.uniform_double(0, 100), rng.uniform_double(5, 40),
                        rng.uniform_double(5, 40), std::round(rng.uniform_double(0, 1) * 20) / 20,
                        rng.uniform_int(0, classes - 1)));
    return d;
}

} // namespace

TEST(Letterbox, SquareNoOp) {
    Rng rng(1);
    const auto r = letterbox(random_image(640, 640, rng));
    EXPECT_DOUBLE_EQ(r.meta.scale, 1.0);
    EXPECT_EQ(r.meta.pad_left, 0);
    EXPECT_EQ(r.meta.pad_top, 0);
    EXPECT_EQ(r.tensor.shape(), (Shape{1, 3, 640, 640}));
}

TEST(Letterbox, AlignedRectangle) {
    Rng rng(2);
    const auto r = letterbox(random_image(640, 320, rng));
    EXPECT_DOUBLE_EQ(r.meta.scale, 1.0);
    EXPECT_EQ(r.tensor.shape(), (Shape{1, 3, 320, 640}));
    EXPECT_EQ(r.meta.pad_top, 0);
}

TEST(Letterbox, UpscaleRoundTrip) {
    Rng rng(3);
    const Image img = random_image(600, 300, rng);
    const auto r = letterbox(img);
    EXPECT_DOUBLE_EQ(r.meta.scale, 640.0 / 600.0);
    EXPECT_EQ(r.tensor.shape(), (Shape{1, 3, 320, 640}));
    EXPECT_EQ(r.meta.pad_left, 0);
    EXPECT_EQ(r.meta.pad_top, 0);
    for (int t = 0; t < 50; ++t) {
        const double x1 = rng.uniform_double(0, 500), y1 = rng.uniform_double(0, 250);
        const Box orig = Box::from_corners(x1, y1, x1 + rng.uniform_double(5, 90), y1 + rng.uniform_double(5, 45));
        const Box lb{orig.cx * r.meta.scale + r.meta.pad_left, orig.cy * r.meta.scale + r.meta.pad_top,
                     orig.w * r.meta.scale, orig.h * r.meta.scale};
        const auto back = unletterbox({Detection{lb, 0.9, 0}}, r.meta);
        ASSERT_EQ(back.size(), 1u);
        EXPECT_NEAR(back[0].box.x1(), orig.x1(), 1.0);
        EXPECT_NEAR(back[0].box.y2(), orig.y2(), 1.0);
    }
}

TEST(Letterbox, SquareCanvasPadsWithGrey) {
    Rng rng(4);
    const auto r = letterbox(random_image(320, 160, rng), 64, 32, true);
    EXPECT_EQ(r.tensor.shape(), (Shape{1, 3, 64, 64}));
    EXPECT_DOUBLE_EQ(r.meta.scale, 0.2);
    EXPECT_EQ(r.meta.pad_top, 16);
    EXPECT_FLOAT_EQ(r.tensor.at(0, 1, 0, 0), 114.0f / 255.0f);
    EXPECT_FLOAT_EQ(r.tensor.at(0, 1, 63, 63), 114.0f / 255.0f);
}

TEST(Letterbox, PreservesAspectWithOneScale) {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const int w = rng.uniform_int(10, 900), h = rng.uniform_int(10, 900);
        const auto r = letterbox(random_image(w, h, rng));
        EXPECT_DOUBLE_EQ(r.meta.scale, 640.0 / std::max(w, h));
        EXPECT_EQ(r.tensor.w() % 32, 0);
        EXPECT_EQ(r.tensor.h() % 32, 0);
    }
}

TEST(Decode, ZeroCellArithmetic) {
    Tensor out(Shape{1, 12, 1, 1});  // nc = 1
    const std::array<AnchorBox, 2> anchors{AnchorBox{87, 90}, AnchorBox{127, 139}};
    const auto d = decode_head(out, anchors, 32, 0.0);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_DOUBLE_EQ(d[0].box.cx, 16.0);
    EXPECT_DOUBLE_EQ(d[0].box.cy, 16.0);
    EXPECT_DOUBLE_EQ(d[0].box.w, 87.0);
    EXPECT_DOUBLE_EQ(d[0].box.h, 90.0);
    EXPECT_DOUBLE_EQ(d[0].confidence, 0.25);
    EXPECT_TRUE(decode_head(out, anchors, 32, 1.0).empty());
}

TEST(Decode, MatchesPerCellOracle) {
    Rng rng(6);
    const int nc = 3, per = 5 + nc;
    const Tensor out = rng.tensor(Shape{2, 2 * per, 5, 4}, -4, 4);
    const std::array<AnchorBox, 2> anchors{AnchorBox{10, 20}, AnchorBox{30, 15}};
    const auto got = decode_head(out, anchors, 16, 0.1, 1);
    std::vector<Detection> want;
    auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 4; ++j) {
                auto v = [&](int f) { return static_cast<double>(out.at(1, a * per + f, i, j)); };
                int cls = 0;
                for (int k = 1; k < nc; ++k)
                    if (v(5 + k) > v(5 + cls)) cls = k;
                const double conf = sig(v(4)) * sig(v(5 + cls));
                if (conf < 0.1) continue;
                const double gw = 2 * sig(v(2)), gh = 2 * sig(v(3));
                want.push_back(det((2 * sig(v(0)) - 0.5 + j) * 16, (2 * sig(v(1)) - 0.5 + i) * 16,
                                   gw * gw * anchors[a].w, gh * gh * anchors[a].h, conf, cls));
            }
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
        EXPECT_NEAR(got[k].box.cx, want[k].box.cx, 1e-9);
        EXPECT_NEAR(got[k].box.cy, want[k].box.cy, 1e-9);
        EXPECT_NEAR(got[k].box.w, want[k].box.w, 1e-9);
        EXPECT_NEAR(got[k].box.h, want[k].box.h, 1e-9);
        EXPECT_NEAR(got[k].confidence, want[k].confidence, 1e-12);
        EXPECT_EQ(got[k].class_id, want[k].class_id);
    }
}

TEST(Decode, MonotoneInObjectness) {
    Rng rng(7);
    Tensor out = rng.tensor(Shape{1, 12, 6, 6}, -3, 3);
    const std::array<AnchorBox, 2> anchors{AnchorBox{10, 10}, AnchorBox{20, 20}};
    const auto before = decode_head(out, anchors, 8, 0.3);
    for (int a = 0; a < 2; ++a)
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) out.at(0, a * 6 + 4, i, j) += 1.0f;
    const auto after = decode_head(out, anchors, 8, 0.3);
    for (const auto& d : before) {
        const bool found = std::any_of(after.begin(), after.end(),
                                       [&](const Detection& e) { return e.box == d.box && e.confidence >= d.confidence; });
        EXPECT_TRUE(found);
    }
}

TEST(Decode, ChannelMismatchIsShapeError) {
    try {
        (void)decode_head(Tensor(Shape{1, 11, 2, 2}), {AnchorBox{1, 1}, AnchorBox{2, 2}}, 16, 0.25);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Shape);
    }
}

TEST(Nms, TrivialCases) {
    EXPECT_TRUE(nms({}).empty());
    const auto one = nms({det(5, 5, 4, 4, 0.3)});
    ASSERT_EQ(one.size(), 1u);
    const auto two = nms({det(5, 5, 4, 4, 0.8), det(5, 5, 4, 4, 0.9)});
    ASSERT_EQ(two.size(), 1u);
    EXPECT_DOUBLE_EQ(two[0].confidence, 0.9);
    // different classes never suppress each other
    EXPECT_EQ(nms({det(5, 5, 4, 4, 0.8, 0), det(5, 5, 4, 4, 0.9, 1)}).size(), 2u);
}

TEST(Nms, MatchesQuadraticOracle) {
    Rng rng(8);
    for (int t = 0; t < 200; ++t) {
        const auto boxes = random_boxes(rng, 50, 1 + t % 3);
        const auto got = nms(boxes, 0.45);
        const auto idx = oracle::nms(boxes, 0.45);
        ASSERT_EQ(got.size(), idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) EXPECT_EQ(got[k], boxes[idx[k]]);
    }
}

TEST(Nms, AntichainAndSorted) {
    Rng rng(9);
    const auto kept = nms(random_boxes(rng, 80, 2), 0.5);
    for (std::size_t i = 0; i < kept.size(); ++i)
        for (std::size_t j = i + 1; j < kept.size(); ++j) {
            EXPECT_GE(kept[i].confidence, kept[j].confidence);
            if (kept[i].class_id == kept[j].class_id) EXPECT_LT(box_iou(kept[i].box, kept[j].box), 0.5);
        }
}

TEST(Nms, ThresholdOutOfRange) {
    try {
        (void)nms({det(1, 1, 1, 1, 0.5)}, 1.5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Precondition);
    }
}

TEST(Unletterbox, IdentityAndArithmetic) {
    const TransformMeta id{1.0, 0, 0, 100, 100};
    const auto same = unletterbox({det(40, 50, 10, 20, 0.5)}, id);
    ASSERT_EQ(same.size(), 1u);
    EXPECT_DOUBLE_EQ(same[0].box.cx, 40);
    EXPECT_DOUBLE_EQ(same[0].box.h, 20);
    const TransformMeta m{2.0, 10, 0, 100, 100};
    const auto moved = unletterbox({det(30, 40, 8, 8, 0.5)}, m);
    ASSERT_EQ(moved.size(), 1u);
    EXPECT_DOUBLE_EQ(moved[0].box.cx, 10);
    EXPECT_DOUBLE_EQ(moved[0].box.cy, 20);
    EXPECT_DOUBLE_EQ(moved[0].box.w, 4);
}

TEST(Unletterbox, ClipsAndDropsOutside) {
    const TransformMeta m{1.0, 0, 0, 50, 50};
    const auto out = unletterbox({det(0, 25, 20, 10, 0.5), det(80, 80, 10, 10, 0.5)}, m);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_DOUBLE_EQ(out[0].box.x1(), 0.0);
    EXPECT_DOUBLE_EQ(out[0].box.w, 10.0);
}

TEST(DetectionText, FormatAndParse) {
    const Detection d = det(12.5, 7.25, 3, 4.125, 0.875, 2);
    EXPECT_EQ(format_detection(d), "2 12.500000 7.250000 3.000000 4.125000 0.875000");
    std::stringstream ss;
    write_detections(ss, {d, d});
    const auto back = parse_detections(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0], d);
    std::stringstream bad("0 1 2 3\n");
    EXPECT_THROW((void)parse_detections(bad), Error);
}

TEST(Pnm, ParsesP6AndP5) {
    const std::string p6 = std::string("P6\n# comment\n2 1\n255\n") + std::string("\x01\x02\x03\x04\x05\x06", 6);
    const Image a = parse_pnm(p6);
    EXPECT_EQ(a.width, 2);
    EXPECT_EQ(a.pixel(1, 0)[2], 6);
    const Image b = parse_pnm(std::string("P5 1 1 255\n") + "\x7f");
    EXPECT_EQ(b.pixel(0, 0)[0], 0x7f);
    EXPECT_EQ(b.pixel(0, 0)[2], 0x7f);
}

TEST(Pnm, RejectsMalformed) {
    auto code = [](const std::string& s) {
        try {
            (void)parse_pnm(s);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Shape;
    };
    EXPECT_EQ(code("P3\n1 1\n255\n0 0 0"), ErrorCode::Input);
    EXPECT_EQ(code("P6\n2 2\n255\n\x01\x02"), ErrorCode::Input);
    EXPECT_EQ(code("P6\n1 1\n65535\n\x01\x02\x03\x04\x05\x06"), ErrorCode::Input);
}

TEST(Detect, ZeroWeightModelIsDeterministic) {
    Model m = build_model(ModelConfig::nano(), 0);
    zero_weights(m);
    Rng rng(10);
    const auto a = detect(m, random_image(300, 200, rng));
    const auto b = detect(m, random_image(300, 200, rng));
    EXPECT_EQ(a.detections, b.detections);
    EXPECT_GT(a.times.preprocess_ns, 0);
    EXPECT_GT(a.times.forward_ns, 0);
    EXPECT_GT(a.times.postprocess_ns, 0);
    EXPECT_EQ(a.times.preprocess_ns + a.times.forward_ns + a.times.postprocess_ns, a.times.total_ns);
}
