// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/detect.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rcsnet/error.hpp"

namespace rcsnet {

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h) {
    require(w >= 1 && h >= 1, ErrorCode::Input, "image dimensions must be >= 1");
    rgb.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

double box_iou(const Box& a, const Box& b) {
    const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

LetterboxResult letterbox(const Image& img, int target, int stride, bool square) {
    require(img.width >= 1 && img.height >= 1 &&
                img.rgb.size() == static_cast<std::size_t>(img.width) * img.height * 3,
            ErrorCode::Input, "degenerate image");
    require(stride >= 1 && target >= stride && target % stride == 0, ErrorCode::Precondition,
            "letterbox target must be a multiple of the stride");

    const double scale = static_cast<double>(target) / std::max(img.width, img.height);
    const int new_w = std::clamp(static_cast<int>(std::lround(img.width * scale)), 1, target);
    const int new_h = std::clamp(static_cast<int>(std::lround(img.height * scale)), 1, target);
    auto align = [stride](int v) { return (v + stride - 1) / stride * stride; };
    const int canvas_w = square ? target : align(new_w);
    const int canvas_h = square ? target : align(new_h);

    LetterboxResult r;
    r.meta = TransformMeta{scale, (canvas_w - new_w) / 2, (canvas_h - new_h) / 2, img.width, img.height};
    r.tensor = Tensor(Shape{1, 3, canvas_h, canvas_w}, 114.0f / 255.0f);

    std::vector<int> src_x(static_cast<std::size_t>(new_w));
    for (int x = 0; x < new_w; ++x)
        src_x[static_cast<std::size_t>(x)] =
            std::min(img.width - 1, static_cast<int>((x + 0.5) * img.width / new_w));
    for (int y = 0; y < new_h; ++y) {
        const int sy = std::min(img.height - 1, static_cast<int>((y + 0.5) * img.height / new_h));
        for (int x = 0; x < new_w; ++x) {
            const std::uint8_t* px = img.pixel(src_x[static_cast<std::size_t>(x)], sy);
            for (int c = 0; c < 3; ++c)
                r.tensor.at(0, c, y + r.meta.pad_top, x + r.meta.pad_left) = px[c] / 255.0f;
        }
    }
    return r;
}

namespace {

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

} // namespace

std::vector<Detection> decode_head(const Tensor& out, const std::array<AnchorBox, 2>& anchors, int stride,
                                   double conf_thresh, int batch) {
    constexpr int kAnchors = 2;
    require(out.c() % kAnchors == 0 && out.c() / kAnchors > 5, ErrorCode::Shape,
            "head channels " + std::to_string(out.c()) + " do not match 2 * (5 + num_classes)");
    require(batch >= 0 && batch < out.n(), ErrorCode::Shape, "batch index out of range");
    const int per_anchor = out.c() / kAnchors;
    const int num_classes = per_anchor - 5;

    std::vector<Detection> dets;
    for (int a = 0; a < kAnchors; ++a) {
        const int base = a * per_anchor;
        for (int i = 0; i < out.h(); ++i) {
            for (int j = 0; j < out.w(); ++j) {
                const double obj = logistic(out.at(batch, base + 4, i, j));
                int best = 0;
                float best_logit = out.at(batch, base + 5, i, j);
                for (int k = 1; k < num_classes; ++k) {
                    const float v = out.at(batch, base + 5 + k, i, j);
                    if (v > best_logit) {
                        best_logit = v;
                        best = k;
                    }
                }
                const double conf = obj * logistic(best_logit);
                if (conf < conf_thresh) continue;
                const double sx = logistic(out.at(batch, base + 0, i, j));
                const double sy = logistic(out.at(batch, base + 1, i, j));
                const double sw = 2.0 * logistic(out.at(batch, base + 2, i, j));
                const double sh = 2.0 * logistic(out.at(batch, base + 3, i, j));
                Detection d;
                d.box.cx = (2.0 * sx - 0.5 + j) * stride;
                d.box.cy = (2.0 * sy - 0.5 + i) * stride;
                d.box.w = sw * sw * anchors[static_cast<std::size_t>(a)].w;
                d.box.h = sh * sh * anchors[static_cast<std::size_t>(a)].h;
                d.confidence = conf;
                d.class_id = best;
                dets.push_back(d);
            }
        }
    }
    return dets;
}

std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thresh) {
    require(iou_thresh > 0.0 && iou_thresh < 1.0, ErrorCode::Precondition, "iou threshold must be in (0, 1)");
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (dets[a].confidence != dets[b].confidence) return dets[a].confidence > dets[b].confidence;
        if (dets[a].box.area() != dets[b].box.area()) return dets[a].box.area() > dets[b].box.area();
        return a < b;
    });
    std::vector<Detection> kept;
    for (std::size_t idx : order) {
        const Detection& cand = dets[idx];
        const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
            return k.class_id == cand.class_id && box_iou(k.box, cand.box) >= iou_thresh;
        });
        if (!suppressed) kept.push_back(cand);
    }
    return kept;
}

std::vector<Detection> unletterbox(const std::vector<Detection>& dets, const TransformMeta& meta) {
    std::vector<Detection> out;
    out.reserve(dets.size());
    for (const auto& d : dets) {
        const double x1 = std::clamp((d.box.x1() - meta.pad_left) / meta.scale, 0.0, static_cast<double>(meta.orig_w));
        const double y1 = std::clamp((d.box.y1() - meta.pad_top) / meta.scale, 0.0, static_cast<double>(meta.orig_h));
        const double x2 = std::clamp((d.box.x2() - meta.pad_left) / meta.scale, 0.0, static_cast<double>(meta.orig_w));
        const double y2 = std::clamp((d.box.y2() - meta.pad_top) / meta.scale, 0.0, static_cast<double>(meta.orig_h));
        if (x2 <= x1 || y2 <= y1) continue;
        Detection m = d;
        m.box = Box::from_corners(x1, y1, x2, y2);
        out.push_back(m);
    }
    return out;
}

std::vector<Detection> postprocess(const HeadOutputs& heads, const ModelConfig& cfg, const TransformMeta& meta,
                                   const DetectOptions& opts) {
    std::vector<Detection> candidates =
        decode_head(heads.stride16, cfg.head_anchors(0), cfg.head_strides[0], opts.conf_thresh);
    std::vector<Detection> coarse = decode_head(heads.stride32, cfg.head_anchors(1), cfg.head_strides[1], opts.conf_thresh);
    candidates.insert(candidates.end(), coarse.begin(), coarse.end());
    return unletterbox(nms(candidates, opts.iou_thresh), meta);
}

DetectResult detect(const Model& m, const Image& img, const DetectOptions& opts) {
    using Clock = std::chrono::steady_clock;
    const auto& cfg = m.config();

    const auto t0 = Clock::now();
    LetterboxResult lb = letterbox(img, cfg.input_size, 32, true);
    const auto t1 = Clock::now();
    HeadOutputs heads = m.forward(lb.tensor);
    const auto t2 = Clock::now();
    DetectResult result;
    result.detections = postprocess(heads, cfg, lb.meta, opts);
    const auto t3 = Clock::now();

    auto ns = [](Clock::duration d) { return std::chrono::duration_cast<std::chrono::nanoseconds>(d).count(); };
    result.times = PhaseTimes{ns(t1 - t0), ns(t2 - t1), ns(t3 - t2), ns(t3 - t0)};
    return result;
}

std::string format_detection(const Detection& d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f %.6f", d.class_id, d.box.cx, d.box.cy, d.box.w, d.box.h,
                  d.confidence);
    return buf;
}

void write_detections(std::ostream& out, const std::vector<Detection>& dets) {
    for (const auto& d : dets) out << format_detection(d) << '\n';
}

std::vector<Detection> parse_detections(std::istream& in) {
    std::vector<Detection> dets;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        Detection d;
        if (!(fields >> d.class_id >> d.box.cx >> d.box.cy >> d.box.w >> d.box.h >> d.confidence))
            fail(ErrorCode::Input, "detection line " + std::to_string(line_no) + " is malformed");
        require(d.box.w > 0 && d.box.h > 0 && d.confidence >= 0 && d.confidence <= 1, ErrorCode::Input,
                "detection line " + std::to_string(line_no) + " is out of range");
        dets.push_back(d);
    }
    return dets;
}

} // namespace rcsnet
