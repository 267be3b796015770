// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rcsnet/model.hpp"

namespace rcsnet {

/// 8-bit RGB image, row-major, 3 bytes per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0);

    std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

/// Reads binary PPM (P6) or PGM (P5, grey replicated to RGB) with maxval <= 255.
Image read_pnm(const std::filesystem::path& path);
Image parse_pnm(const std::string& bytes);
void write_ppm(const Image& img, const std::filesystem::path& path);

/// Box in center form, pixels.
struct Box {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double x1() const { return cx - w / 2; }
    double y1() const { return cy - h / 2; }
    double x2() const { return cx + w / 2; }
    double y2() const { return cy + h / 2; }
    double area() const { return w * h; }

    static Box from_corners(double x1, double y1, double x2, double y2) {
        return Box{(x1 + x2) / 2, (y1 + y2) / 2, x2 - x1, y2 - y1};
    }
    friend bool operator==(const Box&, const Box&) = default;
};

struct Detection {
    Box box;
    double confidence = 0.0;
    int class_id = 0;
    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Inverse mapping from letterboxed canvas back to the source image.
struct TransformMeta {
    double scale = 1.0;
    int pad_left = 0;
    int pad_top = 0;
    int orig_w = 0;
    int orig_h = 0;
};

struct LetterboxResult {
    Tensor tensor;
    TransformMeta meta;
};

/// Aspect-preserving nearest-neighbour resize so the long side equals `target`, then grey (114)
/// padding split evenly on both sides. The canvas is the resized size rounded up to a multiple
/// of `stride`, or target x target when `square` is set.
LetterboxResult letterbox(const Image& img, int target = 640, int stride = 32, bool square = false);

/// Decodes one head of batch item `batch`; boxes are in letterboxed-canvas pixels.
std::vector<Detection> decode_head(const Tensor& out, const std::array<AnchorBox, 2>& anchors, int stride,
                                   double conf_thresh, int batch = 0);

/// Greedy class-aware suppression; survivors ordered by descending confidence with ties broken
/// by larger area, then lower input index.
std::vector<Detection> nms(const std::vector<Detection>& dets, double iou_thresh = 0.45);

/// Maps boxes back to source pixels and clips to the image; boxes clipped to zero area are dropped.
std::vector<Detection> unletterbox(const std::vector<Detection>& dets, const TransformMeta& meta);

struct DetectOptions {
    double conf_thresh = 0.25;
    double iou_thresh = 0.45;
};

/// Wall-clock nanoseconds per phase; total is the span of all three.
struct PhaseTimes {
    std::int64_t preprocess_ns = 0;
    std::int64_t forward_ns = 0;
    std::int64_t postprocess_ns = 0;
    std::int64_t total_ns = 0;
};

struct DetectResult {
    std::vector<Detection> detections;
    PhaseTimes times;
};

/// Decode both heads, suppress, and map back to source pixels.
std::vector<Detection> postprocess(const HeadOutputs& heads, const ModelConfig& cfg, const TransformMeta& meta,
                                   const DetectOptions& opts = {});

DetectResult detect(const Model& m, const Image& img, const DetectOptions& opts = {});

/// `class_id cx cy w h confidence`, six decimals.
std::string format_detection(const Detection& d);
void write_detections(std::ostream& out, const std::vector<Detection>& dets);
std::vector<Detection> parse_detections(std::istream& in);

double box_iou(const Box& a, const Box& b);

} // namespace rcsnet
