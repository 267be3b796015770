// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rcsnet/model.hpp"

namespace rcsnet {

/// Conv layer with square M x M output, K x K kernel, C1 inputs and C2 outputs.
struct LayerSpec {
    std::uint64_t m = 1;
    std::uint64_t k = 1;
    std::uint64_t c1 = 1;
    std::uint64_t c2 = 1;
};

/// M^2 K^2 C1 C2, one FLOP per multiply-accumulate.
std::uint64_t flops(const LayerSpec& l);
/// M^2 (C1 + C2) + K^2 C1 C2.
std::uint64_t mac(const LayerSpec& l);

struct LayerCost {
    std::string name;
    std::string kind;
    std::optional<LayerSpec> spec;  // absent for data-movement rows
    std::uint64_t flops = 0;
    std::uint64_t mac = 0;
};

/// Closed forms for n = 4: FLOPs 20.25 C^2 M^2 vs 40 C^2 M^2, MAC 6 C M^2 + 20.25 C^2 vs
/// 17 C M^2 + 40 C^2.
struct OsaElanConstants {
    double rcs_osa_flops = 0.0;
    double elan_flops = 0.0;
    double flops_ratio = 0.0;
    double rcs_osa_mac = 0.0;
    double elan_mac = 0.0;
};

struct ComplexityReport {
    std::vector<LayerCost> layers;
    std::uint64_t flops = 0;
    std::uint64_t mac = 0;
    std::optional<OsaElanConstants> paper_constants;
    std::vector<std::string> notes;

    void add(LayerCost row);
};

OsaElanConstants osa_elan_constants(std::uint64_t c, std::uint64_t m);

/// Structural count of a deployed RCS-OSA (n fused 3x3 convs on c/2 channels plus the 3c -> c
/// aggregation) at output size m; the closed forms are attached when n == 4.
ComplexityReport compare_osa_elan(std::uint64_t c, std::uint64_t m, int n = 4);

/// Walks the graph at its configured input size. Conv nodes use the LayerSpec formulas;
/// pooling, upsampling, concat and channel shuffle are zero-FLOP rows whose MAC is the
/// activation traffic (input + output elements).
ComplexityReport model_complexity(const Graph& g, Shape input);
ComplexityReport model_complexity(const Model& m);

/// Normalized label box; all coordinates in [0, 1].
struct LabelBox {
    int class_id = 0;
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;
};

/// One `class_id cx cy w h` line per box.
std::vector<LabelBox> parse_labels(const std::string& text, const std::string& source = "labels");
std::vector<LabelBox> read_labels(const std::filesystem::path& path);

enum class AnchorDistance { OneMinusIou, Euclidean };

struct KMeansOptions {
    int k = 4;
    int input_size = 640;
    std::uint64_t seed = 0;
    int max_iterations = 300;
    AnchorDistance distance = AnchorDistance::OneMinusIou;
};

struct KMeansResult {
    AnchorSet anchors;
    /// Mean distance to the assigned centroid, before the first update and after each iteration.
    std::vector<double> objective;
    int iterations = 0;
    bool converged = false;
    /// Fewer distinct boxes than clusters; some anchors coincide.
    bool degenerate = false;
};

/// 1 - IoU of two boxes sharing a center.
double centered_iou(const AnchorBox& a, const AnchorBox& b);

KMeansResult kmeans_anchors_detailed(const std::vector<LabelBox>& boxes, const KMeansOptions& opts);
AnchorSet kmeans_anchors(const std::vector<LabelBox>& boxes, int k, int input_size, std::uint64_t seed);

} // namespace rcsnet
