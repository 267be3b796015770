// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcsnet/analysis.hpp"
#include "rcsnet/detect.hpp"

namespace rcsnet {

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct GroundTruth {
    Box box;
    int class_id = 0;
};

/// Converts normalized labels to pixel boxes of a width x height image.
std::vector<GroundTruth> to_ground_truth(const std::vector<LabelBox>& labels, int width, int height);

double iou(const Box& a, const Box& b);

struct MatchResult {
    ConfusionCounts counts;
    std::vector<bool> is_tp;         // per prediction
    std::vector<int> matched_gt;     // per prediction, -1 when unmatched
};

/// Greedy matching in prediction order (which must be non-increasing in confidence): each
/// prediction takes the highest-IoU unmatched same-class ground truth with IoU >= iou_t.
MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<GroundTruth>& gts, double iou_t);

/// TP / (TP + FP); 0 when the denominator is 0.
double precision(const ConfusionCounts& c);
/// TP / (TP + FN); 0 when the denominator is 0.
double recall(const ConfusionCounts& c);
bool precision_degenerate(const ConfusionCounts& c);
bool recall_degenerate(const ConfusionCounts& c);

struct ImageEval {
    std::vector<Detection> preds;
    std::vector<GroundTruth> gts;
};

enum class ApIntegration {
    Interp101,  // mean of the precision envelope sampled at recall 0, 0.01, ..., 1
    AllPoint,   // exact area under the precision envelope
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

/// PR points from sweeping the confidence-sorted predictions of all images.
std::vector<PrPoint> pr_curve(const std::vector<ImageEval>& data, double iou_t);

/// 0 when the dataset has no ground truth (see has_ground_truth).
double average_precision(const std::vector<ImageEval>& data, double iou_t,
                         ApIntegration method = ApIntegration::Interp101);
bool has_ground_truth(const std::vector<ImageEval>& data);

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct ApSweep {
    std::vector<double> thresholds;
    std::vector<double> ap;
    double mean = 0.0;
};

ApSweep ap50_95(const std::vector<ImageEval>& data, ApIntegration method = ApIntegration::Interp101);

struct EvalSummary {
    ConfusionCounts counts;  // at IoU 0.5 over predictions with confidence >= conf_thresh
    double precision = 0.0;
    double recall = 0.0;
    double ap50 = 0.0;
    double ap50_95 = 0.0;
    bool no_ground_truth = false;
    bool precision_degenerate = false;
    bool recall_degenerate = false;
};

EvalSummary evaluate(const std::vector<ImageEval>& data, double conf_thresh);

} // namespace rcsnet
