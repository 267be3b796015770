// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "rcsnet/error.hpp"

namespace rcsnet {

std::vector<GroundTruth> to_ground_truth(const std::vector<LabelBox>& labels, int width, int height) {
    std::vector<GroundTruth> out;
    out.reserve(labels.size());
    for (const auto& l : labels)
        out.push_back(GroundTruth{Box{l.cx * width, l.cy * height, l.w * width, l.h * height}, l.class_id});
    return out;
}

double iou(const Box& a, const Box& b) { return box_iou(a, b); }

MatchResult match_detections(const std::vector<Detection>& preds, const std::vector<GroundTruth>& gts, double iou_t) {
    for (std::size_t i = 1; i < preds.size(); ++i)
        require(preds[i - 1].confidence >= preds[i].confidence, ErrorCode::Precondition,
                "predictions must be sorted by descending confidence");
    MatchResult r;
    r.is_tp.assign(preds.size(), false);
    r.matched_gt.assign(preds.size(), -1);
    std::vector<bool> taken(gts.size(), false);
    for (std::size_t p = 0; p < preds.size(); ++p) {
        int best = -1;
        double best_iou = iou_t;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (taken[g] || gts[g].class_id != preds[p].class_id) continue;
            const double v = iou(preds[p].box, gts[g].box);
            if (v >= best_iou && (best < 0 || v > best_iou)) {
                best = static_cast<int>(g);
                best_iou = v;
            }
        }
        if (best >= 0) {
            taken[static_cast<std::size_t>(best)] = true;
            r.is_tp[p] = true;
            r.matched_gt[p] = best;
            ++r.counts.tp;
        } else {
            ++r.counts.fp;
        }
    }
    r.counts.fn = static_cast<std::int64_t>(gts.size()) - r.counts.tp;
    return r;
}

double precision(const ConfusionCounts& c) {
    const auto denom = c.tp + c.fp;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
    const auto denom = c.tp + c.fn;
    return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

bool precision_degenerate(const ConfusionCounts& c) { return c.tp + c.fp == 0; }
bool recall_degenerate(const ConfusionCounts& c) { return c.tp + c.fn == 0; }

bool has_ground_truth(const std::vector<ImageEval>& data) {
    return std::any_of(data.begin(), data.end(), [](const ImageEval& e) { return !e.gts.empty(); });
}

namespace {

std::vector<Detection> sorted_by_confidence(const std::vector<Detection>& preds) {
    std::vector<Detection> out = preds;
    std::stable_sort(out.begin(), out.end(),
                     [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
    return out;
}

} // namespace

std::vector<PrPoint> pr_curve(const std::vector<ImageEval>& data, double iou_t) {
    struct Scored {
        double confidence;
        bool tp;
    };
    std::vector<Scored> all;
    std::int64_t total_gt = 0;
    for (const auto& img : data) {
        const auto preds = sorted_by_confidence(img.preds);
        const auto m = match_detections(preds, img.gts, iou_t);
        for (std::size_t i = 0; i < preds.size(); ++i) all.push_back({preds[i].confidence, m.is_tp[i]});
        total_gt += static_cast<std::int64_t>(img.gts.size());
    }
    std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.confidence > b.confidence; });

    std::vector<PrPoint> curve;
    if (total_gt == 0) return curve;
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    for (const auto& s : all) {
        (s.tp ? tp : fp) += 1;
        curve.push_back({static_cast<double>(tp) / static_cast<double>(total_gt),
                         static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
    return curve;
}

double average_precision(const std::vector<ImageEval>& data, double iou_t, ApIntegration method) {
    const auto curve = pr_curve(data, iou_t);
    if (curve.empty()) return 0.0;

    // envelope[i] = max precision over points i..end
    std::vector<double> envelope(curve.size());
    double running = 0.0;
    for (std::size_t i = curve.size(); i-- > 0;) {
        running = std::max(running, curve[i].precision);
        envelope[i] = running;
    }

    if (method == ApIntegration::AllPoint) {
        double area = 0.0;
        double prev_recall = 0.0;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            area += (curve[i].recall - prev_recall) * envelope[i];
            prev_recall = curve[i].recall;
        }
        return area;
    }

    double sum = 0.0;
    std::size_t idx = 0;
    for (int j = 0; j <= 100; ++j) {
        const double r = j / 100.0;
        while (idx < curve.size() && curve[idx].recall < r - 1e-12) ++idx;
        if (idx < curve.size()) sum += envelope[idx];
    }
    return sum / 101.0;
}

std::vector<double> coco_iou_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
    return t;
}

ApSweep ap50_95(const std::vector<ImageEval>& data, ApIntegration method) {
    ApSweep s;
    s.thresholds = coco_iou_thresholds();
    for (double t : s.thresholds) s.ap.push_back(average_precision(data, t, method));
    s.mean = std::accumulate(s.ap.begin(), s.ap.end(), 0.0) / static_cast<double>(s.ap.size());
    return s;
}

EvalSummary evaluate(const std::vector<ImageEval>& data, double conf_thresh) {
    EvalSummary s;
    std::vector<ImageEval> kept;
    kept.reserve(data.size());
    for (const auto& img : data) {
        ImageEval filtered{{}, img.gts};
        for (const auto& d : img.preds)
            if (d.confidence >= conf_thresh) filtered.preds.push_back(d);
        s.counts += match_detections(sorted_by_confidence(filtered.preds), img.gts, 0.5).counts;
        kept.push_back(std::move(filtered));
    }
    s.precision = precision(s.counts);
    s.recall = recall(s.counts);
    s.precision_degenerate = precision_degenerate(s.counts);
    s.recall_degenerate = recall_degenerate(s.counts);
    s.no_ground_truth = !has_ground_truth(kept);
    s.ap50 = average_precision(kept, 0.5);
    s.ap50_95 = ap50_95(kept).mean;
    return s;
}

} // namespace rcsnet
