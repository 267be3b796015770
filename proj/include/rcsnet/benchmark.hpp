// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcsnet/detect.hpp"

namespace rcsnet {

struct PhaseStats {
    double mean_ms = 0.0;
    double median_ms = 0.0;
};

struct BenchmarkRow {
    BlockMode mode = BlockMode::Train;
    std::size_t params = 0;
    std::uint64_t flops = 0;
    PhaseStats preprocess;
    PhaseStats forward;
    PhaseStats postprocess;
    PhaseStats total;
    double fps = 0.0;
    /// Coefficient of variation of per-image total latency.
    double cv = 0.0;
    /// Every timed repetition reproduced the first repetition's detections exactly.
    bool deterministic = true;
    std::size_t samples = 0;
};

struct BenchmarkOptions {
    int warmup = 10;
    int runs = 100;
    DetectOptions detect;
};

BenchmarkRow benchmark_model(const Model& m, const std::vector<Image>& images, const BenchmarkOptions& opts);

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
    /// deployed fps / train fps when both rows are present.
    std::optional<double> speedup;
};

/// Benchmarks the given model and, when it is in train mode, its reparameterized copy.
BenchmarkReport fps_benchmark(const Model& m, const std::vector<Image>& images, const BenchmarkOptions& opts);

} // namespace rcsnet
