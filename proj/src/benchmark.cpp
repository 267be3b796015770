// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include "rcsnet/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rcsnet/analysis.hpp"
#include "rcsnet/error.hpp"

namespace rcsnet {

namespace {

PhaseStats stats(std::vector<double> ms) {
    PhaseStats s;
    if (ms.empty()) return s;
    s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    std::sort(ms.begin(), ms.end());
    const std::size_t n = ms.size();
    s.median_ms = n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
    return s;
}

double to_ms(std::int64_t ns) { return static_cast<double>(ns) / 1e6; }

} // namespace

BenchmarkRow benchmark_model(const Model& m, const std::vector<Image>& images, const BenchmarkOptions& opts) {
    require(!images.empty(), ErrorCode::Input, "benchmark needs at least one image");
    require(opts.warmup >= 0 && opts.runs >= 1, ErrorCode::Input, "benchmark needs warmup >= 0 and runs >= 1");

    for (int w = 0; w < opts.warmup; ++w)
        for (const auto& img : images) (void)detect(m, img, opts.detect);

    std::vector<double> pre, fwd, post, total;
    std::vector<std::vector<Detection>> reference(images.size());
    BenchmarkRow row;
    row.mode = m.mode();
    row.params = m.param_count();
    row.flops = model_complexity(m).flops;
    for (int r = 0; r < opts.runs; ++r) {
        for (std::size_t i = 0; i < images.size(); ++i) {
            auto res = detect(m, images[i], opts.detect);
            pre.push_back(to_ms(res.times.preprocess_ns));
            fwd.push_back(to_ms(res.times.forward_ns));
            post.push_back(to_ms(res.times.postprocess_ns));
            total.push_back(to_ms(res.times.total_ns));
            if (r == 0) {
                reference[i] = std::move(res.detections);
            } else if (res.detections != reference[i]) {
                row.deterministic = false;
            }
        }
    }
    row.samples = total.size();
    row.preprocess = stats(pre);
    row.forward = stats(fwd);
    row.postprocess = stats(post);
    row.total = stats(total);
    row.fps = row.total.mean_ms > 0.0 ? 1000.0 / row.total.mean_ms : 0.0;
    double var = 0.0;
    for (double t : total) var += (t - row.total.mean_ms) * (t - row.total.mean_ms);
    var /= static_cast<double>(total.size());
    row.cv = row.total.mean_ms > 0.0 ? std::sqrt(var) / row.total.mean_ms : 0.0;
    return row;
}

BenchmarkReport fps_benchmark(const Model& m, const std::vector<Image>& images, const BenchmarkOptions& opts) {
    BenchmarkReport rep;
    rep.rows.push_back(benchmark_model(m, images, opts));
    if (m.mode() == BlockMode::Train) {
        const Model deployed = reparameterize_model(m);
        rep.rows.push_back(benchmark_model(deployed, images, opts));
        if (rep.rows[0].fps > 0.0) rep.speedup = rep.rows[1].fps / rep.rows[0].fps;
    }
    return rep;
}

} // namespace rcsnet
