// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "rcsnet/analysis.hpp"
#include "rcsnet/error.hpp"
#include "rcsnet/random.hpp"

namespace rcsnet {

std::vector<LabelBox> parse_labels(const std::string& text, const std::string& source) {
    std::vector<LabelBox> boxes;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        LabelBox b;
        const std::string where = source + ":" + std::to_string(line_no);
        require(static_cast<bool>(fields >> b.class_id >> b.cx >> b.cy >> b.w >> b.h), ErrorCode::Input,
                where + ": expected 'class_id cx cy w h'");
        require(b.class_id >= 0, ErrorCode::Input, where + ": negative class id");
        for (double v : {b.cx, b.cy, b.w, b.h})
            require(v >= 0.0 && v <= 1.0, ErrorCode::Input, where + ": coordinates must be normalized to [0, 1]");
        require(b.w > 0.0 && b.h > 0.0, ErrorCode::Input, where + ": box width and height must be positive");
        boxes.push_back(b);
    }
    return boxes;
}

std::vector<LabelBox> read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::Io, "cannot open labels '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_labels(buf.str(), path.string());
}

double centered_iou(const AnchorBox& a, const AnchorBox& b) {
    const double inter = std::min(a.w, b.w) * std::min(a.h, b.h);
    return inter / (a.area() + b.area() - inter);
}

namespace {

class Clustering {
public:
    Clustering(std::vector<AnchorBox> points, AnchorDistance kind) : points_(std::move(points)), kind_(kind) {}

    double distance(const AnchorBox& p, const AnchorBox& c) const {
        if (kind_ == AnchorDistance::Euclidean) return std::hypot(p.w - c.w, p.h - c.h);
        return 1.0 - centered_iou(p, c);
    }

    // k-means++: first centroid uniform, then proportional to squared distance to the nearest one.
    void seed(int k, Rng& rng) {
        centroids_.clear();
        centroids_.push_back(points_[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(points_.size()) - 1))]);
        while (static_cast<int>(centroids_.size()) < k) {
            std::vector<double> weight(points_.size());
            double total = 0.0;
            for (std::size_t i = 0; i < points_.size(); ++i) {
                const double d = nearest(points_[i]).second;
                weight[i] = d * d;
                total += weight[i];
            }
            std::size_t pick = 0;
            if (total <= 0.0) {
                pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(points_.size()) - 1));
            } else {
                const double target = rng.uniform_double(0.0, total);
                double running = 0.0;
                pick = points_.size() - 1;
                for (std::size_t i = 0; i < points_.size(); ++i) {
                    running += weight[i];
                    if (running > target) {
                        pick = i;
                        break;
                    }
                }
            }
            centroids_.push_back(points_[pick]);
        }
        assignment_.assign(points_.size(), -1);
    }

    // Returns true when any point changed cluster.
    bool assign() {
        bool changed = false;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const int best = nearest(points_[i]).first;
            if (best != assignment_[i]) changed = true;
            assignment_[i] = best;
        }
        return changed;
    }

    double objective() const {
        double sum = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i)
            sum += distance(points_[i], centroids_[static_cast<std::size_t>(assignment_[i])]);
        return sum / static_cast<double>(points_.size());
    }

    // Moves each centroid toward its members' mean without raising that cluster's cost.
    // An empty cluster is re-seeded at the point farthest from its current centroid.
    void update() {
        for (std::size_t c = 0; c < centroids_.size(); ++c) {
            double sw = 0.0, sh = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 0; i < points_.size(); ++i) {
                if (assignment_[i] != static_cast<int>(c)) continue;
                sw += points_[i].w;
                sh += points_[i].h;
                ++count;
            }
            if (count == 0) {
                centroids_[c] = points_[farthest_point()];
                continue;
            }
            const AnchorBox mean{sw / static_cast<double>(count), sh / static_cast<double>(count)};
            const AnchorBox old = centroids_[c];
            const double old_cost = cluster_cost(c, old);
            for (double t = 1.0; t > 1e-3; t *= 0.5) {
                const AnchorBox cand{old.w + t * (mean.w - old.w), old.h + t * (mean.h - old.h)};
                if (cluster_cost(c, cand) <= old_cost) {
                    centroids_[c] = cand;
                    break;
                }
            }
        }
    }

    const std::vector<AnchorBox>& centroids() const { return centroids_; }
    const std::vector<int>& assignment() const { return assignment_; }

private:
    std::pair<int, double> nearest(const AnchorBox& p) const {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids_.size(); ++c) {
            const double d = distance(p, centroids_[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        return {best, best_d};
    }

    double cluster_cost(std::size_t c, const AnchorBox& centroid) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i)
            if (assignment_[i] == static_cast<int>(c)) sum += distance(points_[i], centroid);
        return sum;
    }

    std::size_t farthest_point() const {
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double d = distance(points_[i], centroids_[static_cast<std::size_t>(assignment_[i])]);
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::vector<AnchorBox> points_;
    AnchorDistance kind_;
    std::vector<AnchorBox> centroids_;
    std::vector<int> assignment_;
};

} // namespace

KMeansResult kmeans_anchors_detailed(const std::vector<LabelBox>& boxes, const KMeansOptions& opts) {
    require(opts.k >= 1, ErrorCode::Input, "k must be >= 1");
    require(opts.input_size >= 1, ErrorCode::Input, "input size must be positive");
    require(boxes.size() >= static_cast<std::size_t>(opts.k), ErrorCode::Input,
            "need at least " + std::to_string(opts.k) + " boxes, got " + std::to_string(boxes.size()));

    std::vector<AnchorBox> points;
    std::set<std::pair<double, double>> distinct;
    for (const auto& b : boxes) {
        require(b.w > 0.0 && b.h > 0.0 && b.w <= 1.0 && b.h <= 1.0, ErrorCode::Input, "label box out of range");
        points.push_back({b.w * opts.input_size, b.h * opts.input_size});
        distinct.insert({b.w, b.h});
    }

    Rng rng(opts.seed);
    Clustering km(points, opts.distance);
    km.seed(opts.k, rng);
    km.assign();

    KMeansResult result;
    result.degenerate = distinct.size() < static_cast<std::size_t>(opts.k);
    result.objective.push_back(km.objective());
    for (int it = 1; it <= opts.max_iterations; ++it) {
        km.update();
        const bool changed = km.assign();
        result.objective.push_back(km.objective());
        result.iterations = it;
        if (!changed) {
            result.converged = true;
            break;
        }
    }
    result.anchors = AnchorSet(km.centroids());
    return result;
}

AnchorSet kmeans_anchors(const std::vector<LabelBox>& boxes, int k, int input_size, std::uint64_t seed) {
    KMeansOptions opts;
    opts.k = k;
    opts.input_size = input_size;
    opts.seed = seed;
    return kmeans_anchors_detailed(boxes, opts).anchors;
}

} // namespace rcsnet
