// Copyright 2026 The rcsnet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rcsnet/tensor.hpp"

namespace rcsnet {

/// Seeded generator shared by weight init, fixtures, and k-means seeding.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    float uniform(float lo, float hi) { return std::uniform_real_distribution<float>(lo, hi)(engine_); }
    double uniform_double(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    void fill(std::vector<float>& v, float lo, float hi) {
        for (float& x : v) x = uniform(lo, hi);
    }
    void fill(Tensor& t, float lo, float hi) {
        for (float& x : t.data()) x = uniform(lo, hi);
    }
    Tensor tensor(Shape s, float lo = -1.0f, float hi = 1.0f) {
        Tensor t(s);
        fill(t, lo, hi);
        return t;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace rcsnet
