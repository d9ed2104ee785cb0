// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <vector>

#include "minseek/cache/dual_kv_cache.hpp"
#include "minseek/model/rope.hpp"

namespace minseek::testing {

inline CacheShape small_shape(std::size_t max_ctx = 512) { return CacheShape{2, 2, 4, max_ctx, 10000.0}; }

/// Appends one random row to every layer at the current length.
inline void append_row(DualKvCache& cache, std::mt19937_64& gen) {
    std::normal_distribution<float> dist(0.0f, 1.0f);
    const std::size_t width = cache.shape().width();
    for (std::size_t l = 0; l < cache.shape().n_layers; ++l) {
        std::vector<float> k(width), v(width);
        for (std::size_t i = 0; i < width; ++i) {
            k[i] = dist(gen);
            v[i] = dist(gen);
        }
        std::vector<float> k_rot = k;
        apply_rope_heads(k_rot, cache.shape().d_head, cache.layer_length(l), cache.shape().rope_theta);
        cache.update(l, k_rot, k, v);
    }
}

inline const Segment& append_segment(DualKvCache& cache, SegmentKind kind, std::size_t rc_index, std::size_t rows,
                                     std::mt19937_64& gen) {
    cache.begin_segment(kind, rc_index);
    for (std::size_t i = 0; i < rows; ++i) {
        append_row(cache, gen);
    }
    return cache.commit_segment(rows);
}

}  // namespace minseek::testing
