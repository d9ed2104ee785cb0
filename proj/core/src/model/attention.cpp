// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minseek/types.hpp"

namespace minseek {

std::vector<float> attention_step(std::span<const float> query, std::span<const float> keys,
                                  std::span<const float> values, const AttentionShape& shape,
                                  float scale, std::vector<float>* weights_out) {
    const std::size_t width = shape.width();
    if (query.size() != width) {
        throw CacheError("attention query has wrong width");
    }
    if (keys.empty() || keys.size() % width != 0 || keys.size() != values.size()) {
        throw CacheError("attention needs a non-empty cache with matching keys and values");
    }
    const std::size_t rows = keys.size() / width;

    std::vector<float> context(width, 0.0f);
    std::vector<float> scores(rows);
    if (weights_out != nullptr) {
        weights_out->assign(shape.n_heads * rows, 0.0f);
    }

    for (std::size_t h = 0; h < shape.n_heads; ++h) {
        const std::size_t head = h * shape.d_head;
        float max_score = -std::numeric_limits<float>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
            const float* k = keys.data() + r * width + head;
            float dot = 0.0f;
            for (std::size_t i = 0; i < shape.d_head; ++i) {
                dot += query[head + i] * k[i];
            }
            scores[r] = dot * scale;
            max_score = std::max(max_score, scores[r]);
        }
        float denom = 0.0f;
        for (float& s : scores) {
            s = std::exp(s - max_score);
            denom += s;
        }
        const float inv = 1.0f / denom;
        for (std::size_t r = 0; r < rows; ++r) {
            const float w = scores[r] * inv;
            const float* v = values.data() + r * width + head;
            for (std::size_t i = 0; i < shape.d_head; ++i) {
                context[head + i] += w * v[i];
            }
            if (weights_out != nullptr) {
                (*weights_out)[h * rows + r] = w;
            }
        }
    }
    return context;
}

}  // namespace minseek
