// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minseek {

struct AttentionShape {
    std::size_t n_heads;
    std::size_t d_head;

    std::size_t width() const noexcept { return n_heads * d_head; }
};

/**
 * Single-query multi-head attention over `rows` cached entries.
 *
 * `query` holds n_heads x d_head values; `keys` and `values` are row-major
 * [rows][n_heads x d_head]. Returns the per-head weighted value averages
 * concatenated back to n_heads x d_head. When `weights_out` is non-null it
 * receives the softmax weights as [n_heads][rows].
 */
std::vector<float> attention_step(std::span<const float> query, std::span<const float> keys,
                                  std::span<const float> values, const AttentionShape& shape,
                                  float scale, std::vector<float>* weights_out = nullptr);

}  // namespace minseek
