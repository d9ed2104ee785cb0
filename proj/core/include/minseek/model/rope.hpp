// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minseek {

/**
 * Rotary position embedding of a single head vector.
 *
 * Pair (2i, 2i+1) is rotated by position_id * theta^(-2i/d) where d is the
 * vector length. Throws std::invalid_argument for odd lengths.
 */
std::vector<float> apply_rope(std::span<const float> vec, std::size_t position_id, double theta);

/// In-place variant over `n_heads` consecutive head vectors of length `d_head`.
void apply_rope_heads(std::span<float> heads, std::size_t d_head, std::size_t position_id,
                      double theta);

}  // namespace minseek
