// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>

namespace minseek {

/// Cost of one decode step. attention_scores = cache_rows x n_layers x n_heads.
struct CostRecord {
    std::uint64_t attention_scores = 0;
    std::size_t cache_rows = 0;
    std::chrono::nanoseconds wall_time{0};
    std::uint64_t cumulative_tokens = 0;
    std::uint64_t cumulative_scores = 0;
    std::size_t cycle = 0;  // 0 for PT1, i for RC i (the final cycle included)
};

}  // namespace minseek
