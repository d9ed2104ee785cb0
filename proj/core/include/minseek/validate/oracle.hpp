// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "minseek/cache/dual_kv_cache.hpp"
#include "minseek/model/model.hpp"

namespace minseek {

/// Element i passes when |a_i - b_i| <= max(rel * |b_i|, abs_floor).
struct OracleTolerance {
    double rel = 1e-4;
    double abs_floor = 1e-6;
};

struct LogitComparison {
    double max_abs_dev = 0.0;
    /// max |a - b| / max(|b|, abs_floor / rel); at most 1 x rel when within.
    double max_rel_dev = 0.0;
    std::size_t worst_index = 0;
    bool within = true;
};

/// Compares incremental logits `actual` against reference logits `expected`.
LogitComparison compare_logits(std::span<const float> actual, std::span<const float> expected,
                               const OracleTolerance& tolerance = {});

/**
 * Full causal recompute over exactly the resident tokens at positions
 * 0..n-1, returning the logits of the last one.
 */
Logits recompute_oracle(std::span<const TokenId> resident_tokens, const Model& model);

/**
 * Recomputes the last decode step from the cache's position-free ground
 * truth: every earlier row's stored key is rotated to its current index
 * 0..n-2, the last token is re-run through all layers at position n-1, and
 * attention, norms and projections are evaluated in double precision with an
 * independent rotation. Rows evicted earlier may still have shaped the stored
 * keys and values of deeper layers; this oracle takes those rows as given.
 */
Logits cache_conditioned_oracle(const DualKvCache& cache, const Model& model, TokenId last_token);

}  // namespace minseek
