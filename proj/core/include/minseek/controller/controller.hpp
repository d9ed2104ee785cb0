// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minseek/cache/dual_kv_cache.hpp"
#include "minseek/controller/policy.hpp"
#include "minseek/controller/token_source.hpp"
#include "minseek/controller/trace.hpp"
#include "minseek/model/model.hpp"
#include "minseek/segmenter/thought_segmenter.hpp"
#include "minseek/validate/cost_record.hpp"

namespace minseek {

/// Snapshot handed to a boundary observer after the first decode step following a thought boundary.
struct BoundaryCheck {
    std::size_t boundary_index = 0;
    std::span<const TokenId> resident_tokens;  // token ids of the cache rows, in cache order
    std::span<const float> logits;  // incremental logits of the last step
    const DualKvCache* cache = nullptr;
};

using BoundaryObserver = std::function<void(const BoundaryCheck&)>;

struct RunOptions {
    /// Consistency assertions in the cache plus bound and segment checks at every boundary.
    bool checked = false;
    /// Negative control: evict without re-encoding positions (stale rotated keys survive).
    bool skip_rematerialize = false;
    /// Emit a TokenEmitted record per decode step.
    bool trace_tokens = true;
    bool record_costs = true;
    BoundaryObserver on_boundary;
};

struct Transcript {
    std::vector<TokenId> tokens;  // prompt followed by every token fed to the model
    std::size_t prompt_len = 0;
    std::vector<std::size_t> injections;  // transcript positions of injected wait tokens
    std::vector<TranscriptSpan> spans;  // online segmentation, answer span last
    std::string termination;  // eos | answer_cap | runaway | hard_cap

    std::string to_text() const;
};

struct SessionStats {
    std::size_t rc_count = 0;
    std::size_t tokens_generated = 0;
    std::size_t max_rows = 0;
    std::optional<std::size_t> max_position_id;
    std::size_t boundaries = 0;
    std::size_t evictions = 0;
    bool final_cycle_run = false;
    bool truncated = false;
    Phase final_phase = Phase::kThinking;
    std::size_t answer_context_rows = 0;  // cache rows when the answer trigger was fed
};

struct GenerationResult {
    Transcript transcript;
    GenerationTrace trace;
    std::vector<CostRecord> costs;
    std::vector<MinRuleResult> decisions;
    SessionStats stats;
};

/**
 * Runs one sequential-scaling generation session.
 *
 * The prompt and the first thought form PT1. Whenever the source produces
 * think_end during thinking, on_think_end() decides between injecting wait
 * (a new reconstruction cycle) and finalizing. Under Min-Seek each completed
 * cycle goes through the min rule, and the rotated keys are rebuilt at
 * contiguous positions before the next segment is decoded. Budget Forcing
 * keeps every cycle and never re-encodes.
 *
 * `cache` must be empty and shaped for `model`. Throws ConfigError for
 * policies that violate the cache bound or prompts longer than u.
 */
GenerationResult run_generation(const Model& model, DualKvCache& cache, std::span<const TokenId> prompt,
                                const ScalingPolicy& policy, TokenSource& source, const RunOptions& options = {});

}  // namespace minseek
