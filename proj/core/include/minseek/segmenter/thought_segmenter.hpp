// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "minseek/cache/segment_table.hpp"
#include "minseek/model/config.hpp"

namespace minseek {

enum class BoundaryKind { kNone, kThinkEnd, kAnswerStart, kEos };

struct BoundaryEvent {
    BoundaryKind kind = BoundaryKind::kNone;
    std::size_t token_index = 0;
};

/// Classifies tokens against the sentinel ids of a model config.
class ThoughtSegmenter {
public:
    explicit ThoughtSegmenter(const SentinelTokens& sentinels) : m_sentinels(sentinels) {}

    BoundaryEvent scan(TokenId token, std::size_t token_index = 0) const noexcept;

private:
    SentinelTokens m_sentinels;
};

/// A span of a transcript in transcript coordinates (not cache rows).
struct TranscriptSpan {
    SegmentKind kind = SegmentKind::kPt1;
    std::size_t rc_index = 0;
    std::size_t begin = 0;
    std::size_t length = 0;

    std::size_t end() const noexcept { return begin + length; }
    bool operator==(const TranscriptSpan&) const = default;
};

std::string format_spans(std::span<const TranscriptSpan> spans);

/**
 * Offline segmentation of a recorded transcript.
 *
 * PT1 runs from 0 to the first injection; RC i runs from the i-th injected
 * wait to the next boundary; the answer starts at the first think_end at or
 * after the last injection (or after the prompt when there is none) and runs
 * to the end. A transcript without such a think_end gets an empty answer span
 * at its end. Throws Error for injections that are out of order, overlapping,
 * out of range, or inside the prompt.
 */
std::vector<TranscriptSpan> split_transcript(std::span<const TokenId> tokens,
                                             std::span<const std::size_t> injections,
                                             TokenId think_end, std::size_t prompt_len = 0);

}  // namespace minseek
