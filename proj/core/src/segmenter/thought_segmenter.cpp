// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/segmenter/thought_segmenter.hpp"

#include <sstream>

namespace minseek {

BoundaryEvent ThoughtSegmenter::scan(TokenId token, std::size_t token_index) const noexcept {
    BoundaryKind kind = BoundaryKind::kNone;
    if (token == m_sentinels.think_end) {
        kind = BoundaryKind::kThinkEnd;
    } else if (token == m_sentinels.answer_start) {
        kind = BoundaryKind::kAnswerStart;
    } else if (token == m_sentinels.eos) {
        kind = BoundaryKind::kEos;
    }
    return BoundaryEvent{kind, token_index};
}

std::string format_spans(std::span<const TranscriptSpan> spans) {
    std::ostringstream out;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const TranscriptSpan& s = spans[i];
        out << (i ? " " : "") << to_string(s.kind);
        if (s.kind == SegmentKind::kRc) {
            out << s.rc_index;
        }
        out << ':' << s.begin << '+' << s.length;
    }
    return out.str();
}

std::vector<TranscriptSpan> split_transcript(std::span<const TokenId> tokens,
                                             std::span<const std::size_t> injections,
                                             TokenId think_end, std::size_t prompt_len) {
    const std::size_t n = tokens.size();
    if (prompt_len > n) {
        throw Error("prompt length exceeds transcript length");
    }
    for (std::size_t i = 0; i < injections.size(); ++i) {
        if (injections[i] >= n) {
            throw Error("injection at " + std::to_string(injections[i]) + " is outside the transcript");
        }
        if (injections[i] < prompt_len) {
            throw Error("injection at " + std::to_string(injections[i]) + " lies inside the prompt");
        }
        if (i > 0 && injections[i] <= injections[i - 1]) {
            throw Error("injections must be strictly increasing");
        }
    }

    const std::size_t search_from = injections.empty() ? prompt_len : injections.back() + 1;
    std::size_t answer_begin = n;
    for (std::size_t i = search_from; i < n; ++i) {
        if (tokens[i] == think_end) {
            answer_begin = i;
            break;
        }
    }

    std::vector<TranscriptSpan> spans;
    const std::size_t pt1_end = injections.empty() ? answer_begin : injections.front();
    spans.push_back({SegmentKind::kPt1, 0, 0, pt1_end});
    for (std::size_t i = 0; i < injections.size(); ++i) {
        const std::size_t begin = injections[i];
        const std::size_t end = i + 1 < injections.size() ? injections[i + 1] : answer_begin;
        spans.push_back({SegmentKind::kRc, i + 1, begin, end - begin});
    }
    spans.push_back({SegmentKind::kAnswer, 0, answer_begin, n - answer_begin});
    return spans;
}

}  // namespace minseek
