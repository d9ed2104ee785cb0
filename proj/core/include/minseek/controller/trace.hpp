// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minseek/controller/policy.hpp"

namespace minseek {

enum class TraceKind {
    kPhase,
    kMaterialized,
    kTokenEmitted,
    kThinkEnd,
    kInjected,
    kMinRuleDecision,
    kEvicted,
    kCacheState,
    kMissingThinkEnd,
    kTruncated,
    kAnswerStart,
    kDone,
};

std::string_view to_string(TraceKind kind) noexcept;
TraceKind parse_trace_kind(std::string_view text);

/// One record. Field order is preserved so serialized traces are byte-stable.
struct TraceEvent {
    std::uint64_t seq = 0;
    TraceKind kind = TraceKind::kDone;
    std::vector<std::pair<std::string, std::string>> fields;

    /// Value of `key`, or an empty view if absent.
    std::string_view field(std::string_view key) const noexcept;

    /// "<seq> <Kind> key=value ..." without a trailing newline.
    std::string to_line() const;

    bool operator==(const TraceEvent&) const = default;
};

/// Append-only event log of one generation session.
class GenerationTrace {
public:
    using Fields = std::vector<std::pair<std::string, std::string>>;

    const TraceEvent& append(TraceKind kind, Fields fields = {});

    const std::vector<TraceEvent>& events() const noexcept { return m_events; }
    std::size_t count(TraceKind kind) const noexcept;

    /// One event per line, newline terminated.
    std::string to_text() const;
    static GenerationTrace parse(std::string_view text);

    void write(const std::filesystem::path& path) const;

    bool operator==(const GenerationTrace&) const = default;

private:
    std::vector<TraceEvent> m_events;
};

/**
 * Re-runs the phase machine over a trace's Phase events. Returns the visited
 * phases starting with Thinking; throws Error on an illegal transition, on
 * events after the end, or when the trace ends in neither Done nor Truncated.
 */
std::vector<Phase> replay_phases(const GenerationTrace& trace);

/// The trace without per-token records: the structural skeleton used for replay checks.
GenerationTrace structural_events(const GenerationTrace& trace);

}  // namespace minseek
