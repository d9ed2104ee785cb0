// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/controller/trace.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace minseek {

namespace {

constexpr std::array<std::pair<TraceKind, std::string_view>, 12> kKindNames{{
    {TraceKind::kPhase, "Phase"},
    {TraceKind::kMaterialized, "Materialized"},
    {TraceKind::kTokenEmitted, "TokenEmitted"},
    {TraceKind::kThinkEnd, "ThinkEnd"},
    {TraceKind::kInjected, "Injected"},
    {TraceKind::kMinRuleDecision, "MinRuleDecision"},
    {TraceKind::kEvicted, "Evicted"},
    {TraceKind::kCacheState, "CacheState"},
    {TraceKind::kMissingThinkEnd, "MissingThinkEnd"},
    {TraceKind::kTruncated, "Truncated"},
    {TraceKind::kAnswerStart, "AnswerStart"},
    {TraceKind::kDone, "Done"},
}};

}  // namespace

std::string_view to_string(TraceKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

TraceKind parse_trace_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (name == text) {
            return k;
        }
    }
    throw Error("unknown trace event kind '" + std::string(text) + "'");
}

std::string_view TraceEvent::field(std::string_view key) const noexcept {
    for (const auto& [k, v] : fields) {
        if (k == key) {
            return v;
        }
    }
    return {};
}

std::string TraceEvent::to_line() const {
    std::string line = std::to_string(seq);
    line += ' ';
    line += to_string(kind);
    for (const auto& [k, v] : fields) {
        line += ' ';
        line += k;
        line += '=';
        line += v;
    }
    return line;
}

const TraceEvent& GenerationTrace::append(TraceKind kind, Fields fields) {
    for (const auto& [k, v] : fields) {
        if (k.empty() || k.find_first_of(" =\n") != std::string::npos || v.find_first_of(" \n") != std::string::npos) {
            throw Error("trace field '" + k + "' is not serializable");
        }
    }
    m_events.push_back(TraceEvent{m_events.size(), kind, std::move(fields)});
    return m_events.back();
}

std::size_t GenerationTrace::count(TraceKind kind) const noexcept {
    std::size_t n = 0;
    for (const TraceEvent& e : m_events) {
        n += e.kind == kind ? 1 : 0;
    }
    return n;
}

std::string GenerationTrace::to_text() const {
    std::string out;
    for (const TraceEvent& e : m_events) {
        out += e.to_line();
        out += '\n';
    }
    return out;
}

GenerationTrace GenerationTrace::parse(std::string_view text) {
    GenerationTrace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream tokens(line);
        std::string seq_text, kind_text, item;
        tokens >> seq_text >> kind_text;
        TraceEvent event;
        const auto [ptr, ec] = std::from_chars(seq_text.data(), seq_text.data() + seq_text.size(), event.seq);
        if (ec != std::errc{} || ptr != seq_text.data() + seq_text.size() || event.seq != trace.m_events.size()) {
            throw Error("trace line " + std::to_string(line_no) + ": bad sequence number");
        }
        event.kind = parse_trace_kind(kind_text);
        while (tokens >> item) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw Error("trace line " + std::to_string(line_no) + ": malformed field '" + item + "'");
            }
            event.fields.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        }
        trace.m_events.push_back(std::move(event));
    }
    return trace;
}

void GenerationTrace::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write trace " + path.string());
    }
    out << to_text();
}

std::vector<Phase> replay_phases(const GenerationTrace& trace) {
    std::vector<Phase> phases;
    const auto& events = trace.events();
    if (events.empty() || events.front().kind != TraceKind::kPhase ||
        parse_phase(events.front().field("to")) != Phase::kThinking) {
        throw Error("trace must open with a transition into Thinking");
    }
    phases.push_back(Phase::kThinking);
    bool ended = false;
    for (std::size_t i = 1; i < events.size(); ++i) {
        const TraceEvent& e = events[i];
        if (ended) {
            throw Error("event " + std::to_string(e.seq) + " follows the end of the trace");
        }
        if (e.kind == TraceKind::kPhase) {
            const Phase to = parse_phase(e.field("to"));
            if (!is_legal_transition(phases.back(), to)) {
                throw Error("illegal phase transition " + std::string(to_string(phases.back())) + " -> " +
                            std::string(to_string(to)) + " at event " + std::to_string(e.seq));
            }
            phases.push_back(to);
        } else if (e.kind == TraceKind::kDone) {
            if (phases.back() != Phase::kDone) {
                throw Error("Done event outside the Done phase");
            }
            ended = true;
        } else if (e.kind == TraceKind::kTruncated) {
            ended = true;
        }
    }
    if (!ended) {
        throw Error("trace ends in neither Done nor Truncated");
    }
    return phases;
}

GenerationTrace structural_events(const GenerationTrace& trace) {
    GenerationTrace out;
    for (const TraceEvent& e : trace.events()) {
        if (e.kind != TraceKind::kTokenEmitted) {
            out.append(e.kind, e.fields);
        }
    }
    return out;
}

}  // namespace minseek
