// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/controller/controller.hpp"

#include <chrono>
#include <sstream>

namespace minseek {

namespace {

enum class Flow { kContinue, kStop };

std::string str(std::size_t v) { return std::to_string(v); }

std::string join(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + str(values[i]);
    }
    return out.empty() ? "-" : out;
}

class Session {
public:
    Session(const Model& model, DualKvCache& cache, std::span<const TokenId> prompt, const ScalingPolicy& policy,
            TokenSource& source, const RunOptions& options)
        : m_model(model),
          m_cache(cache),
          m_prompt(prompt),
          m_policy(policy),
          m_source(source),
          m_options(options),
          m_sentinels(model.config().sentinels),
          m_segmenter(model.config().sentinels),
          m_bound(policy.cache_bound()) {}

    GenerationResult run() {
        validate_inputs();
        m_cache.set_checked(m_options.checked);
        m_cache.set_keep_stale_materialized_on_drop(m_options.skip_rematerialize);

        m_result.transcript.prompt_len = m_prompt.size();
        m_result.trace.append(TraceKind::kPhase, {{"to", std::string(to_string(Phase::kThinking))}});
        open_segment(SegmentKind::kPt1, 0);
        m_cache.materialize_all();
        m_result.trace.append(TraceKind::kMaterialized, {{"length", str(m_cache.length())}});
        for (TokenId token : m_prompt) {
            feed(token, false);
        }

        Flow flow = Flow::kContinue;
        while (flow == Flow::kContinue) {
            flow = m_state.phase == Phase::kAnswering ? decode_answer_token() : decode_thought_token();
        }

        SessionStats& stats = m_result.stats;
        stats.rc_count = m_state.rc_count;
        stats.tokens_generated = m_state.tokens_generated;
        stats.final_phase = m_state.phase;
        stats.max_position_id = m_cache.max_position_id();
        return std::move(m_result);
    }

private:
    void validate_inputs() const {
        m_policy.check_against(m_model.config().max_context_length);
        if (m_prompt.empty()) {
            throw ConfigError("prompt must contain at least one token");
        }
        if (m_prompt.size() > m_policy.segment_cap) {
            throw ConfigError("prompt of " + str(m_prompt.size()) + " tokens exceeds segment cap u = " +
                              str(m_policy.segment_cap));
        }
        if (!m_cache.empty() || !m_cache.segments().committed().empty() || m_cache.segments().open()) {
            throw ConfigError("run_generation needs an empty cache");
        }
        const CacheShape expected = CacheShape::from_model(m_model.config());
        const CacheShape& actual = m_cache.shape();
        if (actual.n_layers != expected.n_layers || actual.n_heads != expected.n_heads ||
            actual.d_head != expected.d_head || actual.max_context_length != expected.max_context_length ||
            actual.rope_theta != expected.rope_theta) {
            throw ConfigError("cache shape does not match the model");
        }
    }

    void set_phase(Phase to) {
        m_state.phase = to;
        m_result.trace.append(TraceKind::kPhase, {{"to", std::string(to_string(to))}});
    }

    std::size_t open_rows() const { return m_cache.length() - m_cache.segments().open()->offset; }

    void open_segment(SegmentKind kind, std::size_t rc_index) {
        m_cache.begin_segment(kind, rc_index);
        m_span = TranscriptSpan{kind, rc_index, m_result.transcript.tokens.size(), 0};
    }

    Segment close_segment() {
        const Segment committed = m_cache.commit_segment(open_rows());
        close_span();
        return committed;
    }

    void close_span() {
        if (m_span) {
            m_span->length = m_result.transcript.tokens.size() - m_span->begin;
            m_result.transcript.spans.push_back(*m_span);
            m_span.reset();
        }
    }

    void append_empty_answer_span() {
        m_result.transcript.spans.push_back(
            TranscriptSpan{SegmentKind::kAnswer, 0, m_result.transcript.tokens.size(), 0});
    }

    std::size_t current_cycle() const {
        const auto& open = m_cache.segments().open();
        return open && open->kind == SegmentKind::kRc ? open->rc_index : m_state.rc_count;
    }

    /// Decodes one token. Returns false when the absolute token cap truncates the run.
    bool feed(TokenId token, bool generated) {
        if (generated && m_state.tokens_generated >= m_policy.hard_token_cap()) {
            truncate();
            return false;
        }
        const std::size_t position = m_cache.length();
        const auto start = std::chrono::steady_clock::now();
        m_logits = m_model.forward_step(token, m_cache, position);
        const auto elapsed = std::chrono::steady_clock::now() - start;

        m_resident.push_back(token);
        m_result.transcript.tokens.push_back(token);
        if (generated) {
            ++m_state.tokens_generated;
        }
        const std::size_t rows = m_cache.length();
        const std::uint64_t scores = m_model.attention_scores_per_step(rows);
        m_cumulative_scores += scores;
        ++m_steps;
        m_result.stats.max_rows = std::max(m_result.stats.max_rows, rows);

        if (m_options.record_costs) {
            m_result.costs.push_back(CostRecord{scores, rows, std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed),
                                                m_steps, m_cumulative_scores, current_cycle()});
        }
        if (m_options.trace_tokens) {
            m_result.trace.append(TraceKind::kTokenEmitted, {{"token", std::to_string(token)},
                                                             {"pos", str(position)},
                                                             {"rows", str(rows)},
                                                             {"scores", std::to_string(scores)}});
        }
        if (m_options.checked && m_bound) {
            m_cache.check_bound(*m_bound);
        }
        if (m_boundary_pending) {
            m_boundary_pending = false;
            const std::size_t index = m_result.stats.boundaries++;
            if (m_options.on_boundary) {
                m_options.on_boundary(BoundaryCheck{index, m_resident, m_logits, &m_cache});
            }
        }
        return true;
    }

    void truncate() {
        close_span();
        if (m_state.phase != Phase::kAnswering) {
            append_empty_answer_span();
        }
        m_result.transcript.termination = "hard_cap";
        m_result.stats.truncated = true;
        m_result.trace.append(TraceKind::kTruncated, {{"reason", "hard_cap"},
                                                      {"tokens", str(m_state.tokens_generated)},
                                                      {"phase", std::string(to_string(m_state.phase))}});
    }

    void trace_cache_state() {
        std::vector<std::size_t> rows;
        for (std::size_t l = 0; l < m_cache.shape().n_layers; ++l) {
            rows.push_back(m_cache.layer_length(l));
        }
        std::string segments;
        for (const Segment& s : m_cache.segments().committed()) {
            segments += (segments.empty() ? "" : ",") + s.label();
        }
        const auto& open = m_cache.segments().open();
        m_result.trace.append(TraceKind::kCacheState,
                              {{"segments", segments.empty() ? "-" : segments},
                               {"open", open ? std::string(to_string(open->kind)) + "@" + str(open->offset) : "-"},
                               {"rows", join(rows)}});
    }

    void check_structure() const {
        if (!m_options.checked) {
            return;
        }
        m_cache.segments().validate(m_cache.length());
        if (m_resident.size() != m_cache.length()) {
            throw CacheError("resident token list out of sync with cache rows");
        }
        if (m_bound) {
            m_cache.check_bound(*m_bound);
        }
    }

    /// Rebuilds contiguous rotated keys (Min-Seek only).
    void reencode() {
        if (m_policy.method != Method::kMinSeek || m_options.skip_rematerialize) {
            return;
        }
        m_cache.discard_materialized();
        m_cache.materialize_all();
        m_result.trace.append(TraceKind::kMaterialized, {{"length", str(m_cache.length())}});
        trace_cache_state();
    }

    void mirror_eviction(const Segment& evicted) {
        const auto first = m_resident.begin() + static_cast<std::ptrdiff_t>(evicted.offset);
        m_resident.erase(first, first + static_cast<std::ptrdiff_t>(evicted.token_len));
        ++m_result.stats.evictions;
        m_result.trace.append(TraceKind::kEvicted,
                              {{"segment", evicted.label()}, {"rows", str(evicted.token_len)}});
    }

    void apply_min_rule(const Segment& completed) {
        if (!m_options.skip_rematerialize) {
            m_cache.discard_materialized();
        }
        const MinRuleResult r = m_cache.apply_min_rule(completed.creation_order, m_policy.retained_rc_max);
        m_result.trace.append(
            TraceKind::kMinRuleDecision,
            {{"decision", std::string(to_string(r.decision))},
             {"candidate", "RC" + str(r.candidate.rc_index)},
             {"candidate_len", str(r.candidate.content_len())},
             {"incumbent", r.incumbent ? "RC" + str(r.incumbent->rc_index) : "-"},
             {"incumbent_len", r.incumbent ? str(r.incumbent->content_len()) : "-"},
             {"kept", "RC" + str(r.kept.rc_index)}});
        if (r.evicted) {
            mirror_eviction(*r.evicted);
        }
        m_result.decisions.push_back(r);
    }

    Flow inject_wait() {
        m_result.transcript.injections.push_back(m_result.transcript.tokens.size());
        m_result.trace.append(TraceKind::kInjected, {{"token", "wait"}, {"pos", str(m_cache.length())}});
        m_boundary_pending = true;
        check_structure();
        return feed(m_sentinels.wait, true) ? Flow::kContinue : Flow::kStop;
    }

    Flow begin_answer(bool injected) {
        set_phase(Phase::kAnswering);
        open_segment(SegmentKind::kAnswer, 0);
        m_result.stats.answer_context_rows = m_cache.length();
        if (injected) {
            m_result.trace.append(TraceKind::kInjected, {{"token", "think_end"}, {"pos", str(m_cache.length())}});
        }
        m_result.trace.append(TraceKind::kAnswerStart, {{"pos", str(m_cache.length())}});
        m_boundary_pending = true;
        check_structure();
        return feed(m_sentinels.think_end, true) ? Flow::kContinue : Flow::kStop;
    }

    Flow finish(const std::string& reason) {
        close_segment();
        set_phase(Phase::kDone);
        trace_cache_state();
        m_result.transcript.termination = reason;
        m_result.trace.append(TraceKind::kDone, {{"reason", reason}, {"tokens", str(m_state.tokens_generated)}});
        return Flow::kStop;
    }

    Flow handle_think_end() {
        const Segment completed = close_segment();
        m_result.trace.append(TraceKind::kThinkEnd,
                              {{"segment", completed.label()}, {"len", str(completed.content_len())}});

        if (m_final_cycle_active) {
            // The final cycle stays in the cache; the answer attends to it.
            return begin_answer(false);
        }

        const bool rule = m_policy.method == Method::kMinSeek && completed.kind == SegmentKind::kRc;
        if (rule) {
            apply_min_rule(completed);
        }

        if (on_think_end(m_state, m_policy) == ThinkEndAction::kInjectWait) {
            ++m_state.rc_count;
            open_segment(SegmentKind::kRc, m_state.rc_count);
            reencode();
            return inject_wait();
        }

        set_phase(Phase::kFinalizing);
        if (m_policy.has_final_cycle()) {
            m_final_cycle_active = true;
            m_result.stats.final_cycle_run = true;
            open_segment(SegmentKind::kRc, m_state.rc_count + 1);
            reencode();
            return inject_wait();
        }
        if (rule) {
            reencode();
        }
        return begin_answer(false);
    }

    Flow handle_missing_think_end(const std::string& reason) {
        const MissingThinkEndAction action = minseek::handle_missing_think_end(m_state, m_policy);
        const Segment runaway = close_segment();
        m_result.trace.append(TraceKind::kMissingThinkEnd, {{"reason", reason},
                                                            {"segment", runaway.label()},
                                                            {"action", std::string(to_string(action))}});
        if (m_state.phase == Phase::kThinking) {
            set_phase(Phase::kFinalizing);
        }
        if (action == MissingThinkEndAction::kAcceptAsFinal) {
            set_phase(Phase::kAnswering);
            append_empty_answer_span();
            set_phase(Phase::kDone);
            trace_cache_state();
            m_result.transcript.termination = "runaway";
            m_result.trace.append(TraceKind::kDone, {{"reason", "runaway"}, {"tokens", str(m_state.tokens_generated)}});
            return Flow::kStop;
        }
        if (!m_options.skip_rematerialize) {
            m_cache.discard_materialized();
        }
        mirror_eviction(m_cache.drop_segment(runaway.creation_order));
        reencode();
        return begin_answer(true);
    }

    Flow decode_thought_token() {
        const TokenId token = m_source.next(m_logits, m_state.phase);
        switch (m_segmenter.scan(token).kind) {
            case BoundaryKind::kThinkEnd:
                return handle_think_end();
            case BoundaryKind::kEos:
                return handle_missing_think_end("eos");
            default:
                break;
        }
        if (open_rows() + 1 > m_policy.segment_cap) {
            return handle_missing_think_end("cap");
        }
        return feed(token, true) ? Flow::kContinue : Flow::kStop;
    }

    Flow decode_answer_token() {
        const TokenId token = m_source.next(m_logits, Phase::kAnswering);
        if (m_segmenter.scan(token).kind == BoundaryKind::kEos) {
            return finish("eos");
        }
        if (open_rows() + 1 > m_policy.segment_cap) {
            return finish("answer_cap");
        }
        return feed(token, true) ? Flow::kContinue : Flow::kStop;
    }

    const Model& m_model;
    DualKvCache& m_cache;
    std::span<const TokenId> m_prompt;
    const ScalingPolicy& m_policy;
    TokenSource& m_source;
    const RunOptions& m_options;
    SentinelTokens m_sentinels;
    ThoughtSegmenter m_segmenter;
    std::optional<CacheBound> m_bound;

    GenerationResult m_result;
    ControllerState m_state;
    std::vector<TokenId> m_resident;
    Logits m_logits;
    std::optional<TranscriptSpan> m_span;
    bool m_boundary_pending = false;
    bool m_final_cycle_active = false;
    std::uint64_t m_cumulative_scores = 0;
    std::uint64_t m_steps = 0;
};

}  // namespace

std::string Transcript::to_text() const {
    std::ostringstream out;
    out << "prompt_len=" << prompt_len << '\n' << "tokens=";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out << (i ? "," : "") << tokens[i];
    }
    out << '\n' << "injections=" << join(injections) << '\n';
    out << "spans=" << format_spans(spans) << '\n';
    out << "termination=" << termination << '\n';
    return out.str();
}

GenerationResult run_generation(const Model& model, DualKvCache& cache, std::span<const TokenId> prompt,
                                const ScalingPolicy& policy, TokenSource& source, const RunOptions& options) {
    return Session(model, cache, prompt, policy, source, options).run();
}

}  // namespace minseek
