// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "minseek/controller/controller.hpp"
#include "minseek/validate/oracle.hpp"
#include "reference.hpp"
#include "tolerance.hpp"

using namespace minseek;

namespace {

const std::vector<TokenId> kPrompt{1, 2, 3, 4};

ScalingPolicy make_policy(Method method, RcLimit m, int variant = 2, std::size_t u = 32) {
    ScalingPolicy p;
    p.method = method;
    p.max_rc = m;
    p.variant = variant;
    p.segment_cap = u;
    return p;
}

struct Harness {
    ModelConfig config;
    Model model;

    explicit Harness(ModelConfig cfg = {}) : config(cfg), model(cfg, 7) {}

    GenerationResult run(const ScalingPolicy& policy, const Script& script, RunOptions options = {},
                         const std::vector<TokenId>& prompt = kPrompt) const {
        DualKvCache cache(CacheShape::from_model(config), options.checked);
        ScriptedSource source(script, config);
        return run_generation(model, cache, prompt, policy, source, options);
    }
};

Script lengths(std::vector<std::size_t> l) { return Script::from_lengths(l); }

std::vector<std::string> kinds(const GenerationResult& r) {
    std::vector<std::string> out;
    const GenerationTrace skeleton = structural_events(r.trace);
    for (const auto& e : skeleton.events()) {
        out.emplace_back(to_string(e.kind));
    }
    return out;
}

void expect_offline_agrees(const GenerationResult& r) {
    const auto offline = split_transcript(r.transcript.tokens, r.transcript.injections, 252, r.transcript.prompt_len);
    EXPECT_EQ(format_spans(offline), format_spans(r.transcript.spans));
}

RunOptions checked() {
    RunOptions o;
    o.checked = true;
    return o;
}

}  // namespace

TEST(Controller, StandardGeneration) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kStandard, 0), lengths({10}), checked());
    EXPECT_EQ(r.stats.rc_count, 0u);
    EXPECT_EQ(r.transcript.termination, "eos");
    // 9 thought tokens, think_end, answer_start and two fillers.
    EXPECT_EQ(r.stats.tokens_generated, 13u);
    EXPECT_EQ(r.transcript.tokens.size(), 17u);
    EXPECT_EQ(format_spans(r.transcript.spans), "PT1:0+13 ANSWER:13+4");
    EXPECT_EQ(r.transcript.tokens[13], 252);
    EXPECT_EQ(r.transcript.tokens[14], 254);
    EXPECT_EQ(r.stats.answer_context_rows, 13u);
    EXPECT_EQ(r.stats.final_phase, Phase::kDone);
    EXPECT_EQ(replay_phases(r.trace),
              (std::vector<Phase>{Phase::kThinking, Phase::kFinalizing, Phase::kAnswering, Phase::kDone}));
}

TEST(Controller, ZeroCyclesIdenticalAcrossMethods) {
    const Harness h;
    const Script s = lengths({10, 5, 5});
    const std::string reference = h.run(make_policy(Method::kStandard, 0), s).trace.to_text();
    EXPECT_EQ(h.run(make_policy(Method::kMinSeek, 0, 1), s).trace.to_text(), reference);
    EXPECT_EQ(h.run(make_policy(Method::kMinSeek, 0, 2), s).trace.to_text(), reference);
    EXPECT_EQ(h.run(make_policy(Method::kBudgetForcing, 0), s).trace.to_text(), reference);
}

TEST(Controller, MinSeekKeepsShortestCycle) {
    const Harness h;
    // PT1 thought then RC contents 7, 4, 11, 4, 2 (script lengths count the closing think_end).
    const auto r = h.run(make_policy(Method::kMinSeek, 5), lengths({10, 8, 5, 12, 5, 3}), checked());
    ASSERT_EQ(r.decisions.size(), 5u);
    std::vector<std::size_t> kept;
    for (const auto& d : r.decisions) {
        kept.push_back(d.kept.rc_index);
    }
    EXPECT_EQ(kept, reference::min_argmin_scan({7, 4, 11, 4, 2}));
    EXPECT_EQ(r.stats.evictions, 4u);
    // PT1 holds prompt + 9 thought tokens; RC5 holds wait + 2.
    EXPECT_EQ(r.stats.answer_context_rows, 13u + 3u);
    EXPECT_EQ(r.stats.rc_count, 5u);
    EXPECT_FALSE(r.stats.final_cycle_run);
    expect_offline_agrees(r);
}

TEST(Controller, BudgetForcingKeepsEverything) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kBudgetForcing, 4), lengths({10, 8, 5, 12, 3}), checked());
    EXPECT_EQ(r.stats.evictions, 0u);
    EXPECT_TRUE(r.decisions.empty());
    EXPECT_EQ(r.trace.count(TraceKind::kMaterialized), 1u);
    EXPECT_EQ(r.stats.answer_context_rows, 13u + 8u + 5u + 12u + 3u);
    std::size_t last = 0;
    for (const CostRecord& c : r.costs) {
        EXPECT_EQ(c.cache_rows, last + 1);
        last = c.cache_rows;
    }
}

TEST(Controller, VariantOneAnswersAfterFinalCycle) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kMinSeek, 2, 1), lengths({10, 8, 5, 9}), checked());
    EXPECT_TRUE(r.stats.final_cycle_run);
    EXPECT_EQ(r.stats.rc_count, 2u);
    // PT1 13 rows, kept RC2 (5 rows), final cycle RC3 (9 rows).
    EXPECT_EQ(r.stats.answer_context_rows, 13u + 5u + 9u);
    EXPECT_EQ(r.transcript.injections.size(), 3u);
    EXPECT_EQ(r.decisions.size(), 2u);
    EXPECT_EQ(format_spans(r.transcript.spans), "PT1:0+13 RC1:13+8 RC2:21+5 RC3:26+9 ANSWER:35+4");
    expect_offline_agrees(r);
}

TEST(Controller, VariantTwoAnswersFromMinimum) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kMinSeek, 2, 2), lengths({10, 8, 5}), checked());
    EXPECT_FALSE(r.stats.final_cycle_run);
    EXPECT_EQ(r.stats.answer_context_rows, 13u + 5u);
    const auto& events = r.trace.events();
    // The last min-rule decision precedes the transition into Finalizing.
    std::size_t decision_seq = 0;
    std::size_t finalizing_seq = 0;
    for (const auto& e : events) {
        if (e.kind == TraceKind::kMinRuleDecision) {
            decision_seq = e.seq;
        }
        if (e.kind == TraceKind::kPhase && e.field("to") == "Finalizing") {
            finalizing_seq = e.seq;
        }
    }
    EXPECT_LT(decision_seq, finalizing_seq);
}

TEST(Controller, RunawayCycleRolledBackUnderVariantTwo) {
    const Harness h;
    Script s;
    s.thoughts = {{10, true}, {8, true}, {40, true}};
    const auto r = h.run(make_policy(Method::kMinSeek, 4, 2), s, checked());
    EXPECT_EQ(r.trace.count(TraceKind::kMissingThinkEnd), 1u);
    EXPECT_EQ(r.transcript.termination, "eos");
    // PT1 and RC1 remain; the runaway RC2 is gone and think_end was injected.
    EXPECT_EQ(r.stats.answer_context_rows, 13u + 8u);
    bool injected_think_end = false;
    for (const auto& e : r.trace.events()) {
        if (e.kind == TraceKind::kInjected && e.field("token") == "think_end") {
            injected_think_end = true;
        }
        if (e.kind == TraceKind::kMissingThinkEnd) {
            EXPECT_EQ(e.field("action"), "rollback");
            EXPECT_EQ(e.field("reason"), "cap");
        }
    }
    EXPECT_TRUE(injected_think_end);
    expect_offline_agrees(r);
}

TEST(Controller, RunawayAcceptedUnderVariantOneAndBudgetForcing) {
    const Harness h;
    Script s;
    s.thoughts = {{10, true}, {8, true}, {40, true}};
    for (const ScalingPolicy& p : {make_policy(Method::kMinSeek, 4, 1), make_policy(Method::kBudgetForcing, 4)}) {
        const auto r = h.run(p, s, checked());
        EXPECT_EQ(r.transcript.termination, "runaway") << p.label();
        EXPECT_EQ(r.trace.events().back().field("reason"), "runaway");
        EXPECT_EQ(r.transcript.spans.back().length, 0u);
        EXPECT_EQ(replay_phases(r.trace).back(), Phase::kDone);
        expect_offline_agrees(r);
    }
}

TEST(Controller, RunawayFirstThoughtAcceptedForEveryMethod) {
    const Harness h;
    Script s;
    s.thoughts = {{60, true}};
    for (const ScalingPolicy& p : {make_policy(Method::kMinSeek, 4, 2), make_policy(Method::kMinSeek, 4, 1),
                                   make_policy(Method::kBudgetForcing, 4), make_policy(Method::kStandard, 0)}) {
        const auto r = h.run(p, s, checked());
        EXPECT_EQ(r.transcript.termination, "runaway") << p.label();
        EXPECT_EQ(r.stats.max_rows, 32u);
        expect_offline_agrees(r);
    }
}

TEST(Controller, EosDuringThinkingIsMissingThinkEnd) {
    const Harness h;
    Script s;
    s.thoughts = {{10, true}, {6, false}};
    const auto r = h.run(make_policy(Method::kMinSeek, 4, 2), s, checked());
    ASSERT_EQ(r.trace.count(TraceKind::kMissingThinkEnd), 1u);
    for (const auto& e : r.trace.events()) {
        if (e.kind == TraceKind::kMissingThinkEnd) {
            EXPECT_EQ(e.field("reason"), "eos");
        }
    }
    EXPECT_EQ(r.transcript.termination, "eos");
    EXPECT_EQ(r.stats.answer_context_rows, 13u);
}

TEST(Controller, UnboundedRunStopsAtTokenLimit) {
    const Harness h;
    Script s = lengths({17});
    s.repeat = true;
    ScalingPolicy p = make_policy(Method::kMinSeek, std::nullopt);
    p.token_limit = 1000;
    const auto r = h.run(p, s, checked());
    EXPECT_EQ(r.transcript.termination, "eos");
    // Each cycle adds 17 tokens (wait + 16); the limit is crossed once, then the answer follows.
    EXPECT_GT(r.stats.tokens_generated, 1000u);
    EXPECT_LE(r.stats.tokens_generated, 1000u + 17u + 4u);
    EXPECT_EQ(r.stats.rc_count, (1000u - 16u) / 17u + 1u);
    EXPECT_LE(r.stats.max_rows, 96u);
}

TEST(Controller, HardCapTruncates) {
    const Harness h;
    // The soft limit finalizes after PT1; the long answer then runs into 4 x token_limit.
    Script s = lengths({20});
    s.answer_length = 100;
    ScalingPolicy p = make_policy(Method::kMinSeek, std::nullopt);
    p.token_limit = 10;
    const auto r = h.run(p, s, checked());
    EXPECT_TRUE(r.stats.truncated);
    EXPECT_EQ(r.transcript.termination, "hard_cap");
    EXPECT_EQ(r.stats.tokens_generated, 40u);
    EXPECT_EQ(r.stats.final_phase, Phase::kAnswering);
    EXPECT_EQ(r.trace.events().back().kind, TraceKind::kTruncated);
    EXPECT_NO_THROW(replay_phases(r.trace));
    expect_offline_agrees(r);
}

TEST(Controller, DeterministicTraces) {
    const Harness h;
    const Script s = Script::random(12, 4, 32, 5);
    const auto p = make_policy(Method::kMinSeek, 10);
    EXPECT_EQ(h.run(p, s).trace.to_text(), h.run(p, s).trace.to_text());
    EXPECT_EQ(h.run(p, s).transcript.to_text(), h.run(p, s).transcript.to_text());
}

TEST(Controller, SamplingRunsAreDeterministic) {
    const Harness h;
    const auto p = make_policy(Method::kMinSeek, 4);
    auto run = [&] {
        DualKvCache cache(CacheShape::from_model(h.config));
        SamplingSource src(SamplingParams{}, 11);
        return run_generation(h.model, cache, kPrompt, p, src).trace.to_text();
    };
    EXPECT_EQ(run(), run());
}

TEST(Controller, BoundaryObserverAfterEachBoundary) {
    const Harness h;
    RunOptions o = checked();
    std::vector<std::size_t> rows;
    o.on_boundary = [&](const BoundaryCheck& b) {
        EXPECT_EQ(b.boundary_index, rows.size());
        EXPECT_EQ(b.resident_tokens.size(), b.cache->length());
        rows.push_back(b.resident_tokens.size());
    };
    const auto r = h.run(make_policy(Method::kMinSeek, 3), lengths({10, 8, 5, 12}), o);
    // Three wait injections and the answer trigger.
    EXPECT_EQ(r.stats.boundaries, 4u);
    EXPECT_EQ(rows, (std::vector<std::size_t>{14, 22, 19, 19}));
}

TEST(Controller, CacheConditionedOracleHoldsAtEveryBoundary) {
    const Harness h;
    RunOptions o = checked();
    std::size_t seen = 0;
    o.on_boundary = [&](const BoundaryCheck& b) {
        ++seen;
        const Logits ref = cache_conditioned_oracle(*b.cache, h.model, b.resident_tokens.back());
        EXPECT_TRUE(minseek::testing::close_rel(b.logits, ref)) << "boundary " << b.boundary_index;
    };
    h.run(make_policy(Method::kMinSeek, 20), Script::random(21, 4, 32, 9), o);
    EXPECT_EQ(seen, 21u);
}

TEST(Controller, RecomputeOracleHoldsForSingleLayerModel) {
    ModelConfig cfg;
    cfg.n_layers = 1;
    const Harness h(cfg);
    RunOptions o = checked();
    std::size_t seen = 0;
    o.on_boundary = [&](const BoundaryCheck& b) {
        ++seen;
        const Logits ref = recompute_oracle(b.resident_tokens, h.model);
        EXPECT_TRUE(minseek::testing::close_rel(b.logits, ref)) << "boundary " << b.boundary_index;
    };
    const auto r = h.run(make_policy(Method::kMinSeek, 20), Script::random(21, 4, 32, 9), o);
    EXPECT_EQ(seen, 21u);
    EXPECT_GT(r.stats.evictions, 0u);
}

TEST(Controller, RecomputeOracleHoldsWithoutEviction) {
    const Harness h;
    RunOptions o = checked();
    std::size_t seen = 0;
    o.on_boundary = [&](const BoundaryCheck& b) {
        ++seen;
        EXPECT_TRUE(minseek::testing::close_rel(b.logits, recompute_oracle(b.resident_tokens, h.model)));
    };
    h.run(make_policy(Method::kBudgetForcing, 6), Script::random(7, 4, 32, 2), o);
    EXPECT_EQ(seen, 7u);
}

TEST(Controller, SkippingReencodeIsDetected) {
    const Harness h;
    RunOptions o = checked();
    o.skip_rematerialize = true;
    double worst = 0.0;
    o.on_boundary = [&](const BoundaryCheck& b) {
        const auto c = compare_logits(b.logits, cache_conditioned_oracle(*b.cache, h.model, b.resident_tokens.back()));
        worst = std::max(worst, c.max_rel_dev);
    };
    const auto r = h.run(make_policy(Method::kMinSeek, 20), Script::random(21, 4, 32, 9), o);
    EXPECT_GT(r.stats.evictions, 0u);
    EXPECT_GT(worst, 1e-4);
}

TEST(Controller, PositionsStayBelowBound) {
    ModelConfig cfg;
    cfg.max_context_length = 128;
    const Harness h(cfg);
    Script s = Script::random(97, 4, 32, 4);
    s.repeat = true;
    ScalingPolicy p = make_policy(Method::kMinSeek, std::nullopt);
    p.token_limit = 3000;
    const auto r = h.run(p, s, checked());
    EXPECT_GT(r.stats.tokens_generated, 3000u);
    EXPECT_LE(r.stats.max_position_id.value(), 95u);
    EXPECT_LE(r.stats.max_rows, 96u);
}

TEST(Controller, CostRecordsCountAttentionScores) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kMinSeek, 3), lengths({10, 8, 5, 12}));
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < r.costs.size(); ++i) {
        const CostRecord& c = r.costs[i];
        EXPECT_EQ(c.attention_scores, c.cache_rows * 16u);
        total += c.attention_scores;
        EXPECT_EQ(c.cumulative_scores, total);
        EXPECT_EQ(c.cumulative_tokens, i + 1);
    }
    EXPECT_EQ(r.costs.size(), r.transcript.tokens.size());
    EXPECT_EQ(r.costs.front().cycle, 0u);
}

TEST(Controller, StructuralEventOrderForOneCycle) {
    const Harness h;
    const auto r = h.run(make_policy(Method::kMinSeek, 1), lengths({6, 4}));
    EXPECT_EQ(kinds(r), (std::vector<std::string>{"Phase", "Materialized", "ThinkEnd", "Materialized", "CacheState",
                                                  "Injected", "ThinkEnd", "MinRuleDecision", "Phase", "Materialized",
                                                  "CacheState", "Phase", "AnswerStart", "Phase", "CacheState",
                                                  "Done"}));
}

TEST(Controller, OnlineAndOfflineSegmentationAgree) {
    const Harness h;
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<std::size_t> len(1, 40);
    std::uniform_int_distribution<int> closes(0, 9);
    const std::vector<ScalingPolicy> policies{make_policy(Method::kMinSeek, 3, 1), make_policy(Method::kMinSeek, 3, 2),
                                              make_policy(Method::kBudgetForcing, 3), make_policy(Method::kStandard, 0),
                                              make_policy(Method::kMinSeek, 0, 1)};
    for (int trial = 0; trial < 40; ++trial) {
        Script s;
        for (int i = 0; i < 6; ++i) {
            s.thoughts.push_back({len(gen), closes(gen) != 0});
        }
        for (const ScalingPolicy& p : policies) {
            const auto r = h.run(p, s, checked());
            expect_offline_agrees(r);
            EXPECT_NO_THROW(replay_phases(r.trace));
        }
    }
}

TEST(Controller, RejectsBadInputs) {
    const Harness h;
    const Script s = lengths({5});
    EXPECT_THROW(h.run(make_policy(Method::kMinSeek, 2), s, {}, std::vector<TokenId>{}), ConfigError);
    EXPECT_THROW(h.run(make_policy(Method::kMinSeek, 2, 2, 3), s, {}, kPrompt), ConfigError);
    ScalingPolicy too_big = make_policy(Method::kBudgetForcing, 20);
    EXPECT_THROW(h.run(too_big, s), ConfigError);

    DualKvCache used(CacheShape::from_model(h.config));
    used.materialize_all();
    h.model.forward_step(1, used);
    ScriptedSource src(s, h.config);
    EXPECT_THROW(run_generation(h.model, used, kPrompt, make_policy(Method::kMinSeek, 2), src), ConfigError);

    ModelConfig other;
    other.n_layers = 2;
    DualKvCache wrong(CacheShape::from_model(other));
    EXPECT_THROW(run_generation(h.model, wrong, kPrompt, make_policy(Method::kMinSeek, 2), src), ConfigError);
}

TEST(Controller, ExhaustedScriptPropagates) {
    const Harness h;
    EXPECT_THROW(h.run(make_policy(Method::kMinSeek, 5), lengths({5, 5})), ScriptExhausted);
}
