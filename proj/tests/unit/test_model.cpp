// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "minseek/cache/dual_kv_cache.hpp"
#include "minseek/model/model.hpp"
#include "tolerance.hpp"

using namespace minseek;
using minseek::testing::close_rel;

namespace {

DualKvCache fresh_cache(const ModelConfig& cfg, bool checked = true) {
    DualKvCache cache(CacheShape::from_model(cfg), checked);
    cache.materialize_all();
    return cache;
}

std::vector<TokenId> random_tokens(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<TokenId> dist(0, 251);
    std::vector<TokenId> out(n);
    for (TokenId& t : out) {
        t = dist(gen);
    }
    return out;
}

std::vector<std::size_t> iota_positions(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    return p;
}

}  // namespace

TEST(Model, SingleTokenMatchesFullPass) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    const std::vector<TokenId> tokens{42};
    const Logits step = model.forward_step(42, cache, 0);
    const auto full = model.forward_full(tokens, iota_positions(1));
    EXPECT_TRUE(close_rel(step, full[0]));
}

TEST(Model, IncrementalChainMatchesFullPassAtEveryStep) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    const auto tokens = random_tokens(64, 3);
    std::vector<Logits> steps;
    for (TokenId t : tokens) {
        steps.push_back(model.forward_step(t, cache));
    }
    const auto full = model.forward_full(tokens, iota_positions(tokens.size()));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        ASSERT_TRUE(close_rel(steps[i], full[i])) << "step " << i;
    }
}

TEST(Model, QueryPositionFollowsPrefill) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    const auto pt1 = random_tokens(13, 4);
    for (TokenId t : pt1) {
        model.forward_step(t, cache);
    }
    EXPECT_EQ(cache.length(), 13u);
    EXPECT_THROW(model.forward_step(5, cache, 12), CacheError);
    EXPECT_THROW(model.forward_step(5, cache, 14), CacheError);
    EXPECT_NO_THROW(model.forward_step(5, cache, 13));
    EXPECT_EQ(cache.length(), 14u);
}

TEST(Model, LogitsFiniteOverManySteps) {
    const ModelConfig cfg;
    const Model model(cfg, 8);
    DualKvCache cache = fresh_cache(cfg, false);
    for (TokenId t : random_tokens(100, 5)) {
        const Logits logits = model.forward_step(t, cache);
        ASSERT_EQ(logits.size(), cfg.vocab_size);
        for (float x : logits) {
            ASSERT_TRUE(std::isfinite(x));
        }
    }
}

TEST(Model, StepAppendsOneRowPerLayer) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    model.forward_step(3, cache);
    model.forward_step(4, cache);
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        EXPECT_EQ(cache.layer_length(l), 2u);
    }
}

TEST(Model, PositionOverflowSignalled) {
    ModelConfig cfg;
    cfg.max_context_length = 8;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    for (TokenId t : random_tokens(8, 6)) {
        model.forward_step(t, cache);
    }
    try {
        model.forward_step(1, cache, 8);
        FAIL() << "expected PositionOverflow";
    } catch (const PositionOverflow& e) {
        EXPECT_EQ(e.position(), 8u);
    }
}

TEST(Model, UnmaterializedCacheRejected) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache(CacheShape::from_model(cfg));
    EXPECT_THROW(model.forward_step(1, cache, 0), CacheError);
}

TEST(Model, TokenOutsideVocabularyRejected) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache = fresh_cache(cfg);
    EXPECT_THROW(model.forward_step(256, cache), Error);
    EXPECT_THROW(model.forward_step(-1, cache), Error);
}

TEST(Model, FullPassRejectsBadPositions) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    const std::vector<TokenId> tokens{1, 2, 3};
    const std::vector<std::size_t> short_positions{0, 1};
    const std::vector<std::size_t> permuted{0, 2, 1};
    const std::vector<std::size_t> repeated{0, 1, 1};
    EXPECT_THROW(model.forward_full(tokens, short_positions), Error);
    EXPECT_THROW(model.forward_full(tokens, permuted), Error);
    EXPECT_THROW(model.forward_full(tokens, repeated), Error);
}

TEST(Model, FullPassDependsOnlyOnRelativePositions) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    const auto tokens = random_tokens(12, 9);
    std::vector<std::size_t> shifted = iota_positions(12);
    for (auto& p : shifted) {
        p += 100;
    }
    const auto a = model.forward_full(tokens, iota_positions(12));
    const auto b = model.forward_full(tokens, shifted);
    EXPECT_TRUE(close_rel(b.back(), a.back()));
}

TEST(Model, DeterministicForSameSeed) {
    const ModelConfig cfg;
    const Model a(cfg, 7);
    const Model b(cfg, 7);
    DualKvCache ca = fresh_cache(cfg);
    DualKvCache cb = fresh_cache(cfg);
    for (TokenId t : random_tokens(10, 2)) {
        ASSERT_EQ(a.forward_step(t, ca), b.forward_step(t, cb));
    }
}

TEST(Model, AttentionScoreCount) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    EXPECT_EQ(model.attention_scores_per_step(10), 10u * 4u * 4u);
}
