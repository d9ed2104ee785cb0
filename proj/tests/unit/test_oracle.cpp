// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "minseek/validate/oracle.hpp"

using namespace minseek;

TEST(CompareLogits, IdenticalVectorsWithin) {
    const std::vector<float> a{1.0f, -2.0f, 3.5f};
    const auto c = compare_logits(a, a);
    EXPECT_TRUE(c.within);
    EXPECT_EQ(c.max_abs_dev, 0.0);
}

TEST(CompareLogits, RelativeToleranceBoundary) {
    const std::vector<float> expected{100.0f, 1.0f};
    EXPECT_TRUE(compare_logits(std::vector<float>{100.009f, 1.0f}, expected).within);
    const auto c = compare_logits(std::vector<float>{100.02f, 1.0f}, expected);
    EXPECT_FALSE(c.within);
    EXPECT_EQ(c.worst_index, 0u);
    EXPECT_NEAR(c.max_rel_dev, 2e-4, 1e-6);
}

TEST(CompareLogits, AbsoluteFloorNearZero) {
    const std::vector<float> expected{0.0f};
    EXPECT_TRUE(compare_logits(std::vector<float>{5e-7f}, expected).within);
    EXPECT_FALSE(compare_logits(std::vector<float>{5e-6f}, expected).within);
}

TEST(CompareLogits, NonFiniteFails) {
    const std::vector<float> expected{1.0f};
    EXPECT_FALSE(compare_logits(std::vector<float>{std::numeric_limits<float>::quiet_NaN()}, expected).within);
    EXPECT_FALSE(compare_logits(std::vector<float>{std::numeric_limits<float>::infinity()}, expected).within);
}

TEST(CompareLogits, SizeMismatchThrows) {
    EXPECT_THROW(compare_logits(std::vector<float>{1.0f}, std::vector<float>{1.0f, 2.0f}), std::invalid_argument);
}

TEST(Oracles, AgreeWithIncrementalDecodeOnFreshCache) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    DualKvCache cache(CacheShape::from_model(cfg));
    cache.materialize_all();
    const std::vector<TokenId> tokens{5, 17, 42, 99, 3, 250, 7};
    Logits last;
    for (TokenId t : tokens) {
        last = model.forward_step(t, cache);
    }
    EXPECT_TRUE(compare_logits(last, recompute_oracle(tokens, model)).within);
    EXPECT_TRUE(compare_logits(last, cache_conditioned_oracle(cache, model, tokens.back())).within);
}

TEST(Oracles, RejectEmptyInput) {
    const ModelConfig cfg;
    const Model model(cfg, 7);
    EXPECT_THROW(recompute_oracle(std::vector<TokenId>{}, model), std::invalid_argument);
    DualKvCache cache(CacheShape::from_model(cfg));
    EXPECT_THROW(cache_conditioned_oracle(cache, model, 1), std::invalid_argument);
}
