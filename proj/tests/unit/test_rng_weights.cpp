// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "minseek/model/rng.hpp"
#include "minseek/model/weights.hpp"

using namespace minseek;

TEST(CounterRng, SameSeedAndStreamRepeat) {
    CounterRng a(42, 3);
    CounterRng b(42, 3);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
    EXPECT_EQ(a.counter(), 100u);
}

TEST(CounterRng, StreamsDiffer) {
    CounterRng a(42, 0);
    CounterRng b(42, 1);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 64; ++i) {
        seen.insert(a.next_u64());
        seen.insert(b.next_u64());
    }
    EXPECT_EQ(seen.size(), 128u);
}

TEST(CounterRng, UnitInHalfOpenInterval) {
    CounterRng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_unit();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(CounterRng, GaussianMoments) {
    CounterRng rng(9);
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // 5 sigma on the sample mean and variance.
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(Weights, ShapesAndGains) {
    const ModelConfig cfg;
    const Weights w = init_weights(cfg, 7);
    EXPECT_NO_THROW(w.check_shapes(cfg));
    EXPECT_EQ(w.token_embedding.size(), cfg.vocab_size * cfg.d_model);
    EXPECT_EQ(w.layers.size(), cfg.n_layers);
    for (const LayerWeights& lw : w.layers) {
        for (float g : lw.attn_norm) {
            ASSERT_EQ(g, 1.0f);
        }
        for (float g : lw.mlp_norm) {
            ASSERT_EQ(g, 1.0f);
        }
        EXPECT_EQ(lw.w_up.size(), cfg.d_ff * cfg.d_model);
        EXPECT_EQ(lw.w_down.size(), cfg.d_model * cfg.d_ff);
    }
    for (float g : w.final_norm) {
        ASSERT_EQ(g, 1.0f);
    }
}

TEST(Weights, InitStatisticsMatchStddev) {
    const ModelConfig cfg;
    const Weights w = init_weights(cfg, 7);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    auto add = [&](const std::vector<float>& t) {
        for (float v : t) {
            sum += v;
            sum_sq += static_cast<double>(v) * v;
            ++n;
        }
    };
    add(w.token_embedding);
    add(w.unembedding);
    for (const LayerWeights& lw : w.layers) {
        add(lw.wq);
        add(lw.wk);
        add(lw.wv);
        add(lw.wo);
        add(lw.w_up);
        add(lw.w_down);
    }
    const double mean = sum / static_cast<double>(n);
    const double sd = std::sqrt(sum_sq / static_cast<double>(n) - mean * mean);
    EXPECT_NEAR(mean, 0.0, 5.0 * 0.02 / std::sqrt(static_cast<double>(n)));
    EXPECT_NEAR(sd, kInitStddev, 5.0 * 0.02 / std::sqrt(2.0 * static_cast<double>(n)));
}

TEST(Weights, DeterministicPerSeed) {
    const ModelConfig cfg;
    EXPECT_EQ(init_weights(cfg, 7).checksum(), init_weights(cfg, 7).checksum());
    EXPECT_NE(init_weights(cfg, 7).checksum(), init_weights(cfg, 8).checksum());
}

TEST(Weights, PinnedChecksums) {
    const ModelConfig cfg;
    EXPECT_EQ(init_weights(cfg, 7).checksum(), 5493792299075464284ull);
    EXPECT_EQ(init_weights(cfg, 8).checksum(), 4417357036980692118ull);
}

TEST(Weights, ShapeMismatchRejected) {
    const ModelConfig cfg;
    Weights w = init_weights(cfg, 1);
    w.layers[2].wk.pop_back();
    EXPECT_THROW(w.check_shapes(cfg), ConfigError);
}
