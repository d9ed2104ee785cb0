// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "minseek/validate/metrics.hpp"

using namespace minseek;

TEST(Metrics, NormalizesByZeroCycleBaseline) {
    const MetricByLimit raw{{0, 0.5}, {2, 0.55}, {std::nullopt, 0.6}};
    const MetricByLimit n = normalize(raw);
    EXPECT_DOUBLE_EQ(n.at(0), 1.0);
    EXPECT_NEAR(n.at(2), 1.10, 1e-12);
    EXPECT_NEAR(n.at(std::nullopt), 1.2, 1e-12);
}

TEST(Metrics, ImprovementPercent) {
    EXPECT_NEAR(improvement_percent(1.069), 6.9, 1e-9);
    EXPECT_NEAR(improvement_percent(1.0), 0.0, 1e-12);
    EXPECT_NEAR(improvement_percent(0.95), -5.0, 1e-9);
}

TEST(Metrics, BaselineMustBeUsable) {
    EXPECT_THROW(normalize(MetricByLimit{{2, 0.5}}), ConfigError);
    EXPECT_THROW(normalize(MetricByLimit{{0, 0.0}, {2, 0.5}}), ConfigError);
    EXPECT_THROW(normalize(MetricByLimit{{0, std::numeric_limits<double>::infinity()}}), ConfigError);
}

TEST(Metrics, UnboundedSortsLast) {
    const MetricByLimit m{{std::nullopt, 1.0}, {100, 1.0}, {0, 1.0}};
    std::vector<RcLimit> order;
    for (const auto& [k, v] : m) {
        order.push_back(k);
    }
    EXPECT_EQ(order, (std::vector<RcLimit>{0, 100, std::nullopt}));
}
