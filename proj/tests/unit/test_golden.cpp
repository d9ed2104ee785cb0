// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>

#include <gtest/gtest.h>

#include "golden_cases.hpp"

using namespace minseek;
using minseek::testing::GoldenCase;

namespace {

class Golden : public ::testing::TestWithParam<GoldenCase> {};

}  // namespace

TEST_P(Golden, TraceMatchesFrozenCopy) {
    const GoldenCase& c = GetParam();
    const std::filesystem::path path = std::filesystem::path(MINSEEK_GOLDEN_DIR) / (c.name() + ".trace");
    const std::string actual = minseek::testing::run_golden_case(c, MINSEEK_FIXTURE_DIR);
    if (std::getenv("MINSEEK_UPDATE_GOLDEN") != nullptr) {
        std::ofstream(path, std::ios::binary) << actual;
    }
    const std::string expected = minseek::testing::read_golden(path);
    ASSERT_FALSE(expected.empty()) << "missing golden " << path;
    EXPECT_EQ(actual, expected);
    EXPECT_NO_THROW(replay_phases(GenerationTrace::parse(actual)));
}

INSTANTIATE_TEST_SUITE_P(Frozen, Golden, ::testing::ValuesIn(minseek::testing::golden_cases()),
                         [](const ::testing::TestParamInfo<GoldenCase>& info) { return info.param.name(); });
