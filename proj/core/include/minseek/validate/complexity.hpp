// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "minseek/validate/cost_record.hpp"

namespace minseek {

/// Least-squares fits of cumulative attention scores against cumulative tokens.
struct ComplexityFit {
    double linear_r2 = 0.0;
    double quadratic_r2 = 0.0;
    double slope = 0.0;  // linear: y = slope * x + intercept
    double intercept = 0.0;
    double quad_a = 0.0;  // quadratic: y = a x^2 + b x + c
    double quad_b = 0.0;
    double quad_c = 0.0;
    std::size_t points = 0;
};

/// Throws std::invalid_argument with fewer than `min_cycles` distinct cycles or fewer than 3 records.
ComplexityFit fit_complexity(std::span<const CostRecord> records, std::size_t min_cycles = 20);

/// Fits y against x directly.
ComplexityFit fit_points(std::span<const double> x, std::span<const double> y);

/// Mean attention scores per decode step for each cycle index present, ordered by cycle.
std::vector<double> mean_cost_per_cycle(std::span<const CostRecord> records);

/// Cumulative attention scores at the last step of each cycle index present, ordered by cycle.
std::vector<std::uint64_t> cumulative_cost_by_cycle(std::span<const CostRecord> records);

}  // namespace minseek
