// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "minseek/controller/policy.hpp"

namespace minseek {

/// Orders finite M before the unbounded setting.
struct RcLimitLess {
    bool operator()(const RcLimit& a, const RcLimit& b) const noexcept {
        if (!a || !b) {
            return a.has_value() && !b.has_value();
        }
        return *a < *b;
    }
};

using MetricByLimit = std::map<RcLimit, double, RcLimitLess>;

/// Divides every value by the M = 0 entry, which must exist and be positive.
MetricByLimit normalize(const MetricByLimit& values);

/// (normalized - 1) x 100, e.g. 1.069 -> 6.9.
double improvement_percent(double normalized) noexcept;

}  // namespace minseek
