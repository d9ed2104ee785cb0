// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/validate/metrics.hpp"

#include <cmath>

#include "minseek/types.hpp"

namespace minseek {

MetricByLimit normalize(const MetricByLimit& values) {
    const auto base = values.find(RcLimit{0});
    if (base == values.end()) {
        throw ConfigError("normalization needs an M = 0 baseline");
    }
    if (!(base->second > 0.0) || !std::isfinite(base->second)) {
        throw ConfigError("M = 0 baseline must be positive and finite");
    }
    MetricByLimit out;
    for (const auto& [limit, value] : values) {
        out.emplace(limit, value / base->second);
    }
    return out;
}

double improvement_percent(double normalized) noexcept { return (normalized - 1.0) * 100.0; }

}  // namespace minseek
