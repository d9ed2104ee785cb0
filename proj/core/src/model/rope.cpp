// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/rope.hpp"

#include <cmath>
#include <stdexcept>

namespace minseek {

void apply_rope_heads(std::span<float> heads, std::size_t d_head, std::size_t position_id, double theta) {
    if (d_head == 0 || d_head % 2 != 0) {
        throw std::invalid_argument("rotary embedding needs an even head dimension, got " +
                                    std::to_string(d_head));
    }
    if (heads.size() % d_head != 0) {
        throw std::invalid_argument("rotary input is not a whole number of heads");
    }
    if (position_id == 0) {
        return;
    }
    const double pos = static_cast<double>(position_id);
    for (std::size_t i = 0; i < d_head / 2; ++i) {
        const double freq = std::pow(theta, -2.0 * static_cast<double>(i) / static_cast<double>(d_head));
        const double angle = pos * freq;
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        for (std::size_t base = 0; base < heads.size(); base += d_head) {
            const double x0 = heads[base + 2 * i];
            const double x1 = heads[base + 2 * i + 1];
            heads[base + 2 * i] = static_cast<float>(x0 * c - x1 * s);
            heads[base + 2 * i + 1] = static_cast<float>(x0 * s + x1 * c);
        }
    }
}

std::vector<float> apply_rope(std::span<const float> vec, std::size_t position_id, double theta) {
    std::vector<float> out(vec.begin(), vec.end());
    apply_rope_heads(out, vec.size(), position_id, theta);
    return out;
}

}  // namespace minseek
