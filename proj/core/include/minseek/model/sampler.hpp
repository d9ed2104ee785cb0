// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "minseek/model/rng.hpp"
#include "minseek/types.hpp"

namespace minseek {

/// Decoding configuration. The defaults are the reference sampling setup.
struct SamplingParams {
    float temperature = 0.6f;
    float top_p = 0.95f;
    bool greedy = false;  // explicit argmax mode; temperature is ignored

    /// Throws ConfigError unless greedy or temperature > 0, and top_p in (0, 1].
    void validate() const;

    static SamplingParams argmax() noexcept { return {1.0f, 1.0f, true}; }
};

/// Index of the largest logit; the lowest index wins ties.
TokenId argmax(std::span<const float> logits);

/**
 * Probabilities after temperature and nucleus truncation: the smallest prefix of
 * the descending-sorted softmax whose mass reaches top_p, renormalized. Ties in
 * the sort keep index order.
 */
std::vector<double> nucleus_distribution(std::span<const float> logits, const SamplingParams& params);

/// Draws one token. Consumes exactly one uniform from `rng` unless greedy.
TokenId sample(std::span<const float> logits, const SamplingParams& params, CounterRng& rng);

}  // namespace minseek
