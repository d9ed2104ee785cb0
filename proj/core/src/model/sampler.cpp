// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace minseek {

void SamplingParams::validate() const {
    if (!greedy && !(temperature > 0.0f)) {
        throw ConfigError("temperature must be positive outside argmax mode");
    }
    if (!(top_p > 0.0f && top_p <= 1.0f)) {
        throw ConfigError("top_p must lie in (0, 1]");
    }
}

TokenId argmax(std::span<const float> logits) {
    if (logits.empty()) {
        throw Error("argmax over empty logits");
    }
    return static_cast<TokenId>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

std::vector<double> nucleus_distribution(std::span<const float> logits, const SamplingParams& params) {
    params.validate();
    if (logits.empty()) {
        throw Error("sampling from empty logits");
    }
    for (float l : logits) {
        if (!std::isfinite(l)) {
            throw Error("sampling requires finite logits");
        }
    }
    const std::size_t n = logits.size();
    std::vector<double> probs(n, 0.0);
    if (params.greedy) {
        probs[static_cast<std::size_t>(argmax(logits))] = 1.0;
        return probs;
    }

    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        probs[i] = std::exp((static_cast<double>(logits[i]) - max_logit) / params.temperature);
        denom += probs[i];
    }
    for (double& p : probs) {
        p /= denom;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    double mass = 0.0;
    std::size_t keep = 0;
    while (keep < n) {
        mass += probs[order[keep]];
        ++keep;
        if (mass >= params.top_p) {
            break;
        }
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < keep; ++i) {
        out[order[i]] = probs[order[i]] / mass;
    }
    return out;
}

TokenId sample(std::span<const float> logits, const SamplingParams& params, CounterRng& rng) {
    if (params.greedy) {
        params.validate();
        return argmax(logits);
    }
    const std::vector<double> probs = nucleus_distribution(logits, params);
    const double u = rng.next_unit();
    double cumulative = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] == 0.0) {
            continue;
        }
        last_nonzero = i;
        cumulative += probs[i];
        if (u < cumulative) {
            return static_cast<TokenId>(i);
        }
    }
    return static_cast<TokenId>(last_nonzero);
}

}  // namespace minseek
