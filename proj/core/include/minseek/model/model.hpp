// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minseek/cache/dual_kv_cache.hpp"
#include "minseek/model/config.hpp"
#include "minseek/model/weights.hpp"

namespace minseek {

/**
 * Pre-norm decoder-only transformer with rotary embeddings on queries and keys.
 *
 * Immutable after construction; const member functions may be called from
 * several sessions at once as long as each owns its cache.
 */
class Model {
public:
    Model(ModelConfig config, Weights weights);
    Model(const ModelConfig& config, std::uint64_t seed);

    const ModelConfig& config() const noexcept { return m_config; }
    const Weights& weights() const noexcept { return m_weights; }

    /**
     * Incremental decode of one token. The query is rotated at
     * `query_position_id`, which must equal cache.length(); the new key is
     * stored position-free and rotated at the same position. Appends exactly
     * one row per layer.
     */
    Logits forward_step(TokenId token, DualKvCache& cache, std::size_t query_position_id) const;

    /// Convenience overload using query position cache.length().
    Logits forward_step(TokenId token, DualKvCache& cache) const {
        return forward_step(token, cache, cache.length());
    }

    /**
     * From-scratch causal forward pass with explicit, strictly increasing
     * position ids. Returns logits for every position.
     */
    std::vector<Logits> forward_full(std::span<const TokenId> tokens,
                                     std::span<const std::size_t> position_ids) const;

    /// Attention score evaluations for one decode step against `rows` cached entries.
    std::uint64_t attention_scores_per_step(std::size_t rows) const noexcept {
        return static_cast<std::uint64_t>(rows) * m_config.n_layers * m_config.n_heads;
    }

private:
    void check_token(TokenId token) const;

    ModelConfig m_config;
    Weights m_weights;
};

}  // namespace minseek
