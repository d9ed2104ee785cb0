// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "minseek/model/config.hpp"

namespace minseek {

/// Parameters of one decoder block. Matrices are row-major [out][in].
struct LayerWeights {
    std::vector<float> attn_norm;  // d_model
    std::vector<float> wq;         // d_model x d_model
    std::vector<float> wk;         // d_model x d_model
    std::vector<float> wv;         // d_model x d_model
    std::vector<float> wo;         // d_model x d_model
    std::vector<float> mlp_norm;   // d_model
    std::vector<float> w_up;       // d_ff x d_model
    std::vector<float> w_down;     // d_model x d_ff
};

struct Weights {
    std::vector<float> token_embedding;  // vocab_size x d_model
    std::vector<LayerWeights> layers;
    std::vector<float> final_norm;  // d_model
    std::vector<float> unembedding;  // vocab_size x d_model

    /// FNV-1a over the raw bytes of every tensor in declaration order.
    std::uint64_t checksum() const;

    /// Throws ConfigError if any tensor shape disagrees with `config`.
    void check_shapes(const ModelConfig& config) const;
};

/// Standard deviation of every Gaussian-initialized matrix.
inline constexpr double kInitStddev = 0.02;

/**
 * Deterministic initialization: matrices are N(0, 0.02^2) drawn from a
 * counter-based generator keyed by (seed, tensor index); normalization gains
 * are 1.
 */
Weights init_weights(const ModelConfig& config, std::uint64_t seed);

}  // namespace minseek
