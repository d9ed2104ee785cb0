// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>

#include "minseek/types.hpp"

namespace minseek {

/// Reserved single-token ids that mark thought structure.
struct SentinelTokens {
    TokenId think_end = 252;
    TokenId wait = 253;
    TokenId answer_start = 254;
    TokenId eos = 255;

    bool is_sentinel(TokenId id) const noexcept {
        return id == think_end || id == wait || id == answer_start || id == eos;
    }
};

/**
 * Architecture of the toy decoder-only transformer.
 *
 * The defaults describe the reference toy model used by the tests and the
 * acceptance suite: 4 layers, 4 heads, d_model 64, d_ff 256, vocab 256.
 */
struct ModelConfig {
    std::size_t n_layers = 4;
    std::size_t n_heads = 4;
    std::size_t d_model = 64;
    std::size_t d_head = 16;
    std::size_t d_ff = 256;
    std::size_t vocab_size = 256;
    double rope_theta = 10000.0;
    std::size_t max_context_length = 512;
    SentinelTokens sentinels{};

    /// Throws ConfigError describing the first violated invariant.
    void validate() const;
};

/// Current version of the on-disk model config schema.
inline constexpr int kModelConfigSchemaVersion = 1;

/// Parses a JSON model config. Unknown keys are rejected; missing keys keep defaults.
ModelConfig parse_model_config(std::string_view json_text);

ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace minseek
