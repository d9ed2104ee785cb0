// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/model.hpp"

#include <cmath>
#include <string>

#include "minseek/model/attention.hpp"
#include "minseek/model/rope.hpp"

namespace minseek {

namespace {

constexpr float kNormEps = 1e-5f;

void rms_norm(std::span<const float> x, std::span<const float> gain, std::span<float> out) {
    float sum_sq = 0.0f;
    for (float v : x) {
        sum_sq += v * v;
    }
    const float inv = 1.0f / std::sqrt(sum_sq / static_cast<float>(x.size()) + kNormEps);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * inv * gain[i];
    }
}

// out[r] = sum_c m[r][c] * x[c]
void matvec(std::span<const float> m, std::span<const float> x, std::span<float> out) {
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < out.size(); ++r) {
        const float* row = m.data() + r * cols;
        float acc = 0.0f;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        out[r] = acc;
    }
}

float gelu(float x) {
    constexpr float kAlpha = 0.7978845608028654f;  // sqrt(2/pi)
    return 0.5f * x * (1.0f + std::tanh(kAlpha * (x + 0.044715f * x * x * x)));
}

void mlp_residual(const LayerWeights& lw, std::span<float> x, std::size_t d_ff) {
    std::vector<float> h(x.size());
    std::vector<float> up(d_ff);
    std::vector<float> down(x.size());
    rms_norm(x, lw.mlp_norm, h);
    matvec(lw.w_up, h, up);
    for (float& u : up) {
        u = gelu(u);
    }
    matvec(lw.w_down, up, down);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += down[i];
    }
}

Logits unembed(const ModelConfig& config, const Weights& w, std::span<const float> x) {
    std::vector<float> h(config.d_model);
    rms_norm(x, w.final_norm, h);
    Logits logits(config.vocab_size);
    matvec(w.unembedding, h, logits);
    return logits;
}

}  // namespace

Model::Model(ModelConfig config, Weights weights) : m_config(std::move(config)), m_weights(std::move(weights)) {
    m_config.validate();
    m_weights.check_shapes(m_config);
}

Model::Model(const ModelConfig& config, std::uint64_t seed) : Model(config, init_weights(config, seed)) {}

void Model::check_token(TokenId token) const {
    if (token < 0 || static_cast<std::size_t>(token) >= m_config.vocab_size) {
        throw Error("token id " + std::to_string(token) + " outside vocabulary");
    }
}

Logits Model::forward_step(TokenId token, DualKvCache& cache, std::size_t query_position_id) const {
    check_token(token);
    if (query_position_id >= m_config.max_context_length) {
        throw PositionOverflow(query_position_id, m_config.max_context_length);
    }
    if (query_position_id != cache.length()) {
        throw CacheError("query position " + std::to_string(query_position_id) +
                         " does not equal cache length " + std::to_string(cache.length()));
    }
    if (!cache.materialized()) {
        throw CacheError("forward_step requires a materialized cache");
    }

    const std::size_t d = m_config.d_model;
    const AttentionShape shape{m_config.n_heads, m_config.d_head};
    const float scale = 1.0f / std::sqrt(static_cast<float>(m_config.d_head));

    std::vector<float> x(m_weights.token_embedding.begin() + static_cast<std::ptrdiff_t>(token * d),
                         m_weights.token_embedding.begin() + static_cast<std::ptrdiff_t>((token + 1) * d));
    std::vector<float> h(d), q(d), k(d), k_rot(d), v(d), out(d);

    for (std::size_t l = 0; l < m_config.n_layers; ++l) {
        const LayerWeights& lw = m_weights.layers[l];
        rms_norm(x, lw.attn_norm, h);
        matvec(lw.wq, h, q);
        matvec(lw.wk, h, k);
        matvec(lw.wv, h, v);
        apply_rope_heads(q, m_config.d_head, query_position_id, m_config.rope_theta);
        k_rot = k;
        apply_rope_heads(k_rot, m_config.d_head, query_position_id, m_config.rope_theta);

        const DualKvCache::LayerView view = cache.update(l, k_rot, k, v);
        const std::vector<float> context = attention_step(q, view.keys, view.values, shape, scale);
        matvec(lw.wo, context, out);
        for (std::size_t i = 0; i < d; ++i) {
            x[i] += out[i];
        }
        mlp_residual(lw, x, m_config.d_ff);
    }
    return unembed(m_config, m_weights, x);
}

std::vector<Logits> Model::forward_full(std::span<const TokenId> tokens,
                                        std::span<const std::size_t> position_ids) const {
    if (tokens.size() != position_ids.size()) {
        throw Error("forward_full: " + std::to_string(tokens.size()) + " tokens but " +
                    std::to_string(position_ids.size()) + " position ids");
    }
    for (std::size_t i = 0; i < position_ids.size(); ++i) {
        if (i > 0 && position_ids[i] <= position_ids[i - 1]) {
            throw Error("forward_full: position ids must be strictly increasing");
        }
        if (position_ids[i] >= m_config.max_context_length) {
            throw PositionOverflow(position_ids[i], m_config.max_context_length);
        }
    }
    for (TokenId t : tokens) {
        check_token(t);
    }

    const std::size_t n = tokens.size();
    const std::size_t d = m_config.d_model;
    const std::size_t dh = m_config.d_head;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // Residual stream for every position, [n][d].
    std::vector<float> x(n * d);
    for (std::size_t t = 0; t < n; ++t) {
        const auto src = m_weights.token_embedding.begin() + static_cast<std::ptrdiff_t>(tokens[t] * d);
        std::copy(src, src + static_cast<std::ptrdiff_t>(d), x.begin() + static_cast<std::ptrdiff_t>(t * d));
    }

    std::vector<float> h(d), queries(n * d), keys(n * d), values(n * d), out(d);
    std::vector<double> weights;
    std::vector<float> context(d);
    for (std::size_t l = 0; l < m_config.n_layers; ++l) {
        const LayerWeights& lw = m_weights.layers[l];
        for (std::size_t t = 0; t < n; ++t) {
            std::span<float> row(x.data() + t * d, d);
            rms_norm(row, lw.attn_norm, h);
            std::span<float> qt(queries.data() + t * d, d);
            std::span<float> kt(keys.data() + t * d, d);
            matvec(lw.wq, h, qt);
            matvec(lw.wk, h, kt);
            matvec(lw.wv, h, std::span<float>(values.data() + t * d, d));
            apply_rope_heads(qt, dh, position_ids[t], m_config.rope_theta);
            apply_rope_heads(kt, dh, position_ids[t], m_config.rope_theta);
        }
        // Causal attention computed from scratch for every query position.
        for (std::size_t t = 0; t < n; ++t) {
            std::fill(context.begin(), context.end(), 0.0f);
            for (std::size_t hd = 0; hd < m_config.n_heads; ++hd) {
                const std::size_t off = hd * dh;
                weights.assign(t + 1, 0.0);
                double max_score = -1e300;
                for (std::size_t s = 0; s <= t; ++s) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < dh; ++i) {
                        dot += static_cast<double>(queries[t * d + off + i]) * keys[s * d + off + i];
                    }
                    weights[s] = dot * scale;
                    max_score = std::max(max_score, weights[s]);
                }
                double denom = 0.0;
                for (double& w : weights) {
                    w = std::exp(w - max_score);
                    denom += w;
                }
                for (std::size_t i = 0; i < dh; ++i) {
                    double acc = 0.0;
                    for (std::size_t s = 0; s <= t; ++s) {
                        acc += weights[s] * values[s * d + off + i];
                    }
                    context[off + i] = static_cast<float>(acc / denom);
                }
            }
            matvec(lw.wo, context, out);
            for (std::size_t i = 0; i < d; ++i) {
                x[t * d + i] += out[i];
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            mlp_residual(lw, std::span<float>(x.data() + t * d, d), m_config.d_ff);
        }
    }

    std::vector<Logits> logits;
    logits.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        logits.push_back(unembed(m_config, m_weights, std::span<const float>(x.data() + t * d, d)));
    }
    return logits;
}

}  // namespace minseek
