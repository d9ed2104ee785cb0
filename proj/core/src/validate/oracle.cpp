// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/validate/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace minseek {

LogitComparison compare_logits(std::span<const float> actual, std::span<const float> expected,
                               const OracleTolerance& tolerance) {
    if (actual.size() != expected.size()) {
        throw std::invalid_argument("logit vectors differ in length: " + std::to_string(actual.size()) + " vs " +
                                    std::to_string(expected.size()));
    }
    if (!(tolerance.rel > 0.0) || tolerance.abs_floor < 0.0) {
        throw std::invalid_argument("tolerance needs rel > 0 and abs_floor >= 0");
    }
    LogitComparison out;
    const double floor_magnitude = tolerance.abs_floor / tolerance.rel;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double a = actual[i];
        const double b = expected[i];
        const double dev = std::abs(a - b);
        if (!std::isfinite(dev)) {
            out.within = false;
            out.max_abs_dev = dev;
            out.max_rel_dev = dev;
            out.worst_index = i;
            return out;
        }
        const double rel = dev / std::max(std::abs(b), floor_magnitude);
        if (rel > out.max_rel_dev) {
            out.max_rel_dev = rel;
            out.worst_index = i;
        }
        out.max_abs_dev = std::max(out.max_abs_dev, dev);
        if (dev > std::max(tolerance.rel * std::abs(b), tolerance.abs_floor)) {
            out.within = false;
        }
    }
    return out;
}

Logits recompute_oracle(std::span<const TokenId> resident_tokens, const Model& model) {
    std::vector<std::size_t> positions(resident_tokens.size());
    std::iota(positions.begin(), positions.end(), std::size_t{0});
    if (resident_tokens.empty()) {
        throw std::invalid_argument("oracle needs at least one resident token");
    }
    return model.forward_full(resident_tokens, positions).back();
}

namespace {

using Vec = std::vector<double>;

Vec rms_norm(const Vec& x, std::span<const float> gain) {
    double sum_sq = 0.0;
    for (double v : x) {
        sum_sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(sum_sq / static_cast<double>(x.size()) + 1e-5);
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] * inv * gain[i];
    }
    return out;
}

Vec matvec(std::span<const float> m, const Vec& x, std::size_t rows) {
    Vec out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < x.size(); ++c) {
            out[r] += static_cast<double>(m[r * x.size() + c]) * x[c];
        }
    }
    return out;
}

// Pair (2i, 2i+1) of each head as a complex number times e^{j pos theta^(-2i/d_head)}.
Vec rotate(std::span<const float> v, std::size_t d_head, std::size_t pos, double theta) {
    Vec out(v.size());
    for (std::size_t base = 0; base < v.size(); base += d_head) {
        for (std::size_t i = 0; 2 * i < d_head; ++i) {
            const double angle = static_cast<double>(pos) * std::pow(theta, -2.0 * static_cast<double>(i) /
                                                                              static_cast<double>(d_head));
            const std::complex<double> z(v[base + 2 * i], v[base + 2 * i + 1]);
            const std::complex<double> r = z * std::polar(1.0, angle);
            out[base + 2 * i] = r.real();
            out[base + 2 * i + 1] = r.imag();
        }
    }
    return out;
}

}  // namespace

Logits cache_conditioned_oracle(const DualKvCache& cache, const Model& model, TokenId last_token) {
    const ModelConfig& cfg = model.config();
    const Weights& w = model.weights();
    const std::size_t n = cache.length();
    if (n == 0) {
        throw std::invalid_argument("oracle needs a non-empty cache");
    }
    if (last_token < 0 || static_cast<std::size_t>(last_token) >= cfg.vocab_size) {
        throw std::invalid_argument("oracle token outside vocabulary");
    }
    const std::size_t d = cfg.d_model;
    const std::size_t dh = cfg.d_head;
    const std::size_t pos = n - 1;

    Vec x(w.token_embedding.begin() + static_cast<std::ptrdiff_t>(last_token * d),
          w.token_embedding.begin() + static_cast<std::ptrdiff_t>((last_token + 1) * d));
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        const LayerWeights& lw = w.layers[l];
        const Vec h = rms_norm(x, lw.attn_norm);
        const Vec q_raw = matvec(lw.wq, h, d);
        const Vec k_raw = matvec(lw.wk, h, d);
        const Vec v_self = matvec(lw.wv, h, d);
        const std::vector<float> q_f(q_raw.begin(), q_raw.end());
        const std::vector<float> k_f(k_raw.begin(), k_raw.end());
        const Vec q = rotate(q_f, dh, pos, cfg.rope_theta);

        std::vector<Vec> keys;
        std::vector<Vec> values;
        const auto k_store = cache.keys_no_pos(l);
        const auto v_store = cache.values(l);
        for (std::size_t row = 0; row < pos; ++row) {
            keys.push_back(rotate(k_store.subspan(row * d, d), dh, row, cfg.rope_theta));
            values.emplace_back(v_store.begin() + static_cast<std::ptrdiff_t>(row * d),
                                v_store.begin() + static_cast<std::ptrdiff_t>((row + 1) * d));
        }
        keys.push_back(rotate(k_f, dh, pos, cfg.rope_theta));
        values.push_back(v_self);

        Vec context(d, 0.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
        for (std::size_t head = 0; head < cfg.n_heads; ++head) {
            const std::size_t off = head * dh;
            Vec scores(keys.size());
            for (std::size_t s = 0; s < keys.size(); ++s) {
                double dot = 0.0;
                for (std::size_t i = 0; i < dh; ++i) {
                    dot += q[off + i] * keys[s][off + i];
                }
                scores[s] = dot * scale;
            }
            const double top = *std::max_element(scores.begin(), scores.end());
            double denom = 0.0;
            for (double& s : scores) {
                s = std::exp(s - top);
                denom += s;
            }
            for (std::size_t s = 0; s < keys.size(); ++s) {
                for (std::size_t i = 0; i < dh; ++i) {
                    context[off + i] += scores[s] / denom * values[s][off + i];
                }
            }
        }
        const Vec attn_out = matvec(lw.wo, context, d);
        for (std::size_t i = 0; i < d; ++i) {
            x[i] += attn_out[i];
        }
        const Vec hm = rms_norm(x, lw.mlp_norm);
        Vec up = matvec(lw.w_up, hm, cfg.d_ff);
        for (double& u : up) {
            u = 0.5 * u * (1.0 + std::tanh(std::sqrt(2.0 / 3.14159265358979323846) * (u + 0.044715 * u * u * u)));
        }
        const Vec down = matvec(lw.w_down, up, d);
        for (std::size_t i = 0; i < d; ++i) {
            x[i] += down[i];
        }
    }
    const Vec logits = matvec(w.unembedding, rms_norm(x, w.final_norm), cfg.vocab_size);
    return Logits(logits.begin(), logits.end());
}

}  // namespace minseek
