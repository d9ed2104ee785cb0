// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/weights.hpp"

#include <cstring>
#include <string>

#include "minseek/model/rng.hpp"

namespace minseek {

namespace {

std::vector<float> gaussian_tensor(std::size_t count, std::uint64_t seed, std::uint64_t stream) {
    CounterRng rng(seed, stream);
    std::vector<float> out(count);
    for (float& x : out) {
        x = static_cast<float>(kInitStddev * rng.next_gaussian());
    }
    return out;
}

void fnv1a(std::uint64_t& hash, const std::vector<float>& tensor) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(tensor.data());
    for (std::size_t i = 0; i < tensor.size() * sizeof(float); ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001B3ull;
    }
}

void expect_size(const std::vector<float>& tensor, std::size_t expected, const std::string& name) {
    if (tensor.size() != expected) {
        throw ConfigError("weight tensor " + name + " has " + std::to_string(tensor.size()) +
                          " elements, expected " + std::to_string(expected));
    }
}

}  // namespace

std::uint64_t Weights::checksum() const {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    fnv1a(hash, token_embedding);
    for (const LayerWeights& layer : layers) {
        fnv1a(hash, layer.attn_norm);
        fnv1a(hash, layer.wq);
        fnv1a(hash, layer.wk);
        fnv1a(hash, layer.wv);
        fnv1a(hash, layer.wo);
        fnv1a(hash, layer.mlp_norm);
        fnv1a(hash, layer.w_up);
        fnv1a(hash, layer.w_down);
    }
    fnv1a(hash, final_norm);
    fnv1a(hash, unembedding);
    return hash;
}

void Weights::check_shapes(const ModelConfig& config) const {
    const std::size_t d = config.d_model;
    expect_size(token_embedding, config.vocab_size * d, "token_embedding");
    if (layers.size() != config.n_layers) {
        throw ConfigError("weights have " + std::to_string(layers.size()) + " layers, config has " +
                          std::to_string(config.n_layers));
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerWeights& lw = layers[l];
        const std::string prefix = "layers[" + std::to_string(l) + "].";
        expect_size(lw.attn_norm, d, prefix + "attn_norm");
        expect_size(lw.wq, d * d, prefix + "wq");
        expect_size(lw.wk, d * d, prefix + "wk");
        expect_size(lw.wv, d * d, prefix + "wv");
        expect_size(lw.wo, d * d, prefix + "wo");
        expect_size(lw.mlp_norm, d, prefix + "mlp_norm");
        expect_size(lw.w_up, config.d_ff * d, prefix + "w_up");
        expect_size(lw.w_down, d * config.d_ff, prefix + "w_down");
    }
    expect_size(final_norm, d, "final_norm");
    expect_size(unembedding, config.vocab_size * d, "unembedding");
}

Weights init_weights(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    const std::size_t d = config.d_model;
    std::uint64_t stream = 0;

    Weights w;
    w.token_embedding = gaussian_tensor(config.vocab_size * d, seed, stream++);
    w.layers.resize(config.n_layers);
    for (LayerWeights& layer : w.layers) {
        layer.attn_norm.assign(d, 1.0f);
        layer.wq = gaussian_tensor(d * d, seed, stream++);
        layer.wk = gaussian_tensor(d * d, seed, stream++);
        layer.wv = gaussian_tensor(d * d, seed, stream++);
        layer.wo = gaussian_tensor(d * d, seed, stream++);
        layer.mlp_norm.assign(d, 1.0f);
        layer.w_up = gaussian_tensor(config.d_ff * d, seed, stream++);
        layer.w_down = gaussian_tensor(d * config.d_ff, seed, stream++);
    }
    w.final_norm.assign(d, 1.0f);
    w.unembedding = gaussian_tensor(config.vocab_size * d, seed, stream++);
    return w;
}

}  // namespace minseek
