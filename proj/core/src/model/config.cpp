// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/model/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

namespace minseek {

namespace {

using nlohmann::json;

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ConfigError("invalid model config: " + message);
    }
}

std::size_t read_count(const json& node, const char* key) {
    const json& value = node.at(key);
    if (!value.is_number_unsigned()) {
        throw ConfigError(std::string("model config key '") + key + "' must be a non-negative integer");
    }
    return value.get<std::size_t>();
}

TokenId read_token(const json& node, const char* key) {
    const json& value = node.at(key);
    if (!value.is_number_unsigned()) {
        throw ConfigError(std::string("sentinel '") + key + "' must be a non-negative integer");
    }
    return value.get<TokenId>();
}

void reject_unknown(const json& node, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, _] : node.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

void ModelConfig::validate() const {
    require(n_layers >= 1, "n_layers must be >= 1");
    require(n_heads >= 1, "n_heads must be >= 1");
    require(d_head >= 2 && d_head % 2 == 0, "d_head must be even (rotary pairs), got " + std::to_string(d_head));
    require(d_model == n_heads * d_head,
            "d_model (" + std::to_string(d_model) + ") != n_heads x d_head (" +
                std::to_string(n_heads * d_head) + ")");
    require(d_ff >= 1, "d_ff must be >= 1");
    require(vocab_size >= 5, "vocab_size must leave room for 4 sentinels and one ordinary token");
    require(rope_theta > 0.0, "rope_theta must be positive");
    require(max_context_length >= 1, "max_context_length must be >= 1");

    const TokenId ids[] = {sentinels.think_end, sentinels.wait, sentinels.answer_start, sentinels.eos};
    std::set<TokenId> distinct;
    for (TokenId id : ids) {
        require(id >= 0 && static_cast<std::size_t>(id) < vocab_size,
                "sentinel id " + std::to_string(id) + " outside vocabulary");
        distinct.insert(id);
    }
    require(distinct.size() == 4, "sentinel ids must be pairwise distinct");
}

ModelConfig parse_model_config(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("model config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("model config must be a JSON object");
    }
    reject_unknown(root,
                   {"schema_version", "n_layers", "n_heads", "d_model", "d_head", "d_ff", "vocab_size",
                    "rope_theta", "max_context_length", "sentinels"},
                   "model config");
    if (!root.contains("schema_version") || root["schema_version"] != kModelConfigSchemaVersion) {
        throw ConfigError("model config requires \"schema_version\": " +
                          std::to_string(kModelConfigSchemaVersion));
    }

    ModelConfig config;
    try {
        if (root.contains("n_layers")) config.n_layers = read_count(root, "n_layers");
        if (root.contains("n_heads")) config.n_heads = read_count(root, "n_heads");
        if (root.contains("d_model")) config.d_model = read_count(root, "d_model");
        if (root.contains("d_head")) config.d_head = read_count(root, "d_head");
        if (root.contains("d_ff")) config.d_ff = read_count(root, "d_ff");
        if (root.contains("vocab_size")) config.vocab_size = read_count(root, "vocab_size");
        if (root.contains("max_context_length")) {
            config.max_context_length = read_count(root, "max_context_length");
        }
        if (root.contains("rope_theta")) {
            if (!root["rope_theta"].is_number()) {
                throw ConfigError("model config key 'rope_theta' must be a number");
            }
            config.rope_theta = root["rope_theta"].get<double>();
        }
        if (root.contains("sentinels")) {
            const json& s = root["sentinels"];
            reject_unknown(s, {"think_end", "wait", "answer_start", "eos"}, "sentinels");
            if (s.contains("think_end")) config.sentinels.think_end = read_token(s, "think_end");
            if (s.contains("wait")) config.sentinels.wait = read_token(s, "wait");
            if (s.contains("answer_start")) config.sentinels.answer_start = read_token(s, "answer_start");
            if (s.contains("eos")) config.sentinels.eos = read_token(s, "eos");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model config: ") + e.what());
    }
    config.validate();
    return config;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model config " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model_config(buffer.str());
}

}  // namespace minseek
