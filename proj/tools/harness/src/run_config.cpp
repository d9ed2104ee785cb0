// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/harness/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "minseek/types.hpp"

namespace minseek::harness {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : object.items()) {
        if (allowed.count(item.key()) == 0) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    return p.is_relative() && !base.empty() ? base / p : p;
}

RcLimit rc_limit_from_json(const json& value) {
    if (value.is_string()) {
        return parse_rc_limit(value.get<std::string>());
    }
    if (value.is_number_unsigned()) {
        return value.get<std::size_t>();
    }
    throw ConfigError("max_rc entries must be non-negative integers or 'inf'");
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::kRun:
            return "run";
        case Mode::kValidate:
            return "validate";
        case Mode::kBench:
            return "bench";
        case Mode::kCompare:
            return "compare";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    for (Mode m : {Mode::kRun, Mode::kValidate, Mode::kBench, Mode::kCompare}) {
        if (text == to_string(m)) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + std::string(text) + "' (run|validate|bench|compare)");
}

std::string_view to_string(OracleKind kind) noexcept {
    return kind == OracleKind::kRecompute ? "recompute" : "cache";
}

OracleKind parse_oracle(std::string_view text) {
    if (text == "recompute") {
        return OracleKind::kRecompute;
    }
    if (text == "cache") {
        return OracleKind::kCacheConditioned;
    }
    throw ConfigError("unknown oracle '" + std::string(text) + "' (recompute|cache)");
}

std::vector<RcLimit> default_rc_grid() { return {0, 2, 4, 6, 10, 20, 50, 100, std::nullopt}; }

std::vector<ScalingPolicy> RunConfig::expand() const {
    if (grid.methods.empty() || grid.max_rc.empty()) {
        throw ConfigError("policy grid needs at least one method and one M value");
    }
    std::vector<ScalingPolicy> cells;
    auto base = [&](Method method) {
        ScalingPolicy p;
        p.method = method;
        p.token_limit = token_limit;
        p.segment_cap = segment_cap;
        p.retained_rc_max = retained_rc_max;
        return p;
    };
    for (Method method : grid.methods) {
        if (method == Method::kStandard) {
            ScalingPolicy p = base(method);
            p.max_rc = 0;
            cells.push_back(p);
            continue;
        }
        const std::vector<int> variants = method == Method::kMinSeek ? grid.variants : std::vector<int>{2};
        if (variants.empty()) {
            throw ConfigError("policy grid needs at least one Min-Seek variant");
        }
        for (int variant : variants) {
            for (const RcLimit& m : grid.max_rc) {
                ScalingPolicy p = base(method);
                p.variant = variant;
                p.max_rc = m;
                cells.push_back(p);
            }
        }
    }
    return cells;
}

ModelConfig RunConfig::load_model() const { return model_config ? load_model_config(*model_config) : ModelConfig{}; }

void RunConfig::validate() const {
    const ModelConfig model = load_model();
    if (prompts.empty()) {
        throw ConfigError("at least one prompt is required");
    }
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (prompts[i].empty()) {
            throw ConfigError("prompt " + std::to_string(i) + " is empty");
        }
        for (TokenId t : prompts[i]) {
            if (t < 0 || static_cast<std::size_t>(t) >= model.vocab_size || model.sentinels.is_sentinel(t)) {
                throw ConfigError("prompt " + std::to_string(i) + " has invalid token " + std::to_string(t));
            }
        }
    }
    sampling.validate();
    if (!script && random_script && (random_script->min_len == 0 || random_script->min_len > random_script->max_len ||
                                     random_script->max_len > segment_cap)) {
        throw ConfigError("random_script lengths must satisfy 1 <= min_len <= max_len <= segment_cap");
    }
    for (const ScalingPolicy& p : expand()) {
        p.check_against(model.max_context_length);
    }
}

std::filesystem::path default_output_dir() {
    const char* env = std::getenv("MINSEEK_OUTPUT_DIR");
    return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("minseek_out");
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("run config must be a JSON object");
    }
    reject_unknown(j,
                   {"schema_version", "model_config", "model_seed", "grid", "token_limit", "segment_cap",
                    "retained_rc_max", "seed", "output_dir", "mode", "prompts", "script", "random_script", "sampling",
                    "checked", "oracle"},
                   "run config");
    if (!j.contains("schema_version") || j["schema_version"] != kRunConfigSchemaVersion) {
        throw ConfigError("run config needs schema_version " + std::to_string(kRunConfigSchemaVersion));
    }

    RunConfig c;
    c.output_dir = default_output_dir();
    try {
        if (j.contains("model_config")) {
            c.model_config = resolve(j["model_config"].get<std::string>(), base_dir);
        }
        c.model_seed = j.value("model_seed", c.model_seed);
        if (j.contains("grid")) {
            const json& g = j["grid"];
            reject_unknown(g, {"methods", "variants", "max_rc"}, "grid");
            if (g.contains("methods")) {
                c.grid.methods.clear();
                for (const auto& m : g["methods"]) {
                    c.grid.methods.push_back(parse_method(m.get<std::string>()));
                }
            }
            if (g.contains("variants")) {
                c.grid.variants = g["variants"].get<std::vector<int>>();
            }
            if (g.contains("max_rc")) {
                c.grid.max_rc.clear();
                for (const auto& m : g["max_rc"]) {
                    c.grid.max_rc.push_back(rc_limit_from_json(m));
                }
            }
        }
        c.token_limit = j.value("token_limit", c.token_limit);
        c.segment_cap = j.value("segment_cap", c.segment_cap);
        c.retained_rc_max = j.value("retained_rc_max", c.retained_rc_max);
        c.seed = j.value("seed", c.seed);
        if (j.contains("output_dir")) {
            c.output_dir = resolve(j["output_dir"].get<std::string>(), base_dir);
        }
        if (j.contains("mode")) {
            c.mode = parse_mode(j["mode"].get<std::string>());
        }
        if (j.contains("prompts")) {
            c.prompts = j["prompts"].get<std::vector<std::vector<TokenId>>>();
        }
        if (j.contains("script")) {
            c.script = resolve(j["script"].get<std::string>(), base_dir);
        }
        if (j.contains("random_script")) {
            const json& r = j["random_script"];
            reject_unknown(r, {"thoughts", "min_len", "max_len", "seed"}, "random_script");
            RandomScript rs;
            rs.thoughts = r.value("thoughts", rs.thoughts);
            rs.min_len = r.value("min_len", rs.min_len);
            rs.max_len = r.value("max_len", rs.max_len);
            rs.seed = r.value("seed", rs.seed);
            c.random_script = rs;
        }
        if (j.contains("sampling")) {
            const json& s = j["sampling"];
            reject_unknown(s, {"temperature", "top_p", "greedy"}, "sampling");
            c.sampling.temperature = s.value("temperature", c.sampling.temperature);
            c.sampling.top_p = s.value("top_p", c.sampling.top_p);
            c.sampling.greedy = s.value("greedy", c.sampling.greedy);
        }
        c.checked = j.value("checked", c.checked);
        if (j.contains("oracle")) {
            c.oracle = parse_oracle(j["oracle"].get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("run config has a wrongly typed value: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open run config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str(), path.parent_path());
}

}  // namespace minseek::harness
