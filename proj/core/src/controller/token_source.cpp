// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/controller/token_source.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace minseek {

SamplingSource::SamplingSource(SamplingParams params, std::uint64_t seed) : m_params(params), m_rng(seed, 1) {
    m_params.validate();
}

TokenId SamplingSource::next(std::span<const float> logits, Phase) {
    return sample(logits, m_params, m_rng);
}

Script Script::parse(std::string_view json_text) {
    using nlohmann::json;
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("script is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("script must be a JSON object");
    }
    const std::set<std::string> known{"schema_version", "thoughts", "answer_length", "repeat", "filler_seed"};
    for (const auto& [key, _] : root.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in script");
        }
    }
    if (root.value("schema_version", 0) != kScriptSchemaVersion) {
        throw ConfigError("script requires \"schema_version\": " + std::to_string(kScriptSchemaVersion));
    }
    Script script;
    try {
        for (const json& item : root.at("thoughts")) {
            // [length, closes_with_think_end]
            if (!item.is_array() || item.size() != 2 || !item[0].is_number_unsigned() || !item[1].is_boolean()) {
                throw ConfigError("each scripted thought must be [length, true|false]");
            }
            ScriptedThought t{item[0].get<std::size_t>(), item[1].get<bool>()};
            if (t.length == 0) {
                throw ConfigError("scripted thought length must be >= 1");
            }
            script.thoughts.push_back(t);
        }
        script.answer_length = root.value("answer_length", script.answer_length);
        script.repeat = root.value("repeat", false);
        script.filler_seed = root.value("filler_seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed script: ") + e.what());
    }
    if (script.thoughts.empty()) {
        throw ConfigError("script needs at least one thought");
    }
    return script;
}

Script Script::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open script " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string Script::to_json() const {
    nlohmann::ordered_json root;
    root["schema_version"] = kScriptSchemaVersion;
    nlohmann::ordered_json thoughts = nlohmann::ordered_json::array();
    for (const ScriptedThought& t : this->thoughts) {
        thoughts.push_back({t.length, t.ends_with_think_end});
    }
    root["thoughts"] = thoughts;
    root["answer_length"] = answer_length;
    root["repeat"] = repeat;
    root["filler_seed"] = filler_seed;
    return root.dump(2) + "\n";
}

Script Script::from_lengths(std::span<const std::size_t> lengths, std::size_t answer_length) {
    Script script;
    script.answer_length = answer_length;
    for (std::size_t n : lengths) {
        script.thoughts.push_back({n, true});
    }
    return script;
}

Script Script::random(std::size_t count, std::size_t min_len, std::size_t max_len, std::uint64_t seed,
                      std::size_t answer_length) {
    if (min_len == 0 || min_len > max_len) {
        throw ConfigError("random script needs 1 <= min_len <= max_len");
    }
    CounterRng rng(seed, 2);
    const std::uint64_t span = max_len - min_len + 1;
    Script script;
    script.answer_length = answer_length;
    script.filler_seed = seed;
    for (std::size_t i = 0; i < count; ++i) {
        script.thoughts.push_back({min_len + static_cast<std::size_t>(rng.next_u64() % span), true});
    }
    return script;
}

ScriptedSource::ScriptedSource(Script script, const ModelConfig& config)
    : m_script(std::move(script)), m_sentinels(config.sentinels), m_vocab_size(config.vocab_size) {
    if (m_script.thoughts.empty()) {
        throw ConfigError("script needs at least one thought");
    }
}

TokenId ScriptedSource::filler() {
    for (;;) {
        const std::uint64_t bits = mix64(m_script.filler_seed * 0x9E3779B97F4A7C15ull + m_filler_counter++);
        const auto id = static_cast<TokenId>(bits % m_vocab_size);
        if (!m_sentinels.is_sentinel(id)) {
            return id;
        }
    }
}

TokenId ScriptedSource::next(std::span<const float>, Phase phase) {
    return step(phase);
}

TokenId ScriptedSource::step(Phase phase) {
    if (phase == Phase::kAnswering) {
        const std::size_t pos = m_answer_pos++;
        if (pos >= m_script.answer_length) {
            return m_sentinels.eos;
        }
        return pos == 0 ? m_sentinels.answer_start : filler();
    }
    if (phase == Phase::kDone) {
        throw ScriptExhausted("script queried after generation finished");
    }

    if (!m_in_thought) {
        if (m_thought >= m_script.thoughts.size()) {
            if (!m_script.repeat) {
                throw ScriptExhausted("script ran out of thoughts after " + std::to_string(m_thoughts_started));
            }
            m_thought = 0;
        }
        m_in_thought = true;
        m_pos_in_thought = 0;
        ++m_thoughts_started;
    }

    const ScriptedThought& thought = m_script.thoughts[m_thought];
    const std::size_t pos = m_pos_in_thought++;
    const bool last = thought.ends_with_think_end ? pos + 1 == thought.length : pos == thought.length;
    if (last) {
        m_in_thought = false;
        ++m_thought;
        return thought.ends_with_think_end ? m_sentinels.think_end : m_sentinels.eos;
    }
    return filler();
}

}  // namespace minseek
