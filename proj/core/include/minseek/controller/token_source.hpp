// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minseek/controller/policy.hpp"
#include "minseek/model/config.hpp"
#include "minseek/model/sampler.hpp"

namespace minseek {

/// Supplies the next generated token given the current logits.
class TokenSource {
public:
    virtual ~TokenSource() = default;
    virtual TokenId next(std::span<const float> logits, Phase phase) = 0;
};

/// Nucleus sampling from the model's logits.
class SamplingSource final : public TokenSource {
public:
    SamplingSource(SamplingParams params, std::uint64_t seed);

    TokenId next(std::span<const float> logits, Phase phase) override;

    const CounterRng& rng() const noexcept { return m_rng; }

private:
    SamplingParams m_params;
    CounterRng m_rng;
};

struct ScriptedThought {
    std::size_t length = 1;
    bool ends_with_think_end = true;

    bool operator==(const ScriptedThought&) const = default;
};

/**
 * Deterministic generation fixture.
 *
 * A thought (n, true) emits n - 1 fillers followed by think_end. A thought
 * (n, false) emits n fillers followed by eos and never closes the thought.
 * The answer emits answer_start, then answer_length - 1 fillers, then eos.
 * With `repeat`, the thought list wraps around instead of running out.
 */
struct Script {
    std::vector<ScriptedThought> thoughts;
    std::size_t answer_length = 3;
    bool repeat = false;
    std::uint64_t filler_seed = 0;

    static Script parse(std::string_view json_text);
    static Script load(const std::filesystem::path& path);
    std::string to_json() const;

    /// Thought lengths given as rows; every thought closes with think_end.
    static Script from_lengths(std::span<const std::size_t> lengths, std::size_t answer_length = 3);

    /// `count` closed thoughts with lengths uniform in [min_len, max_len], drawn from (seed, stream 2).
    static Script random(std::size_t count, std::size_t min_len, std::size_t max_len, std::uint64_t seed,
                         std::size_t answer_length = 3);
};

inline constexpr int kScriptSchemaVersion = 1;

class ScriptExhausted : public Error {
public:
    using Error::Error;
};

/// Replays a Script, ignoring the logits. Fillers are never sentinel ids.
class ScriptedSource final : public TokenSource {
public:
    ScriptedSource(Script script, const ModelConfig& config);

    TokenId next(std::span<const float> logits, Phase phase) override;

    /// Emits the next scripted token for `phase`; throws ScriptExhausted at the end.
    TokenId step(Phase phase);

    std::size_t thoughts_started() const noexcept { return m_thoughts_started; }

private:
    TokenId filler();

    Script m_script;
    SentinelTokens m_sentinels;
    std::size_t m_vocab_size;
    std::size_t m_thought = 0;  // index of the active thought
    std::size_t m_thoughts_started = 0;
    std::size_t m_pos_in_thought = 0;
    bool m_in_thought = false;
    std::size_t m_answer_pos = 0;
    std::uint64_t m_filler_counter = 0;
};

}  // namespace minseek
