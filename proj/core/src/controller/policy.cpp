// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/controller/policy.hpp"

#include <charconv>
#include <sstream>

namespace minseek {

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::kMinSeek:
            return "minseek";
        case Method::kBudgetForcing:
            return "budget";
        case Method::kStandard:
            return "standard";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    if (text == "minseek") return Method::kMinSeek;
    if (text == "budget") return Method::kBudgetForcing;
    if (text == "standard") return Method::kStandard;
    throw ConfigError("unknown method '" + std::string(text) + "' (expected minseek, budget or standard)");
}

std::string format_rc_limit(const RcLimit& limit) {
    return limit ? std::to_string(*limit) : std::string("inf");
}

RcLimit parse_rc_limit(std::string_view text) {
    if (text == "inf" || text == "unbounded") {
        return std::nullopt;
    }
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("invalid reconstruction-cycle limit '" + std::string(text) + "'");
    }
    return value;
}

void ScalingPolicy::validate() const {
    if (token_limit < 1) {
        throw ConfigError("token_limit must be >= 1");
    }
    if (segment_cap < 1) {
        throw ConfigError("segment cap u must be >= 1");
    }
    if (retained_rc_max < 1) {
        throw ConfigError("retained_rc_max must be >= 1");
    }
    if (variant != 1 && variant != 2) {
        throw ConfigError("variant must be 1 or 2");
    }
    if (method == Method::kStandard && max_rc != RcLimit{0}) {
        throw ConfigError("standard generation induces no cycles; max_rc must be 0");
    }
}

std::optional<CacheBound> ScalingPolicy::cache_bound() const {
    switch (method) {
        case Method::kMinSeek:
            return CacheBound{segment_cap, retained_rc_max, has_final_cycle() ? std::size_t{1} : std::size_t{0}};
        case Method::kBudgetForcing:
            if (!max_rc) {
                return std::nullopt;
            }
            return CacheBound{segment_cap, *max_rc, 0};
        case Method::kStandard:
            return CacheBound{segment_cap, 0, 0};
    }
    return std::nullopt;
}

void ScalingPolicy::check_against(std::size_t max_context_length) const {
    validate();
    if (const auto bound = cache_bound()) {
        bound->validate_against(max_context_length);
        return;
    }
    // Unbounded Budget Forcing: cycles stop once the soft limit is passed, so at most
    // one more cycle and the answer follow the prompt plus token_limit tokens.
    const std::size_t worst = token_limit + 3 * segment_cap;
    if (worst >= max_context_length) {
        std::ostringstream msg;
        msg << "unbounded budget forcing can reach token_limit + 3 x u = " << token_limit << " + 3 x " << segment_cap
            << " = " << worst << " rows, not less than max_context_length " << max_context_length;
        throw ConfigError(msg.str());
    }
}

std::string ScalingPolicy::label() const {
    std::string out(to_string(method));
    if (method == Method::kMinSeek) {
        out += "_v" + std::to_string(variant);
    }
    out += "_M" + format_rc_limit(max_rc);
    return out;
}

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
        case Phase::kThinking:
            return "Thinking";
        case Phase::kFinalizing:
            return "Finalizing";
        case Phase::kAnswering:
            return "Answering";
        case Phase::kDone:
            return "Done";
    }
    return "?";
}

Phase parse_phase(std::string_view text) {
    if (text == "Thinking") return Phase::kThinking;
    if (text == "Finalizing") return Phase::kFinalizing;
    if (text == "Answering") return Phase::kAnswering;
    if (text == "Done") return Phase::kDone;
    throw Error("unknown phase '" + std::string(text) + "'");
}

bool is_legal_transition(Phase from, Phase to) noexcept {
    return (from == Phase::kThinking && to == Phase::kFinalizing) ||
           (from == Phase::kFinalizing && to == Phase::kAnswering) ||
           (from == Phase::kAnswering && to == Phase::kDone);
}

ThinkEndAction on_think_end(const ControllerState& state, const ScalingPolicy& policy) {
    const bool below_rc_limit = !policy.max_rc || state.rc_count < *policy.max_rc;
    const bool within_tokens = state.tokens_generated <= policy.token_limit;
    return below_rc_limit && within_tokens ? ThinkEndAction::kInjectWait : ThinkEndAction::kFinalize;
}

std::string_view to_string(MissingThinkEndAction action) noexcept {
    return action == MissingThinkEndAction::kAcceptAsFinal ? "accept" : "rollback";
}

MissingThinkEndAction handle_missing_think_end(const ControllerState& state, const ScalingPolicy& policy) {
    if (policy.method == Method::kMinSeek && policy.variant == 2 && state.phase == Phase::kThinking &&
        state.rc_count > 0) {
        return MissingThinkEndAction::kRollbackAndAnswer;
    }
    return MissingThinkEndAction::kAcceptAsFinal;
}

}  // namespace minseek
