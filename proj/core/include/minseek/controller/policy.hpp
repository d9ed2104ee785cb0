// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "minseek/cache/dual_kv_cache.hpp"

namespace minseek {

enum class Method { kMinSeek, kBudgetForcing, kStandard };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view text);

/// Maximum number of induced reconstruction cycles; nullopt means unbounded.
using RcLimit = std::optional<std::size_t>;

std::string format_rc_limit(const RcLimit& limit);
RcLimit parse_rc_limit(std::string_view text);

inline constexpr std::size_t kDefaultTokenLimit = std::size_t{1} << 15;

struct ScalingPolicy {
    Method method = Method::kMinSeek;
    int variant = 2;  // Min-Seek finalization: 1 = one last cycle, 2 = answer directly
    RcLimit max_rc = 0;
    std::size_t token_limit = kDefaultTokenLimit;  // soft; checked at think-end boundaries
    std::size_t segment_cap = 32;  // u: rows per segment
    std::size_t retained_rc_max = 1;

    void validate() const;

    /// Absolute generated-token ceiling; reaching it truncates the run.
    std::size_t hard_token_cap() const noexcept { return 4 * token_limit; }

    /// Variant 1 decodes one more cycle before answering, unless no cycles are allowed.
    bool has_final_cycle() const noexcept {
        return method == Method::kMinSeek && variant == 1 && max_rc != RcLimit{0};
    }

    /**
     * Worst-case cache size for the policy, or nullopt when the cache can
     * grow without bound (Budget Forcing with unbounded cycles).
     */
    std::optional<CacheBound> cache_bound() const;

    /// Throws ConfigError (showing the arithmetic) if the policy can overflow the context.
    void check_against(std::size_t max_context_length) const;

    /// File-name friendly label, e.g. "minseek_v2_M4", "budget_Minf", "standard_M0".
    std::string label() const;
};

enum class Phase { kThinking, kFinalizing, kAnswering, kDone };

std::string_view to_string(Phase phase) noexcept;
Phase parse_phase(std::string_view text);

/// Thinking -> Finalizing -> Answering -> Done and nothing else.
bool is_legal_transition(Phase from, Phase to) noexcept;

struct ControllerState {
    std::size_t rc_count = 0;  // induced cycles so far, excluding a variant-1 final cycle
    std::size_t tokens_generated = 0;  // tokens fed after the prompt, injected ones included
    Phase phase = Phase::kThinking;
};

enum class ThinkEndAction { kInjectWait, kFinalize };

/// Continue iff fewer than max_rc cycles were induced and the soft token limit is not exceeded.
ThinkEndAction on_think_end(const ControllerState& state, const ScalingPolicy& policy);

enum class MissingThinkEndAction {
    kAcceptAsFinal,  // runaway text is the final cycle and answer
    kRollbackAndAnswer,  // drop the runaway cycle, replace its wait by think_end
};

std::string_view to_string(MissingThinkEndAction action) noexcept;

/**
 * Reaction to a thought that hit the per-segment cap (or ended with eos)
 * without think_end. Only Min-Seek variant 2 rolls back, and only when a
 * wait was injected for the runaway cycle.
 */
MissingThinkEndAction handle_missing_think_end(const ControllerState& state, const ScalingPolicy& policy);

}  // namespace minseek
