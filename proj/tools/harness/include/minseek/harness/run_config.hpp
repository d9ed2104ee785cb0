// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minseek/controller/policy.hpp"
#include "minseek/model/config.hpp"
#include "minseek/model/sampler.hpp"

namespace minseek::harness {

inline constexpr int kRunConfigSchemaVersion = 1;

enum class Mode { kRun, kValidate, kBench, kCompare };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

/// Reference for the validate mode.
enum class OracleKind {
    kRecompute,  // forward_full over the surviving tokens at positions 0..n-1
    kCacheConditioned,  // step recomputed from the cache's position-free keys and values
};

std::string_view to_string(OracleKind kind) noexcept;
OracleKind parse_oracle(std::string_view text);

/// M values 0, 2, 4, 6, 10, 20, 50, 100 and unbounded.
std::vector<RcLimit> default_rc_grid();

struct PolicyGrid {
    std::vector<Method> methods{Method::kMinSeek, Method::kBudgetForcing};
    std::vector<int> variants{2};  // applies to Min-Seek only
    std::vector<RcLimit> max_rc = default_rc_grid();
};

/// Closed thoughts with uniformly random lengths, used when no script file is given.
struct RandomScript {
    std::size_t thoughts = 24;
    std::size_t min_len = 4;
    std::size_t max_len = 32;
    std::uint64_t seed = 1;
};

struct RunConfig {
    std::optional<std::filesystem::path> model_config;  // default toy model when absent
    std::uint64_t model_seed = 7;
    PolicyGrid grid;
    std::size_t token_limit = kDefaultTokenLimit;
    std::size_t segment_cap = 32;
    std::size_t retained_rc_max = 1;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;
    Mode mode = Mode::kRun;
    std::vector<std::vector<TokenId>> prompts{{1, 2, 3, 4}};
    std::optional<std::filesystem::path> script;  // scripted-model fixture
    std::optional<RandomScript> random_script;  // used when `script` is absent; sampling when both are
    SamplingParams sampling;
    bool checked = false;
    OracleKind oracle = OracleKind::kRecompute;
    bool inject_fault = false;
    std::optional<std::filesystem::path> trace_out;  // single-cell runs only

    /// One policy per grid cell: Min-Seek cells per variant and M, Budget Forcing
    /// per M, Standard once. Throws ConfigError for an empty grid.
    std::vector<ScalingPolicy> expand() const;

    ModelConfig load_model() const;

    /// Throws ConfigError for bad prompts or a grid cell that violates its bound.
    void validate() const;
};

/// MINSEEK_OUTPUT_DIR when set, otherwise "minseek_out".
std::filesystem::path default_output_dir();

/**
 * Parses a JSON run config. Unknown keys are rejected; relative paths are
 * resolved against `base_dir`.
 */
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace minseek::harness
