// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "minseek/controller/controller.hpp"
#include "minseek/harness/run_config.hpp"
#include "minseek/validate/oracle.hpp"

namespace minseek::harness {

/// File stem of a grid cell, e.g. "minseek_v2_M4_p0".
std::string cell_name(const ScalingPolicy& policy, std::size_t prompt_index);

/// Runs one (policy, prompt) cell on a fresh cache.
GenerationResult run_cell(const Model& model, const RunConfig& config, const ScalingPolicy& policy,
                          std::size_t prompt_index, const RunOptions& options);

struct BoundaryReport {
    std::string cell;
    std::size_t boundary = 0;
    std::size_t rows = 0;
    LogitComparison recompute;
    LogitComparison cache;
    bool pass = false;
};

/// Runs every cell in checked mode with the oracle at each boundary.
std::vector<BoundaryReport> validate_boundaries(const Model& model, const RunConfig& config);

/// Writes a trace and a transcript per cell. Returns the process exit code.
int cmd_run(const RunConfig& config, std::ostream& out);

/// Per-boundary deviation report; nonzero exit on any failure.
int cmd_validate(const RunConfig& config, std::ostream& out);

/// Cost streams, per-cycle costs and complexity fits per cell.
int cmd_bench(const RunConfig& config, std::ostream& out);

/// Attention cost and wall time per M normalized by the M = 0 cell of each method.
int cmd_compare(const RunConfig& config, std::ostream& out);

int dispatch(const RunConfig& config, std::ostream& out);

}  // namespace minseek::harness
