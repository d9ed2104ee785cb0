// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "minseek/cache/dual_kv_cache.hpp"

namespace minseek {

/// Byte counts of the cache stores at this instant.
MemoryFootprint memory_probe(const DualKvCache& cache);

/// One-line report, e.g. "rows=40 materialized=40 key_bytes=... v_bytes=... ratio=2.000".
std::string format_footprint(const MemoryFootprint& footprint);

}  // namespace minseek
