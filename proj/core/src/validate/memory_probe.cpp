// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/validate/memory_probe.hpp"

#include <iomanip>
#include <sstream>

namespace minseek {

MemoryFootprint memory_probe(const DualKvCache& cache) { return cache.footprint(); }

std::string format_footprint(const MemoryFootprint& f) {
    std::ostringstream out;
    out << "rows=" << f.rows << " materialized=" << f.materialized_rows << " k_no_pos_bytes=" << f.k_no_pos_bytes
        << " k_materialized_bytes=" << f.k_materialized_bytes << " v_bytes=" << f.v_bytes
        << " ratio=" << std::fixed << std::setprecision(3) << f.key_to_value_ratio();
    return out.str();
}

}  // namespace minseek
