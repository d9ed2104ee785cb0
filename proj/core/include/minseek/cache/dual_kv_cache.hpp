// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minseek/cache/segment_table.hpp"
#include "minseek/model/config.hpp"

namespace minseek {

struct CacheShape {
    std::size_t n_layers = 1;
    std::size_t n_heads = 1;
    std::size_t d_head = 2;
    std::size_t max_context_length = 1;
    double rope_theta = 10000.0;

    std::size_t width() const noexcept { return n_heads * d_head; }

    static CacheShape from_model(const ModelConfig& config) noexcept;
};

/**
 * Size limit for a cache that keeps PT1, up to `retained_rc_max` reconstruction
 * cycles, the in-progress segment and the answer, each at most `u` rows.
 * `extra_segments` accounts for a final cycle that is exempt from eviction.
 */
struct CacheBound {
    std::size_t u = 32;
    std::size_t retained_rc_max = 1;
    std::size_t extra_segments = 0;

    std::size_t limit() const noexcept { return (retained_rc_max + 2 + extra_segments) * u; }

    /// Throws ConfigError, showing the arithmetic, unless limit() < max_context_length.
    void validate_against(std::size_t max_context_length) const;
};

enum class MinRuleDecision {
    kAdmittedNew,  // retained set had room (first RC)
    kKeptOld,  // new cycle not strictly shorter; its rows were dropped
    kReplacedWithNew,  // strictly shorter; the previously kept cycle was dropped
};

std::string_view to_string(MinRuleDecision decision) noexcept;

struct MinRuleResult {
    MinRuleDecision decision = MinRuleDecision::kAdmittedNew;
    Segment candidate;  // the newly completed cycle as it was before the decision
    std::optional<Segment> incumbent;  // longest retained cycle it was compared against
    std::optional<Segment> evicted;
    Segment kept;  // the cycle that now represents the retained minimum
};

struct MemoryFootprint {
    std::size_t rows = 0;
    std::size_t materialized_rows = 0;
    std::size_t k_no_pos_bytes = 0;
    std::size_t v_bytes = 0;
    std::size_t k_materialized_bytes = 0;

    std::size_t key_bytes() const noexcept { return k_no_pos_bytes + k_materialized_bytes; }
    std::size_t total_bytes() const noexcept { return key_bytes() + v_bytes; }
    double key_to_value_ratio() const noexcept {
        return v_bytes == 0 ? 0.0 : static_cast<double>(key_bytes()) / static_cast<double>(v_bytes);
    }
};

/**
 * KV cache holding values and position-free keys per layer, plus a transient
 * copy of the keys rotated to contiguous positions 0..length-1.
 *
 * The position-free keys are the source of truth: evicting a segment removes
 * its rows physically and invalidates the rotated copy, which is rebuilt by
 * materialize_all() before decoding resumes. All row storage is row-major
 * [rows][n_heads x d_head].
 */
class DualKvCache {
public:
    struct LayerView {
        std::span<const float> keys;  // rotated
        std::span<const float> values;
        std::size_t rows = 0;
    };

    explicit DualKvCache(const CacheShape& shape, bool checked = false);

    const CacheShape& shape() const noexcept { return m_shape; }

    /// Checked mode verifies every appended rotated key against its position-free source.
    bool checked() const noexcept { return m_checked; }
    void set_checked(bool checked) noexcept { m_checked = checked; }

    /// Rows present in every layer (the last layer is appended last in a step).
    std::size_t length() const noexcept;
    std::size_t layer_length(std::size_t layer) const;
    bool empty() const noexcept { return length() == 0; }

    bool materialized() const noexcept { return m_materialized; }

    /**
     * Appends one row to `layer` and returns the full rotated keys and values.
     *
     * `k_rot` must equal apply_rope(k_no_pos, layer_length(layer)) head by head.
     * Throws PositionOverflow if the row would sit at max_context_length, and
     * CacheError if the cache is not materialized or, in checked mode, if the
     * rotated key is inconsistent beyond 1e-6.
     */
    LayerView update(std::size_t layer, std::span<const float> k_rot,
                     std::span<const float> k_no_pos, std::span<const float> v);

    LayerView layer_view(std::size_t layer) const;
    std::span<const float> keys_no_pos(std::size_t layer) const;
    std::span<const float> values(std::size_t layer) const;

    /// Rebuilds rotated keys at positions 0..length-1 for every layer.
    void materialize_all();

    /// Frees the rotated copy; position-free keys and values are untouched.
    void discard_materialized() noexcept;

    const SegmentTable& segments() const noexcept { return m_segments; }
    const Segment& begin_segment(SegmentKind kind, std::size_t rc_index = 0);
    const Segment& commit_segment(std::size_t token_len);

    /**
     * Retention rule over completed reconstruction cycles. With one retained
     * cycle this keeps the shortest cycle seen so far, the oldest on ties: the
     * candidate replaces the incumbent only when strictly shorter. With more
     * retained slots the candidate is compared against the longest retained
     * cycle (newest on ties). Materialized keys are invalidated whenever rows
     * are dropped.
     */
    MinRuleResult apply_min_rule(std::uint64_t candidate_id, std::size_t retained_rc_max = 1);

    /// Removes a committed non-PT1 segment's rows from every layer.
    Segment drop_segment(std::uint64_t segment_id);

    /// Throws BoundViolation naming the first offending segment.
    void check_bound(const CacheBound& bound) const;

    MemoryFootprint footprint() const noexcept;

    /// Highest position id ever encoded into a key by this cache.
    std::optional<std::size_t> max_position_id() const noexcept { return m_max_position; }

    /// Structural dump: segments, open segment, per-layer rows and materialization flag.
    std::string dump_state() const;

    /**
     * Fault injection for negative controls: when set, dropping a segment also
     * removes its rows from the rotated copy and leaves it marked materialized,
     * so surviving keys keep their stale positions.
     */
    void set_keep_stale_materialized_on_drop(bool keep) noexcept { m_keep_stale = keep; }

private:
    struct LayerStore {
        std::vector<float> k_no_pos;
        std::vector<float> v;
        std::vector<float> k_mat;
    };

    void erase_rows(std::size_t offset, std::size_t count);
    void note_position(std::size_t position) noexcept;

    CacheShape m_shape;
    bool m_checked;
    bool m_materialized = false;
    bool m_keep_stale = false;
    std::vector<LayerStore> m_layers;
    SegmentTable m_segments;
    std::optional<std::size_t> m_max_position;
};

}  // namespace minseek
