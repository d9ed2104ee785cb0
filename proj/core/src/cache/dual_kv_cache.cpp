// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/cache/dual_kv_cache.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "minseek/model/rope.hpp"

namespace minseek {

namespace {

constexpr float kConsistencyTolerance = 1e-6f;

}  // namespace

CacheShape CacheShape::from_model(const ModelConfig& config) noexcept {
    return CacheShape{config.n_layers, config.n_heads, config.d_head, config.max_context_length,
                      config.rope_theta};
}

void CacheBound::validate_against(std::size_t max_context_length) const {
    if (u == 0) {
        throw ConfigError("segment cap u must be >= 1");
    }
    if (limit() >= max_context_length) {
        std::ostringstream msg;
        msg << "cache bound (" << retained_rc_max << " + 2";
        if (extra_segments != 0) {
            msg << " + " << extra_segments;
        }
        msg << ") x " << u << " = " << limit() << " is not less than max_context_length " << max_context_length;
        throw ConfigError(msg.str());
    }
}

std::string_view to_string(MinRuleDecision decision) noexcept {
    switch (decision) {
        case MinRuleDecision::kAdmittedNew:
            return "admitted";
        case MinRuleDecision::kKeptOld:
            return "kept";
        case MinRuleDecision::kReplacedWithNew:
            return "replaced";
    }
    return "?";
}

DualKvCache::DualKvCache(const CacheShape& shape, bool checked)
    : m_shape(shape), m_checked(checked), m_layers(shape.n_layers) {
    if (shape.n_layers == 0 || shape.n_heads == 0 || shape.d_head == 0 || shape.d_head % 2 != 0) {
        throw ConfigError("cache shape needs >= 1 layer, >= 1 head and an even head dimension");
    }
    if (shape.max_context_length == 0) {
        throw ConfigError("max_context_length must be >= 1");
    }
}

std::size_t DualKvCache::length() const noexcept {
    return m_layers.back().v.size() / m_shape.width();
}

std::size_t DualKvCache::layer_length(std::size_t layer) const {
    return m_layers.at(layer).v.size() / m_shape.width();
}

void DualKvCache::note_position(std::size_t position) noexcept {
    if (!m_max_position || position > *m_max_position) {
        m_max_position = position;
    }
}

DualKvCache::LayerView DualKvCache::update(std::size_t layer, std::span<const float> k_rot,
                                           std::span<const float> k_no_pos, std::span<const float> v) {
    const std::size_t width = m_shape.width();
    if (layer >= m_layers.size()) {
        throw CacheError("layer " + std::to_string(layer) + " out of range");
    }
    if (k_rot.size() != width || k_no_pos.size() != width || v.size() != width) {
        throw CacheError("update expects n_heads x d_head values per tensor");
    }
    if (!m_materialized) {
        throw CacheError("update before materialize_all(): rotated keys are absent");
    }
    LayerStore& store = m_layers[layer];
    const std::size_t position = store.v.size() / width;
    if (position != length()) {
        throw CacheError("layer " + std::to_string(layer) + " is out of step with the cache");
    }
    if (position >= m_shape.max_context_length) {
        throw PositionOverflow(position, m_shape.max_context_length);
    }
    if (m_checked) {
        std::vector<float> expected(k_no_pos.begin(), k_no_pos.end());
        apply_rope_heads(expected, m_shape.d_head, position, m_shape.rope_theta);
        for (std::size_t i = 0; i < width; ++i) {
            if (std::fabs(expected[i] - k_rot[i]) > kConsistencyTolerance) {
                throw CacheError("rotated key at position " + std::to_string(position) +
                                 " is inconsistent with its position-free key");
            }
        }
    }

    store.k_no_pos.insert(store.k_no_pos.end(), k_no_pos.begin(), k_no_pos.end());
    store.v.insert(store.v.end(), v.begin(), v.end());
    store.k_mat.insert(store.k_mat.end(), k_rot.begin(), k_rot.end());
    note_position(position);
    return LayerView{store.k_mat, store.v, position + 1};
}

DualKvCache::LayerView DualKvCache::layer_view(std::size_t layer) const {
    if (!m_materialized) {
        throw CacheError("layer_view requires materialized keys");
    }
    const LayerStore& store = m_layers.at(layer);
    return LayerView{store.k_mat, store.v, store.v.size() / m_shape.width()};
}

std::span<const float> DualKvCache::keys_no_pos(std::size_t layer) const {
    return m_layers.at(layer).k_no_pos;
}

std::span<const float> DualKvCache::values(std::size_t layer) const {
    return m_layers.at(layer).v;
}

void DualKvCache::materialize_all() {
    const std::size_t width = m_shape.width();
    for (LayerStore& store : m_layers) {
        store.k_mat = store.k_no_pos;
        const std::size_t rows = store.k_mat.size() / width;
        for (std::size_t i = 0; i < rows; ++i) {
            apply_rope_heads(std::span<float>(store.k_mat.data() + i * width, width), m_shape.d_head, i,
                             m_shape.rope_theta);
        }
    }
    m_materialized = true;
    if (length() > 0) {
        note_position(length() - 1);
    }
}

void DualKvCache::discard_materialized() noexcept {
    for (LayerStore& store : m_layers) {
        std::vector<float>().swap(store.k_mat);
    }
    m_materialized = false;
}

const Segment& DualKvCache::begin_segment(SegmentKind kind, std::size_t rc_index) {
    return m_segments.begin(kind, rc_index, length());
}

const Segment& DualKvCache::commit_segment(std::size_t token_len) {
    return m_segments.commit(token_len, length());
}

void DualKvCache::erase_rows(std::size_t offset, std::size_t count) {
    const std::size_t width = m_shape.width();
    const auto first = static_cast<std::ptrdiff_t>(offset * width);
    const auto last = static_cast<std::ptrdiff_t>((offset + count) * width);
    for (LayerStore& store : m_layers) {
        store.k_no_pos.erase(store.k_no_pos.begin() + first, store.k_no_pos.begin() + last);
        store.v.erase(store.v.begin() + first, store.v.begin() + last);
        if (m_keep_stale && m_materialized) {
            store.k_mat.erase(store.k_mat.begin() + first, store.k_mat.begin() + last);
        }
    }
    if (!m_keep_stale) {
        discard_materialized();
    }
}

Segment DualKvCache::drop_segment(std::uint64_t segment_id) {
    const Segment* segment = m_segments.find(segment_id);
    if (segment == nullptr) {
        throw CacheError("drop of unknown or uncommitted segment " + std::to_string(segment_id));
    }
    if (segment->kind == SegmentKind::kPt1) {
        throw CacheError("PT1 is always retained and cannot be dropped");
    }
    const std::size_t offset = segment->offset;
    const std::size_t rows = segment->token_len;
    const Segment removed = m_segments.remove(segment_id);
    erase_rows(offset, rows);
    return removed;
}

MinRuleResult DualKvCache::apply_min_rule(std::uint64_t candidate_id, std::size_t retained_rc_max) {
    if (retained_rc_max == 0) {
        throw ConfigError("retained_rc_max must be >= 1");
    }
    const Segment* found = m_segments.find(candidate_id);
    if (found == nullptr || found->kind != SegmentKind::kRc) {
        throw CacheError("min rule needs a committed reconstruction cycle, got id " + std::to_string(candidate_id));
    }
    MinRuleResult result;
    result.candidate = *found;

    std::vector<Segment> retained;
    for (const Segment& s : m_segments.rcs()) {
        if (s.creation_order != candidate_id) {
            retained.push_back(s);
        }
    }
    if (retained.size() < retained_rc_max) {
        result.decision = MinRuleDecision::kAdmittedNew;
        result.kept = result.candidate;
        return result;
    }

    // Longest retained cycle; among equal lengths the newest is the one to give up.
    const Segment incumbent = *std::max_element(retained.begin(), retained.end(), [](const Segment& a, const Segment& b) {
        if (a.content_len() != b.content_len()) {
            return a.content_len() < b.content_len();
        }
        return a.creation_order < b.creation_order;
    });
    result.incumbent = incumbent;

    if (incumbent.content_len() <= result.candidate.content_len()) {
        result.decision = MinRuleDecision::kKeptOld;
        result.evicted = drop_segment(candidate_id);
        result.kept = *m_segments.find(incumbent.creation_order);
    } else {
        result.decision = MinRuleDecision::kReplacedWithNew;
        result.evicted = drop_segment(incumbent.creation_order);
        result.kept = *m_segments.find(candidate_id);
    }
    return result;
}

void DualKvCache::check_bound(const CacheBound& bound) const {
    auto check_segment = [&](const Segment& s, std::size_t rows) {
        if (rows > bound.u) {
            throw BoundViolation("segment " + s.label() + " holds " + std::to_string(rows) + " rows, cap u = " +
                                 std::to_string(bound.u));
        }
    };
    for (const Segment& s : m_segments.committed()) {
        check_segment(s, s.token_len);
    }
    if (const auto& open = m_segments.open()) {
        check_segment(*open, length() - open->offset);
    }
    if (length() > bound.limit()) {
        throw BoundViolation("cache holds " + std::to_string(length()) + " rows, bound is " +
                             std::to_string(bound.limit()));
    }
}

MemoryFootprint DualKvCache::footprint() const noexcept {
    MemoryFootprint fp;
    fp.rows = length();
    for (const LayerStore& store : m_layers) {
        fp.k_no_pos_bytes += store.k_no_pos.size() * sizeof(float);
        fp.v_bytes += store.v.size() * sizeof(float);
        fp.k_materialized_bytes += store.k_mat.size() * sizeof(float);
    }
    fp.materialized_rows = m_materialized ? m_layers.back().k_mat.size() / m_shape.width() : 0;
    return fp;
}

std::string DualKvCache::dump_state() const {
    std::ostringstream out;
    out << "segments=" << m_segments.dump() << " rows=";
    for (std::size_t l = 0; l < m_layers.size(); ++l) {
        out << (l ? "," : "") << layer_length(l);
    }
    out << " materialized=" << (m_materialized ? 1 : 0);
    return out.str();
}

}  // namespace minseek
