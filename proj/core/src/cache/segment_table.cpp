// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#include "minseek/cache/segment_table.hpp"

#include <algorithm>
#include <sstream>

#include "minseek/types.hpp"

namespace minseek {

std::string_view to_string(SegmentKind kind) noexcept {
    switch (kind) {
        case SegmentKind::kPt1:
            return "PT1";
        case SegmentKind::kRc:
            return "RC";
        case SegmentKind::kAnswer:
            return "ANSWER";
    }
    return "?";
}

std::string Segment::label() const {
    std::ostringstream out;
    out << to_string(kind);
    if (kind == SegmentKind::kRc) {
        out << rc_index;
    }
    out << '#' << creation_order << '@' << offset << '+' << token_len;
    return out.str();
}

std::size_t SegmentTable::committed_length() const noexcept {
    return m_segments.empty() ? 0 : m_segments.back().end();
}

const Segment& SegmentTable::begin(SegmentKind kind, std::size_t rc_index, std::size_t cache_length) {
    if (m_open) {
        throw CacheError("cannot begin a segment while " + m_open->label() + " is open");
    }
    const bool has_pt1 = !m_segments.empty() && m_segments.front().kind == SegmentKind::kPt1;
    if (kind == SegmentKind::kPt1 && (!m_segments.empty() || m_next_order != 0)) {
        throw CacheError("PT1 must be the first and only PT1 segment");
    }
    if (kind != SegmentKind::kPt1 && !has_pt1) {
        throw CacheError("the first segment must be PT1");
    }
    if (kind == SegmentKind::kRc && rc_index == 0) {
        throw CacheError("reconstruction cycles are numbered from 1");
    }
    if (cache_length != committed_length()) {
        throw CacheError("cache holds " + std::to_string(cache_length) + " rows but committed segments cover " +
                         std::to_string(committed_length()));
    }
    Segment segment;
    segment.kind = kind;
    segment.rc_index = kind == SegmentKind::kRc ? rc_index : 0;
    segment.creation_order = m_next_order++;
    segment.offset = cache_length;
    m_open = segment;
    return *m_open;
}

const Segment& SegmentTable::commit(std::size_t token_len, std::size_t cache_length) {
    if (!m_open) {
        throw CacheError("commit without an open segment");
    }
    const std::size_t appended = cache_length - m_open->offset;
    if (appended != token_len) {
        throw CacheError("commit of " + m_open->label() + " with token_len " + std::to_string(token_len) +
                         " but " + std::to_string(appended) + " rows were appended");
    }
    m_open->token_len = token_len;
    m_segments.push_back(*m_open);
    m_open.reset();
    return m_segments.back();
}

const Segment* SegmentTable::find(std::uint64_t id) const noexcept {
    const auto it = std::find_if(m_segments.begin(), m_segments.end(),
                                 [id](const Segment& s) { return s.creation_order == id; });
    return it == m_segments.end() ? nullptr : &*it;
}

Segment SegmentTable::remove(std::uint64_t id) {
    const auto it = std::find_if(m_segments.begin(), m_segments.end(),
                                 [id](const Segment& s) { return s.creation_order == id; });
    if (it == m_segments.end()) {
        throw CacheError("no committed segment with id " + std::to_string(id));
    }
    if (it->kind == SegmentKind::kPt1) {
        throw CacheError("PT1 is always retained and cannot be dropped");
    }
    if (m_open) {
        throw CacheError("cannot drop a segment while " + m_open->label() + " is open");
    }
    const Segment removed = *it;
    const auto next = m_segments.erase(it);
    for (auto later = next; later != m_segments.end(); ++later) {
        later->offset -= removed.token_len;
    }
    return removed;
}

std::vector<Segment> SegmentTable::rcs() const {
    std::vector<Segment> out;
    std::copy_if(m_segments.begin(), m_segments.end(), std::back_inserter(out),
                 [](const Segment& s) { return s.kind == SegmentKind::kRc; });
    return out;
}

void SegmentTable::validate(std::size_t cache_length) const {
    std::size_t expected_offset = 0;
    std::uint64_t last_order = 0;
    for (std::size_t i = 0; i < m_segments.size(); ++i) {
        const Segment& s = m_segments[i];
        if ((i == 0) != (s.kind == SegmentKind::kPt1)) {
            throw CacheError("PT1 must be exactly the first segment, found " + s.label());
        }
        if (s.offset != expected_offset) {
            throw CacheError("segment " + s.label() + " is not contiguous with its predecessor");
        }
        if (i > 0 && s.creation_order <= last_order) {
            throw CacheError("segment creation order is not increasing at " + s.label());
        }
        expected_offset = s.end();
        last_order = s.creation_order;
    }
    const std::size_t open_rows = m_open ? cache_length - m_open->offset : 0;
    if (m_open && m_open->offset != expected_offset) {
        throw CacheError("open segment " + m_open->label() + " does not follow the committed ones");
    }
    if (expected_offset + open_rows != cache_length) {
        throw CacheError("segments cover " + std::to_string(expected_offset + open_rows) + " rows, cache has " +
                         std::to_string(cache_length));
    }
}

std::string SegmentTable::dump() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < m_segments.size(); ++i) {
        out << (i ? "," : "") << m_segments[i].label();
    }
    if (m_segments.empty()) {
        out << '-';
    }
    if (m_open) {
        out << " open=" << to_string(m_open->kind);
        if (m_open->kind == SegmentKind::kRc) {
            out << m_open->rc_index;
        }
        out << '#' << m_open->creation_order << '@' << m_open->offset;
    }
    return out.str();
}

}  // namespace minseek
