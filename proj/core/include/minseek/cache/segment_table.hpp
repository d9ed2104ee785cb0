// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace minseek {

/// PT1 is the prompt plus the first, uninduced thought.
enum class SegmentKind { kPt1, kRc, kAnswer };

std::string_view to_string(SegmentKind kind) noexcept;

struct Segment {
    SegmentKind kind = SegmentKind::kPt1;
    std::size_t rc_index = 0;  // 1-based for RC, 0 otherwise
    std::size_t token_len = 0;  // cache rows owned by the segment
    std::uint64_t creation_order = 0;  // doubles as the segment id
    std::size_t offset = 0;  // first row in the cache sequence

    /// Rows excluding the single trigger token (wait or think_end) that opens RC and
    /// ANSWER segments. This is the length compared by the min rule.
    std::size_t content_len() const noexcept {
        if (kind == SegmentKind::kPt1 || token_len == 0) {
            return token_len;
        }
        return token_len - 1;
    }

    std::size_t end() const noexcept { return offset + token_len; }

    /// e.g. "RC3#5@10+4": kind, rc index, id, offset, rows.
    std::string label() const;

    bool operator==(const Segment&) const = default;
};

/**
 * Ordered record of the segments resident in a cache. Segments are contiguous:
 * each offset is the previous offset plus the previous length. At most one
 * segment is open (receiving rows) at a time and it is always last.
 */
class SegmentTable {
public:
    const std::vector<Segment>& committed() const noexcept { return m_segments; }
    const std::optional<Segment>& open() const noexcept { return m_open; }

    /// Offset the next segment would start at.
    std::size_t committed_length() const noexcept;

    /// Throws CacheError if a segment is already open, if PT1 is not first, or
    /// if a second PT1 is requested.
    const Segment& begin(SegmentKind kind, std::size_t rc_index, std::size_t cache_length);

    /// Closes the open segment; `token_len` must equal the rows appended since begin.
    const Segment& commit(std::size_t token_len, std::size_t cache_length);

    const Segment* find(std::uint64_t id) const noexcept;

    /// Removes a committed segment and shifts later offsets down.
    Segment remove(std::uint64_t id);

    /// Committed RC segments in cache order.
    std::vector<Segment> rcs() const;

    /// Throws CacheError if the structural invariants do not hold for `cache_length` rows.
    void validate(std::size_t cache_length) const;

    std::string dump() const;

private:
    std::vector<Segment> m_segments;
    std::optional<Segment> m_open;
    std::uint64_t m_next_order = 0;
};

}  // namespace minseek
