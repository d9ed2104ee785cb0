// Copyright (C) 2026 The minseek Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace minseek {

using TokenId = std::int32_t;
using Logits = std::vector<float>;

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, cache or policy configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A position id reached the model's maximum context length.
class PositionOverflow : public Error {
public:
    PositionOverflow(std::size_t position, std::size_t max_context_length)
        : Error("position id " + std::to_string(position) + " reaches max_context_length " +
                std::to_string(max_context_length)),
          m_position(position) {}

    std::size_t position() const noexcept { return m_position; }

private:
    std::size_t m_position;
};

/// Cache bookkeeping or consistency violation.
class CacheError : public Error {
public:
    using Error::Error;
};

/// Cache contents exceed the configured (retained + 2) x u bound.
class BoundViolation : public Error {
public:
    using Error::Error;
};

}  // namespace minseek
