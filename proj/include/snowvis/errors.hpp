// Copyright 2026 The snowvis Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SNOWVIS_ERRORS_HPP
#define SNOWVIS_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace snowvis {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated input file. Carries the byte offset where parsing
/// stopped (or the 1-based line for text formats).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Bad argument, unknown format tag, unknown filter name.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Scan outside a window, or a window with nothing in it.
class WindowError : public Error {
 public:
  enum class Kind { outside_window, no_scans, no_strip_points };

  WindowError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Statistic requested over an empty support (e.g. no observed cell).
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace snowvis

#endif  // SNOWVIS_ERRORS_HPP
