// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psolas {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// A site, region or target lies outside the lattice extent.
class GeometryError : public Error
{
  public:
    using Error::Error;
};

/// A numeric argument is out of its documented range.
class ParameterError : public Error
{
  public:
    using Error::Error;
};

/// An operation was called on atoms that do not satisfy its precondition.
class PreconditionError : public Error
{
  public:
    using Error::Error;
};

/// Internal bookkeeping disagrees with itself. Unreachable via the public API.
class ConsistencyError : public Error
{
  public:
    using Error::Error;
};

/// Not enough samples for the requested statistic.
class StatisticsError : public Error
{
  public:
    using Error::Error;
};

/// Malformed or out-of-range run configuration.
class ConfigError : public Error
{
  public:
    ConfigError(std::string key, std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ", key '" + key + "': " + what)
        , key_(std::move(key))
        , line_(line)
    {
    }

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string key_;
    std::size_t line_;
};

} // namespace psolas
