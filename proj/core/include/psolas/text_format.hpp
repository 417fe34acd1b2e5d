// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace psolas {

/// Shortest decimal text that parses back to exactly `value`.
/// Infinities print as `inf`.
std::string format_double(double value);

/// Strict full-string parse; accepts `inf`. Empty optional on any junk.
std::optional<double> parse_double(std::string_view text);

} // namespace psolas
