// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "psolas/montecarlo.hpp"

namespace psolas {

/*!
 * Effective configuration of one CLI run.
 *
 * Text format: one `key = value` per line, `#` starts a comment, blank lines
 * are ignored, each key at most once. `scenario` selects a preset (A, B or
 * custom; default B); every scenario key overrides the preset regardless of
 * line order. to_text() writes every key with its effective value, and
 * parse_config(to_text(c)) == c.
 */
struct RunConfig
{
    struct Override
    {
        std::string key;
        std::string value;
        std::size_t line = 0;

        friend bool operator==(const Override&, const Override&) = default;
    };

    std::string mode = "ensemble"; //!< sort | fig1 | ensemble | sweep | ramp
    std::string scenario_name = "B";
    std::vector<Override> overrides; //!< scenario keys, in file order
    bool error_free = false;

    std::string out_dir = "psolas_out";
    std::uint64_t seed = 1;
    std::size_t trials = 500;
    std::size_t threads = 1;
    bool export_log = true;
    bool export_snapshots = true;
    bool export_plan = true;

    // fig1
    std::int64_t fig1_width = 100;
    std::size_t fig1_max_passes = 4;
    std::vector<std::int64_t> fig1_separations{10, 5, 2, 1};

    // sweep
    std::vector<double> sweep_alphas{0.4, 0.6};
    std::vector<std::size_t> sweep_sizes{25, 121, 441, 961};

    // ramp
    double ramp_displacement = 2;
    double ramp_duration = 1e-3;
    std::size_t ramp_samples = 101;

    /// Preset + overrides (+ error-free switch), resolved.
    Scenario scenario = Scenario::preset_b();

    /// Recompute `scenario` from scenario_name, overrides and error_free.
    /// Throws ConfigError naming the offending key and line.
    void resolve();

    std::string to_text() const;

    friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Throws ConfigError on unknown or repeated keys, malformed numbers and
/// out-of-range values.
RunConfig parse_config(std::string_view text);

/// Names accepted by parse_config.
std::vector<std::string> config_keys();

} // namespace psolas
