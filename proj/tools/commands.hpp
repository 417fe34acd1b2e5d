// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

#include "psolas/config.hpp"

namespace psolas::cli {

/*!
 * \name Run modes
 *
 * Each command writes only below `config.out_dir` (created if missing),
 * always including `manifest.txt`. Return value is the process exit status:
 * 0 when the run completed, whatever its scientific outcome; 2 on I/O or
 * parameter faults, with a diagnostic on `diag`.
 */
//!@{
int cmd_sort(const RunConfig& config, std::ostream& diag);
int cmd_fig1(const RunConfig& config, std::ostream& diag);
int cmd_ensemble(const RunConfig& config, std::ostream& diag);
int cmd_sweep(const RunConfig& config, std::ostream& diag);
int cmd_ramp(const RunConfig& config, std::ostream& diag);
//!@}

/// Dispatch on config.mode.
int run(const RunConfig& config, std::ostream& diag);

} // namespace psolas::cli
