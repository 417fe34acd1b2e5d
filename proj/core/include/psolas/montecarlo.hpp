// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "psolas/lattice.hpp"
#include "psolas/register_ops.hpp"
#include "psolas/sorter.hpp"

namespace psolas {

/// Library version, recorded in every run manifest.
const char* version() noexcept;

/*!
 * Full parameter set of one 2D sorting experiment.
 *
 * The atom reservoir is the whole lattice; the target is a centered square.
 */
struct Scenario
{
    std::string name = "custom";
    SiteVector extent{100, 100};
    std::int64_t target_side = 31;
    double alpha = 0.6;
    ErrorModel errors;
    TimingModel timing;
    StopCriteria stop{200};
    MatchConstraints constraints;

    /// Conservative: 80 % addressing efficiency, 40 % filling.
    static Scenario preset_a();
    /// State of the art: 95 % addressing efficiency, 60 % filling.
    static Scenario preset_b();
    /// Same geometry and filling with every error channel disabled.
    Scenario error_free() const;

    LatticeGeometry geometry() const;
    TargetPattern target() const;
    /// Throws ParameterError / GeometryError on invalid fields.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct TrialRecord
{
    std::size_t index = 0;
    std::uint64_t seed = 0;
    SortReport report;
};

struct SuccessPoint
{
    double time = 0;                //!< [s]
    double success_probability = 0; //!< fraction of all trials done by `time`
};

struct DefectPoint
{
    std::size_t iteration = 0;
    double mean = 0;
    double q05 = 0;
    double q95 = 0;
};

struct EnsembleResult
{
    Scenario scenario;
    std::uint64_t master_seed = 0;
    std::vector<TrialRecord> trials; //!< ordered by trial index
    std::vector<SuccessPoint> success_curve;
    std::vector<DefectPoint> defect_curve;
    double success_fraction = 0;
};

/// One trial: sample the filling from `seed`, then sort with the same stream.
SortReport run_trial(const Scenario& scenario, std::uint64_t seed);

/// Seed of trial `index`; see split_seed.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) noexcept;

/*!
 * Run `n_trials` independent trials.
 *
 * Trial k uses trial_seed(master_seed, k) and writes only slot k, so the
 * result is identical for every thread count. `threads == 0` picks the
 * hardware concurrency.
 */
EnsembleResult run_ensemble(const Scenario& scenario,
                            std::size_t n_trials,
                            std::uint64_t master_seed,
                            std::size_t threads = 1);

/// Step curve over successful trials' completion times. Non-decreasing; the
/// last value equals the success fraction.
std::vector<SuccessPoint> success_curve(std::span<const TrialRecord> trials);

/// Ground-truth defects per iteration across trials. Trials that stopped
/// earlier contribute their final count.
std::vector<DefectPoint> defect_curve(std::span<const TrialRecord> trials);

/// Nearest-rank p-quantile: the ceil(p n)-th smallest value.
/// Throws StatisticsError unless 0 < p < 1 and n >= ceil(1 / (1 - p)).
double nearest_rank_quantile(std::vector<double> values, double p);

/// p-quantile of completion times; failed trials count as +infinity.
double success_quantile(const EnsembleResult& result, double p);

struct ScalingRow
{
    double alpha = 0;
    std::size_t n_sites = 0;
    double mean_iterations = 0;
    std::size_t max_iterations = 0;
    std::size_t bound_iterations = 0; //!< iterations_for_unity(alpha, n_sites)
    std::size_t defect_free_trials = 0;
    std::size_t trials = 0;
};

/// Error-free sweep over filling probabilities and square target sizes
/// (n_sites must be a perfect square that fits in `extent`).
std::vector<ScalingRow> scaling_sweep(std::span<const double> alphas,
                                      std::span<const std::size_t> sizes,
                                      std::size_t n_trials,
                                      std::uint64_t seed,
                                      SiteVector extent = {100, 100},
                                      std::size_t threads = 1);

//---------------------------------------------------------------------------//
// CSV / manifest export
//---------------------------------------------------------------------------//

/// `time_s,success_probability`
void write_success_csv(std::ostream& os, const EnsembleResult& result);
/// `iteration,mean_defects,q05,q95`
void write_defect_csv(std::ostream& os, const EnsembleResult& result);
/// `trial,seed,outcome,iterations,completion_time_s,residual_defects,final_defects`
void write_trials_csv(std::ostream& os, const EnsembleResult& result);
/// `alpha,n_sites,mean_iterations,max_iterations,bound_iterations,defect_free_trials,trials`
void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows);

} // namespace psolas
