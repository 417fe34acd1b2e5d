// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "psolas/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "psolas/errors.hpp"
#include "psolas/text_format.hpp"

#ifndef PSOLAS_VERSION_STRING
#define PSOLAS_VERSION_STRING "0.0.0"
#endif

namespace psolas {

const char* version() noexcept
{
    return PSOLAS_VERSION_STRING;
}

//---------------------------------------------------------------------------//
namespace {

// The 2D proposals assume single-site resolved addressing and imaging, so
// the presets switch off crosstalk and reconstruction errors and keep the
// measured pumping and transport channels.
Scenario base_preset()
{
    Scenario s;
    s.errors.crosstalk_prob = 0;
    s.errors.isolation_radius = 0;
    s.errors.reconstruct_error_prob = 0;
    s.errors.background_lifetime = std::numeric_limits<double>::infinity();
    return s;
}

template<class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn)
{
    if (threads == 0)
        threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace

Scenario Scenario::preset_a()
{
    Scenario s = base_preset();
    s.name = "A";
    s.alpha = 0.40;
    s.errors.address_efficiency = 0.80;
    return s;
}

Scenario Scenario::preset_b()
{
    Scenario s = base_preset();
    s.name = "B";
    s.alpha = 0.60;
    s.errors.address_efficiency = 0.95;
    return s;
}

Scenario Scenario::error_free() const
{
    Scenario s = *this;
    s.errors = ErrorModel::error_free();
    s.errors.isolation_radius = errors.isolation_radius;
    return s;
}

LatticeGeometry Scenario::geometry() const
{
    return LatticeGeometry(2, extent);
}

TargetPattern Scenario::target() const
{
    return TargetPattern::centered_square(geometry(), target_side);
}

void Scenario::validate() const
{
    if (!(alpha >= 0 && alpha <= 1))
        throw ParameterError(fmt::format("alpha must be in [0, 1], got {}", alpha));
    if (target_side < 1 || target_side > std::min(extent.x, extent.y))
        throw GeometryError("target square does not fit in the lattice");
    errors.validate();
    timing.validate();
    geometry();
}

//---------------------------------------------------------------------------//
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t index) noexcept
{
    return split_seed(master_seed, index);
}

SortReport run_trial(const Scenario& scenario, std::uint64_t seed)
{
    auto geo = scenario.geometry();
    auto target = scenario.target();
    RngStream rng(seed);
    auto state = sample_initial_filling(geo, geo.bounds(), scenario.alpha, rng);
    RegisterOps ops(scenario.errors, scenario.timing, rng);
    return psolas_sort(state, target, ops, scenario.stop, scenario.constraints);
}

EnsembleResult run_ensemble(const Scenario& scenario,
                            std::size_t n_trials,
                            std::uint64_t master_seed,
                            std::size_t threads)
{
    if (n_trials < 1)
        throw ParameterError("n_trials must be at least 1");
    scenario.validate();

    EnsembleResult result;
    result.scenario = scenario;
    result.master_seed = master_seed;
    result.trials.resize(n_trials);
    parallel_for(n_trials, threads, [&](std::size_t k) {
        auto& t = result.trials[k];
        t.index = k;
        t.seed = trial_seed(master_seed, k);
        t.report = run_trial(scenario, t.seed);
    });

    result.success_curve = success_curve(result.trials);
    result.defect_curve = defect_curve(result.trials);
    auto ok = std::count_if(result.trials.begin(), result.trials.end(),
                            [](const TrialRecord& t) { return t.report.success(); });
    result.success_fraction = static_cast<double>(ok) / static_cast<double>(n_trials);
    return result;
}

std::vector<SuccessPoint> success_curve(std::span<const TrialRecord> trials)
{
    std::vector<double> times;
    for (const auto& t : trials)
        if (t.report.success())
            times.push_back(t.report.completion_time);
    std::sort(times.begin(), times.end());

    std::vector<SuccessPoint> curve;
    const auto n = static_cast<double>(trials.size());
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        double p = static_cast<double>(i + 1) / n;
        if (!curve.empty() && curve.back().time == times[i])
            curve.back().success_probability = p;
        else
            curve.push_back({times[i], p});
    }
    return curve;
}

std::vector<DefectPoint> defect_curve(std::span<const TrialRecord> trials)
{
    std::size_t length = 0;
    for (const auto& t : trials)
        length = std::max(length, t.report.defect_trace.size());

    std::vector<DefectPoint> curve;
    std::vector<double> values;
    for (std::size_t i = 0; i < length; ++i)
    {
        values.clear();
        double sum = 0;
        for (const auto& t : trials)
        {
            const auto& trace = t.report.defect_trace;
            if (trace.empty())
                continue;
            auto v = static_cast<double>(trace[std::min(i, trace.size() - 1)]);
            values.push_back(v);
            sum += v;
        }
        std::sort(values.begin(), values.end());
        auto rank = [&](double p) {
            auto r = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) - 1e-9));
            return values[std::clamp<std::size_t>(r, 1, values.size()) - 1];
        };
        curve.push_back({i, sum / static_cast<double>(values.size()), rank(0.05), rank(0.95)});
    }
    return curve;
}

double nearest_rank_quantile(std::vector<double> values, double p)
{
    if (!(p > 0 && p < 1))
        throw StatisticsError(fmt::format("quantile level must be in (0, 1), got {}", p));
    const auto needed = static_cast<std::size_t>(std::ceil(1 / (1 - p) - 1e-9));
    if (values.size() < needed)
        throw StatisticsError(
            fmt::format("{}-quantile needs at least {} samples, got {}", p, needed, values.size()));
    std::sort(values.begin(), values.end());
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(values.size()) - 1e-9));
    return values[std::clamp<std::size_t>(rank, 1, values.size()) - 1];
}

double success_quantile(const EnsembleResult& result, double p)
{
    std::vector<double> times;
    times.reserve(result.trials.size());
    for (const auto& t : result.trials)
        times.push_back(t.report.success() ? t.report.completion_time
                                           : std::numeric_limits<double>::infinity());
    return nearest_rank_quantile(std::move(times), p);
}

std::vector<ScalingRow> scaling_sweep(std::span<const double> alphas,
                                      std::span<const std::size_t> sizes,
                                      std::size_t n_trials,
                                      std::uint64_t seed,
                                      SiteVector extent,
                                      std::size_t threads)
{
    if (alphas.empty() || sizes.empty())
        throw ParameterError("scaling sweep needs non-empty parameter grids");
    std::vector<ScalingRow> rows;
    std::uint64_t point = 0;
    for (double alpha : alphas)
    {
        for (auto n_sites : sizes)
        {
            auto side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n_sites))));
            if (side < 1 || static_cast<std::size_t>(side * side) != n_sites)
                throw ParameterError(fmt::format("n_sites = {} is not a perfect square", n_sites));
            Scenario s;
            s.name = "sweep";
            s.extent = extent;
            s.target_side = side;
            s.alpha = alpha;
            s = s.error_free();
            auto ens = run_ensemble(s, n_trials, split_seed(seed, point++), threads);

            ScalingRow row;
            row.alpha = alpha;
            row.n_sites = n_sites;
            row.trials = n_trials;
            row.bound_iterations = iterations_for_unity(alpha, n_sites);
            double sum = 0;
            for (const auto& t : ens.trials)
            {
                sum += static_cast<double>(t.report.iterations);
                row.max_iterations = std::max(row.max_iterations, t.report.iterations);
                row.defect_free_trials += t.report.success() ? 1 : 0;
            }
            row.mean_iterations = sum / static_cast<double>(n_trials);
            rows.push_back(row);
        }
    }
    return rows;
}

//---------------------------------------------------------------------------//
void write_success_csv(std::ostream& os, const EnsembleResult& result)
{
    os << "time_s,success_probability\n";
    for (const auto& p : result.success_curve)
        os << format_double(p.time) << ',' << format_double(p.success_probability) << '\n';
}

void write_defect_csv(std::ostream& os, const EnsembleResult& result)
{
    os << "iteration,mean_defects,q05,q95\n";
    for (const auto& p : result.defect_curve)
        os << p.iteration << ',' << format_double(p.mean) << ',' << format_double(p.q05) << ','
           << format_double(p.q95) << '\n';
}

void write_trials_csv(std::ostream& os, const EnsembleResult& result)
{
    os << "trial,seed,outcome,iterations,completion_time_s,residual_defects,final_defects\n";
    for (const auto& t : result.trials)
    {
        os << t.index << ',' << t.seed << ',' << to_string(t.report.outcome) << ',' << t.report.iterations
           << ',' << format_double(t.report.completion_time) << ',' << t.report.residual_defects << ','
           << t.report.final_defects << '\n';
    }
}

void write_scaling_csv(std::ostream& os, std::span<const ScalingRow> rows)
{
    os << "alpha,n_sites,mean_iterations,max_iterations,bound_iterations,defect_free_trials,trials\n";
    for (const auto& r : rows)
    {
        os << format_double(r.alpha) << ',' << r.n_sites << ',' << format_double(r.mean_iterations) << ','
           << r.max_iterations << ',' << r.bound_iterations << ',' << r.defect_free_trials << ',' << r.trials
           << '\n';
    }
}

} // namespace psolas
