// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "psolas/errors.hpp"
#include "psolas/lattice.hpp"
#include "psolas/montecarlo.hpp"
#include "psolas/register_ops.hpp"
#include "psolas/sorter.hpp"
#include "psolas/text_format.hpp"
#include "psolas/transport.hpp"

namespace psolas::cli {
namespace {

namespace fs = std::filesystem;

class IoError : public Error
{
  public:
    using Error::Error;
};

fs::path prepare_out_dir(const RunConfig& config)
{
    fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    return dir;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    body(os);
    os.flush();
    if (!os)
        throw IoError(fmt::format("write to '{}' failed", path.string()));
}

// Manifest: command, version, status lines, then the effective config echo.
void write_manifest(const fs::path& dir,
                    const RunConfig& config,
                    std::string_view command,
                    const std::vector<std::pair<std::string, std::string>>& results)
{
    write_file(dir / "manifest.txt", [&](std::ostream& os) {
        os << "# psolas run manifest\n";
        os << "command = " << command << '\n';
        os << "version = " << version() << '\n';
        for (const auto& [k, v] : results)
            os << "result." << k << " = " << v << '\n';
        os << config.to_text();
    });
}

template<class Fn>
int guarded(std::ostream& diag, std::string_view name, Fn&& fn)
{
    try
    {
        fn();
        return 0;
    }
    catch (const std::exception& e)
    {
        diag << "psolas " << name << ": error: " << e.what() << '\n';
        return 2;
    }
}

std::string time_text(double t)
{
    return format_double(t);
}

} // namespace

//---------------------------------------------------------------------------//
int cmd_sort(const RunConfig& config, std::ostream& diag)
{
    return guarded(diag, "sort", [&] {
        const auto& sc = config.scenario;
        sc.validate();
        auto dir = prepare_out_dir(config);

        auto geo = sc.geometry();
        auto target = sc.target();
        RngStream rng(config.seed);
        auto state = sample_initial_filling(geo, geo.bounds(), sc.alpha, rng);
        if (config.export_snapshots)
            write_file(dir / "initial_state.txt", [&](std::ostream& os) { write_snapshot(os, state); });

        OperationLog log;
        RegisterOps ops(sc.errors, sc.timing, rng, &log);
        auto report = psolas_sort(state, target, ops, sc.stop, sc.constraints);

        if (config.export_snapshots)
            write_file(dir / "final_state.txt", [&](std::ostream& os) { write_snapshot(os, state); });
        if (config.export_log)
            write_file(dir / "events.log", [&](std::ostream& os) { log.write(os); });
        if (config.export_plan)
            write_file(dir / "plan.txt", [&](std::ostream& os) { write_plan(os, report, 2); });

        write_manifest(dir, config, "sort",
                       {{"outcome", to_string(report.outcome)},
                        {"success", report.success() ? "true" : "false"},
                        {"iterations", std::to_string(report.iterations)},
                        {"completion_time_s", time_text(report.completion_time)},
                        {"total_time_s", time_text(report.total_time)},
                        {"residual_defects", std::to_string(report.residual_defects)},
                        {"final_defects", std::to_string(report.final_defects)},
                        {"off_target_survivors", std::to_string(report.cleanup.off_target_survivors)}});
    });
}

int cmd_fig1(const RunConfig& config, std::ostream& diag)
{
    return guarded(diag, "fig1", [&] {
        const auto& sc = config.scenario;
        sc.errors.validate();
        sc.timing.validate();
        auto dir = prepare_out_dir(config);
        auto geo = LatticeGeometry::line(config.fig1_width);

        std::vector<std::pair<std::string, std::string>> results;
        std::uint64_t index = 0;
        for (auto sep : config.fig1_separations)
        {
            const std::int64_t span = 3 * sep;
            if (span >= config.fig1_width)
                throw ParameterError(fmt::format("separation {} does not fit in {} sites", sep, config.fig1_width));
            auto targets = equidistant_targets((config.fig1_width - span) / 2, sep);

            RngStream rng(split_seed(config.seed, index++));
            auto state = sample_atoms(geo, targets.size(), rng);
            if (config.export_snapshots)
                write_file(dir / fmt::format("fig1_d{}_before.txt", sep),
                           [&](std::ostream& os) { write_snapshot(os, state); });

            OperationLog log;
            RegisterOps ops(sc.errors, sc.timing, rng, &log);
            SequentialOptions opts;
            opts.max_passes = config.fig1_max_passes;
            auto report = sequential_sort_1d(state, targets, ops, opts);

            if (config.export_snapshots)
                write_file(dir / fmt::format("fig1_d{}_after.txt", sep),
                           [&](std::ostream& os) { write_snapshot(os, state); });
            if (config.export_log)
                write_file(dir / fmt::format("fig1_d{}_events.log", sep), [&](std::ostream& os) { log.write(os); });

            std::vector<std::int64_t> sites;
            for (const auto& a : state.atoms())
                if (a.alive && a.spin == SpinState::Up)
                    sites.push_back(a.true_site.x);
            std::sort(sites.begin(), sites.end());
            std::string positions;
            std::string separations;
            for (std::size_t i = 0; i < sites.size(); ++i)
            {
                positions += (i ? "," : "") + std::to_string(sites[i]);
                if (i)
                    separations += (i > 1 ? "," : "") + std::to_string(sites[i] - sites[i - 1]);
            }
            auto prefix = fmt::format("d{}.", sep);
            results.emplace_back(prefix + "outcome", to_string(report.outcome));
            results.emplace_back(prefix + "moves", std::to_string(report.moves));
            results.emplace_back(prefix + "passes", std::to_string(report.iterations));
            results.emplace_back(prefix + "final_sites", positions);
            results.emplace_back(prefix + "final_separations", separations);
        }
        write_manifest(dir, config, "fig1", results);
    });
}

int cmd_ensemble(const RunConfig& config, std::ostream& diag)
{
    return guarded(diag, "ensemble", [&] {
        auto dir = prepare_out_dir(config);
        auto result = run_ensemble(config.scenario, config.trials, config.seed, config.threads);

        write_file(dir / "success_vs_time.csv", [&](std::ostream& os) { write_success_csv(os, result); });
        write_file(dir / "defects_vs_iteration.csv", [&](std::ostream& os) { write_defect_csv(os, result); });
        write_file(dir / "trials.csv", [&](std::ostream& os) { write_trials_csv(os, result); });

        std::string q95 = "n/a";
        if (config.trials >= 20)
            q95 = time_text(success_quantile(result, 0.95));
        write_manifest(dir, config, "ensemble",
                       {{"trials", std::to_string(result.trials.size())},
                        {"success_fraction", format_double(result.success_fraction)},
                        {"success_quantile_95_s", q95},
                        {"trial_seed_rule", "split_seed(seed, trial_index)"}});
    });
}

int cmd_sweep(const RunConfig& config, std::ostream& diag)
{
    return guarded(diag, "sweep", [&] {
        auto dir = prepare_out_dir(config);
        auto rows = scaling_sweep(config.sweep_alphas, config.sweep_sizes, config.trials, config.seed,
                                  config.scenario.extent, config.threads);
        write_file(dir / "scaling.csv", [&](std::ostream& os) { write_scaling_csv(os, rows); });
        bool within = std::all_of(rows.begin(), rows.end(), [](const ScalingRow& r) {
            return r.mean_iterations <= static_cast<double>(r.bound_iterations) + 2;
        });
        write_manifest(dir, config, "sweep",
                       {{"points", std::to_string(rows.size())}, {"within_bound_plus_2", within ? "true" : "false"}});
    });
}

int cmd_ramp(const RunConfig& config, std::ostream& diag)
{
    return guarded(diag, "ramp", [&] {
        auto dir = prepare_out_dir(config);
        auto profile = sinusoidal_ramp(config.ramp_displacement, config.ramp_duration, config.ramp_samples);
        write_file(dir / "ramp.txt", [&](std::ostream& os) { write_phase_profile(os, profile); });
        double peak = ramp_velocity(config.ramp_displacement, config.ramp_duration, config.ramp_duration / 2);
        write_manifest(dir, config, "ramp",
                       {{"peak_velocity_sites_per_s", format_double(peak)},
                        {"peak_velocity_m_per_s", format_double(peak * config.scenario.geometry().site_pitch())}});
    });
}

int run(const RunConfig& config, std::ostream& diag)
{
    if (config.mode == "sort")
        return cmd_sort(config, diag);
    if (config.mode == "fig1")
        return cmd_fig1(config, diag);
    if (config.mode == "ensemble")
        return cmd_ensemble(config, diag);
    if (config.mode == "sweep")
        return cmd_sweep(config, diag);
    if (config.mode == "ramp")
        return cmd_ramp(config, diag);
    diag << "psolas: unknown mode '" << config.mode << "'\n";
    return 2;
}

} // namespace psolas::cli
