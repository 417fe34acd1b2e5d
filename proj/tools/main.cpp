// Copyright 2026 The psolas-sim Authors.
// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "psolas/errors.hpp"
#include "psolas/montecarlo.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"psolas: atom sorting in spin-dependent optical lattices"};
    app.set_version_flag("--version", psolas::version());
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    std::optional<std::string> out_dir;
    std::optional<std::string> scenario;
    bool error_free = false;

    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed (u64)");
    app.add_option("--trials", trials, "number of Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "worker threads, 0 = all cores");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--scenario", scenario, "parameter preset")->check(CLI::IsMember({"A", "B", "custom"}));
    app.add_flag("--error-free", error_free, "disable every error channel");

    app.add_subcommand("sort", "one 2D sort with event log, plan and snapshots");
    app.add_subcommand("fig1", "1D sequential sorting into four-atom patterns");
    app.add_subcommand("ensemble", "Monte Carlo ensemble: success-vs-time and defect curves");
    app.add_subcommand("sweep", "error-free iteration-count scaling sweep");
    app.add_subcommand("ramp", "export a raised-cosine transport phase profile");

    CLI11_PARSE(app, argc, argv);

    psolas::RunConfig config;
    try
    {
        std::string text;
        if (!config_path.empty())
        {
            std::ifstream in(config_path, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        config = psolas::parse_config(text);
        config.mode = app.get_subcommands().front()->get_name();
        if (seed)
            config.seed = *seed;
        if (trials)
            config.trials = *trials;
        if (threads)
            config.threads = *threads;
        if (out_dir)
            config.out_dir = *out_dir;
        if (scenario)
            config.scenario_name = *scenario;
        if (error_free)
            config.error_free = true;
        config.resolve();
    }
    catch (const psolas::Error& e)
    {
        std::cerr << "psolas: configuration error: " << e.what() << '\n';
        return 2;
    }
    return psolas::cli::run(config, std::cerr);
}
