#pragma once

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sspmcts/bench/results.hpp"
#include "sspmcts/bench/runner.hpp"

namespace sspmcts::bench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

namespace detail {

struct CliOptions {
    std::string env;
    std::vector<std::string> planners;
    std::vector<int> sims;
    int episodes = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string summary;
    std::string tau_hist;
    std::string config;
    std::vector<std::string> sets;
    bool wall_time = false;
};

inline void add_common(CLI::App& cmd, CliOptions& o) {
    cmd.add_option("--env", o.env, "Environment: pendulum, cmc or corridor")->required();
    cmd.add_option("--planner", o.planners, "Planner(s): ssp, pw, pw-hoot (comma separated)")
        ->required()
        ->delimiter(',');
    cmd.add_option("--sims-per-step", o.sims, "Simulations per environment step (comma separated)")
        ->required()
        ->delimiter(',');
    cmd.add_option("--episodes", o.episodes, "Episodes per (planner, budget)")->required();
    cmd.add_option("--seed", o.seed, "Seed of episode 0; episode i uses seed + i")->required();
    cmd.add_option("--tau-hist", o.tau_hist, "Write the executed-period histogram CSV here");
    cmd.add_option("--config", o.config, "key=value planner config file");
    cmd.add_option("--set", o.sets, "Override one config key (key=value); repeatable");
    cmd.add_flag("--wall-time", o.wall_time, "Record per-episode wall time (output is then not reproducible)");
}

inline bool write_file(const std::string& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        return false;
    }
    writer(out);
    return static_cast<bool>(out);
}

}  // namespace detail

/**
 * Entry point of the benchmark tool.
 *
 *   run   --env E --planner P --sims-per-step N[,N...] --episodes K --seed S --out rows.csv
 *   sweep --env E --planner P[,P...] --sims-per-step N[,N...] --episodes K --seed S --summary s.csv
 *
 * Exit codes: 0 success, 2 bad arguments, 3 runtime failure.
 */
inline int cli_main(int argc, const char* const* argv, std::ostream& err = std::cerr) {
    CLI::App app{"Benchmark harness for scalable-search-period MCTS"};
    app.require_subcommand(1);
    detail::CliOptions o;

    auto* run = app.add_subcommand("run", "Run seeded episode batches and write one CSV row per episode");
    detail::add_common(*run, o);
    run->add_option("--out", o.out, "Per-episode result CSV")->required();

    auto* sweep = app.add_subcommand("sweep", "Sweep planners x budgets and write per-cell summaries");
    detail::add_common(*sweep, o);
    sweep->add_option("--out", o.out, "Per-episode result CSV");
    sweep->add_option("--summary", o.summary, "Per-(planner, budget) summary CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, std::cout, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, err);
        return kExitUsage;
    }

    RunSpec spec;
    spec.env = o.env;
    spec.sims_per_step = o.sims;
    spec.episodes = o.episodes;
    spec.seed_base = o.seed;
    spec.config_path = o.config;
    spec.record_wall_time = o.wall_time;
    if (!envs::is_known_env(o.env)) {
        err << "error: unknown environment '" << o.env << "'\n";
        return kExitUsage;
    }
    for (const auto& name : o.planners) {
        const auto kind = parse_planner_kind(name);
        if (!kind) {
            err << "error: unknown planner '" << name << "'\n";
            return kExitUsage;
        }
        spec.planners.push_back(*kind);
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            err << "error: --set expects key=value, got '" << s << "'\n";
            return kExitUsage;
        }
        spec.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.episodes < 1) {
        err << "error: --episodes must be >= 1\n";
        return kExitUsage;
    }

    PlannerConfig cfg;
    try {
        cfg = resolve_config(spec);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }

    try {
        const auto rows = run_batch(spec);
        bool ok = true;
        if (!o.out.empty()) {
            ok &= detail::write_file(o.out, [&](std::ostream& out) { write_rows(out, rows); });
        }
        if (!o.summary.empty()) {
            ok &= detail::write_file(o.summary, [&](std::ostream& out) { write_summary(out, summarize(rows)); });
        }
        if (!o.tau_hist.empty()) {
            ok &= detail::write_file(o.tau_hist,
                                     [&](std::ostream& out) { write_tau_histogram(out, rows, cfg.tau_max_steps()); });
        }
        if (!ok) {
            err << "error: failed to write an output file\n";
            return kExitRuntime;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace sspmcts::bench
