#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sspmcts/bench/results.hpp"
#include "sspmcts/core/config.hpp"
#include "sspmcts/envs/registry.hpp"
#include "sspmcts/planner.hpp"

namespace sspmcts::bench {

struct RunSpec {
    std::string env;
    std::vector<PlannerKind> planners;
    std::vector<int> sims_per_step;
    int episodes = 1;
    std::uint64_t seed_base = 0;
    /// Optional config file, applied on top of the environment defaults.
    std::string config_path;
    /// `key=value` overrides applied last.
    std::vector<std::pair<std::string, std::string>> overrides;
    bool record_wall_time = false;
    /// Worker threads; 0 means SSPMCTS_WORKERS or the hardware count.
    unsigned workers = 0;
};

/// Environment defaults, then the config file, then explicit overrides.
inline PlannerConfig resolve_config(const RunSpec& spec) {
    PlannerConfig cfg = envs::default_config(spec.env);
    if (!spec.config_path.empty()) {
        apply_config_file(cfg, spec.config_path);
    }
    for (const auto& [key, value] : spec.overrides) {
        apply_setting(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

inline unsigned worker_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("SSPMCTS_WORKERS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) {
            return static_cast<unsigned>(n);
        }
        throw std::invalid_argument("SSPMCTS_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

template <Environment Env>
ResultRow run_one(const Env& env, const PlannerConfig& cfg, PlannerKind kind, int episode, bool wall_time) {
    const auto start = std::chrono::steady_clock::now();
    const auto trace = run_episode(env, env, cfg, kind);
    const auto stop = std::chrono::steady_clock::now();

    ResultRow row;
    row.env = env.spec().name;
    row.planner = std::string(to_string(kind));
    row.sims_per_step = cfg.sims_per_step;
    row.episode = episode;
    row.seed = cfg.seed;
    row.accumulated_reward = trace.accumulated_reward;
    row.steps = trace.steps;
    row.decisions = static_cast<int>(trace.decisions.size());
    for (const auto& d : trace.decisions) {
        row.taus.push_back(d.decision.period.steps);
    }
    row.mean_tau = row.taus.empty()
                       ? 0.0
                       : std::accumulate(row.taus.begin(), row.taus.end(), 0.0) / static_cast<double>(row.taus.size());
    if (wall_time) {
        row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    return row;
}

/**
 * Runs every (planner, budget, episode) cell. Episode i always uses seed
 * seed_base + i, so rows do not depend on scheduling; they are returned in
 * (planner, budget, episode) order.
 */
inline std::vector<ResultRow> run_batch(const RunSpec& spec) {
    if (spec.episodes < 1) {
        throw std::invalid_argument("episodes must be >= 1");
    }
    if (spec.planners.empty() || spec.sims_per_step.empty()) {
        throw std::invalid_argument("at least one planner and one sims-per-step value are required");
    }
    for (const int s : spec.sims_per_step) {
        if (s < 1) {
            throw std::invalid_argument("sims-per-step values must be >= 1");
        }
    }
    const PlannerConfig base = resolve_config(spec);
    const envs::AnyEnv env = envs::make_env(spec.env);

    struct Job {
        PlannerKind kind;
        int sims;
        int episode;
    };
    std::vector<Job> jobs;
    for (const auto kind : spec.planners) {
        for (const int sims : spec.sims_per_step) {
            for (int e = 0; e < spec.episodes; ++e) {
                jobs.push_back({kind, sims, e});
            }
        }
    }

    std::vector<ResultRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) {
                return;
            }
            try {
                PlannerConfig cfg = base;
                cfg.sims_per_step = jobs[i].sims;
                cfg.seed = spec.seed_base + static_cast<std::uint64_t>(jobs[i].episode);
                rows[i] = std::visit(
                    [&](const auto& e) { return run_one(e, cfg, jobs[i].kind, jobs[i].episode, spec.record_wall_time); },
                    env);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(jobs.size());
            }
        }
    };

    const unsigned n_workers = std::min<unsigned>(worker_count(spec.workers), static_cast<unsigned>(jobs.size()));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::sort(rows.begin(), rows.end(), row_order);
    return rows;
}

}  // namespace sspmcts::bench
