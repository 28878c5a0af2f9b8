#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace sspmcts::bench {

/// One episode of one (planner, budget) configuration.
struct ResultRow {
    std::string env;
    std::string planner;
    int sims_per_step = 0;
    int episode = 0;
    std::uint64_t seed = 0;
    double accumulated_reward = 0.0;
    int steps = 0;
    int decisions = 0;
    double mean_tau = 0.0;
    double wall_time_ms = 0.0;
    /// Executed period of every decision, in steps. Not part of the CSV row.
    std::vector<int> taus;
};

inline constexpr const char* kRowHeader =
    "env,planner,sims_per_step,episode,seed,accumulated_reward,steps,decisions,mean_tau,wall_time_ms";
inline constexpr const char* kSummaryHeader =
    "env,planner,sims_per_step,episodes,mean_reward,stddev_reward,ci95_low,ci95_high,mean_tau,median_tau";
inline constexpr const char* kTauHistHeader = "env,planner,sims_per_step,bin_lo,bin_hi,tau_steps,count";

/// Shortest round-trip decimal, independent of the global locale.
inline std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline bool row_order(const ResultRow& a, const ResultRow& b) {
    return std::tie(a.planner, a.sims_per_step, a.episode) < std::tie(b.planner, b.sims_per_step, b.episode);
}

inline void write_rows(std::ostream& out, std::vector<ResultRow> rows) {
    std::sort(rows.begin(), rows.end(), row_order);
    out << kRowHeader << '\n';
    for (const auto& r : rows) {
        out << r.env << ',' << r.planner << ',' << r.sims_per_step << ',' << r.episode << ',' << r.seed << ','
            << format_number(r.accumulated_reward) << ',' << r.steps << ',' << r.decisions << ','
            << format_number(r.mean_tau) << ',' << format_number(r.wall_time_ms) << '\n';
    }
}

struct SummaryRow {
    std::string env;
    std::string planner;
    int sims_per_step = 0;
    int episodes = 0;
    double mean_reward = 0.0;
    double stddev_reward = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    double mean_tau = 0.0;
    double median_tau = 0.0;
};

/// Sample quantile by linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        return 0.0;
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

/// Per-(planner, budget) mean with a normal-approximation 95% interval.
inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
    std::map<std::pair<std::string, int>, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) {
        groups[{r.planner, r.sims_per_step}].push_back(&r);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        s.env = members.front()->env;
        s.planner = key.first;
        s.sims_per_step = key.second;
        s.episodes = static_cast<int>(members.size());
        const double n = static_cast<double>(members.size());
        double sum = 0.0;
        double tau_sum = 0.0;
        std::size_t tau_count = 0;
        std::vector<double> taus;
        for (const auto* r : members) {
            sum += r->accumulated_reward;
            for (const int t : r->taus) {
                tau_sum += t;
                ++tau_count;
                taus.push_back(t);
            }
        }
        s.mean_reward = sum / n;
        double sq = 0.0;
        for (const auto* r : members) {
            sq += (r->accumulated_reward - s.mean_reward) * (r->accumulated_reward - s.mean_reward);
        }
        s.stddev_reward = members.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
        const double half = 1.96 * s.stddev_reward / std::sqrt(n);
        s.ci95_low = s.mean_reward - half;
        s.ci95_high = s.mean_reward + half;
        s.mean_tau = tau_count > 0 ? tau_sum / static_cast<double>(tau_count) : 0.0;
        s.median_tau = quantile(std::move(taus), 0.5);
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_summary(std::ostream& out, const std::vector<SummaryRow>& summary) {
    out << kSummaryHeader << '\n';
    for (const auto& s : summary) {
        out << s.env << ',' << s.planner << ',' << s.sims_per_step << ',' << s.episodes << ','
            << format_number(s.mean_reward) << ',' << format_number(s.stddev_reward) << ','
            << format_number(s.ci95_low) << ',' << format_number(s.ci95_high) << ',' << format_number(s.mean_tau)
            << ',' << format_number(s.median_tau) << '\n';
    }
}

/// Counts of executed periods; bin k covers [k, k+1) steps.
inline void write_tau_histogram(std::ostream& out, const std::vector<ResultRow>& rows, int max_steps) {
    std::map<std::pair<std::string, int>, std::vector<std::uint64_t>> counts;
    std::map<std::pair<std::string, int>, std::string> env_of;
    for (const auto& r : rows) {
        auto& bins = counts[{r.planner, r.sims_per_step}];
        env_of[{r.planner, r.sims_per_step}] = r.env;
        bins.resize(static_cast<std::size_t>(max_steps) + 1, 0);
        for (const int t : r.taus) {
            ++bins[static_cast<std::size_t>(std::clamp(t, 1, max_steps))];
        }
    }
    out << kTauHistHeader << '\n';
    for (const auto& [key, bins] : counts) {
        for (int k = 1; k <= max_steps; ++k) {
            out << env_of[key] << ',' << key.first << ',' << key.second << ',' << k << ',' << k + 1 << ',' << k << ','
                << bins[static_cast<std::size_t>(k)] << '\n';
        }
    }
}

}  // namespace sspmcts::bench
