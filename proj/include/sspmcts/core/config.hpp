#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include "sspmcts/core/types.hpp"

namespace sspmcts {

/// Every tunable of the planner. Defaults match the corridor environment;
/// use envs::default_config() for per-environment values.
struct PlannerConfig {
    double exploration_c = 1.0;
    double hoo_v1 = 1.0;
    double hoo_rho = 0.5;
    /// Visit-weighted HOO aggregation instead of the unweighted form.
    bool hoo_weighted_aggregation = false;
    double pw_coeff = 1.0;
    double pw_alpha = 0.5;
    double gamma = 0.99;
    int rollout_depth_steps = 50;
    int sims_per_step = 10;
    double tau_min = 0.5;
    double tau_max = 10.5;
    int prune_interval = 20;
    int prune_min_visits = 3;
    double drift_tolerance = 1e-9;
    std::uint64_t seed = 0;
    int max_collision_retries = 8;
    /// Consecutive drifting real steps tolerated before an episode aborts.
    int mismatch_abort_steps = 50;

    /// Largest executable period in environment steps.
    [[nodiscard]] int tau_max_steps() const { return std::max(1, static_cast<int>(std::floor(tau_max))); }

    /// True when every sampled period quantizes to a single step.
    [[nodiscard]] bool fixed_period() const { return tau_min >= tau_max || tau_max_steps() == 1; }

    void validate() const {
        auto require = [](bool ok, const char* what) {
            if (!ok) {
                throw std::invalid_argument(std::string("invalid planner config: ") + what);
            }
        };
        require(exploration_c > 0.0, "exploration_c must be > 0");
        require(hoo_v1 > 0.0, "hoo_v1 must be > 0");
        require(hoo_rho > 0.0 && hoo_rho < 1.0, "hoo_rho must be in (0,1)");
        require(pw_coeff > 0.0, "pw_coeff must be > 0");
        require(pw_alpha > 0.0 && pw_alpha <= 1.0, "pw_alpha must be in (0,1]");
        require(gamma > 0.0 && gamma <= 1.0, "gamma must be in (0,1]");
        require(rollout_depth_steps >= 1, "rollout_depth_steps must be >= 1");
        require(sims_per_step >= 1, "sims_per_step must be >= 1");
        require(tau_min > 0.0 && tau_min <= tau_max, "tau bounds must satisfy 0 < tau_min <= tau_max");
        require(prune_interval >= 1, "prune_interval must be >= 1");
        require(prune_min_visits >= 1, "prune_min_visits must be >= 1");
        require(drift_tolerance >= 0.0, "drift_tolerance must be >= 0");
        require(max_collision_retries >= 1, "max_collision_retries must be >= 1");
        require(mismatch_abort_steps >= 1, "mismatch_abort_steps must be >= 1");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_value(std::string_view key, std::string_view text) {
    T value{};
    std::istringstream in{std::string(text)};
    in.imbue(std::locale::classic());
    if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1") {
            return true;
        }
        if (text == "false" || text == "0") {
            return false;
        }
        throw std::invalid_argument("config key '" + std::string(key) + "' expects true/false, got '" +
                                    std::string(text) + "'");
    } else {
        in >> value;
        if (!in || !in.eof()) {
            throw std::invalid_argument("config key '" + std::string(key) + "' has malformed value '" +
                                        std::string(text) + "'");
        }
    }
    return value;
}

}  // namespace detail

/// Assigns one `key=value` pair. Unknown keys are an error.
inline void apply_setting(PlannerConfig& cfg, std::string_view key, std::string_view value) {
    using detail::parse_value;
    if (key == "exploration_c") cfg.exploration_c = parse_value<double>(key, value);
    else if (key == "hoo_v1") cfg.hoo_v1 = parse_value<double>(key, value);
    else if (key == "hoo_rho") cfg.hoo_rho = parse_value<double>(key, value);
    else if (key == "hoo_weighted_aggregation") cfg.hoo_weighted_aggregation = parse_value<bool>(key, value);
    else if (key == "pw_coeff") cfg.pw_coeff = parse_value<double>(key, value);
    else if (key == "pw_alpha") cfg.pw_alpha = parse_value<double>(key, value);
    else if (key == "gamma") cfg.gamma = parse_value<double>(key, value);
    else if (key == "rollout_depth_steps") cfg.rollout_depth_steps = parse_value<int>(key, value);
    else if (key == "sims_per_step") cfg.sims_per_step = parse_value<int>(key, value);
    else if (key == "tau_min") cfg.tau_min = parse_value<double>(key, value);
    else if (key == "tau_max") cfg.tau_max = parse_value<double>(key, value);
    else if (key == "prune_interval") cfg.prune_interval = parse_value<int>(key, value);
    else if (key == "prune_min_visits") cfg.prune_min_visits = parse_value<int>(key, value);
    else if (key == "drift_tolerance") cfg.drift_tolerance = parse_value<double>(key, value);
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value);
    else if (key == "max_collision_retries") cfg.max_collision_retries = parse_value<int>(key, value);
    else if (key == "mismatch_abort_steps") cfg.mismatch_abort_steps = parse_value<int>(key, value);
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
inline void apply_config_text(PlannerConfig& cfg, std::istream& in) {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = detail::trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
        }
        apply_setting(cfg, detail::trim(view.substr(0, eq)), detail::trim(view.substr(eq + 1)));
    }
}

inline void apply_config_file(PlannerConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    apply_config_text(cfg, in);
}

/**
 * Independent random streams derived from one episode seed: initial
 * conditions, rollout controls and sampler draws never share a generator.
 */
struct RandomStreams {
    Rng init;
    Rng rollout;
    Rng sampling;

    explicit RandomStreams(std::uint64_t seed)
        : init(derive(seed, 0x1u)), rollout(derive(seed, 0x2u)), sampling(derive(seed, 0x3u)) {}

private:
    static Rng derive(std::uint64_t seed, std::uint32_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
        return Rng(seq);
    }
};

}  // namespace sspmcts
