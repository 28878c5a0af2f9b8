#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "sspmcts/core/config.hpp"
#include "sspmcts/envs/corridor.hpp"
#include "sspmcts/envs/mountain_car.hpp"
#include "sspmcts/envs/pendulum.hpp"

namespace sspmcts::envs {

using AnyEnv = std::variant<Pendulum, MountainCar, Corridor>;

inline constexpr std::array<std::string_view, 3> kEnvNames{"pendulum", "cmc", "corridor"};

inline bool is_known_env(std::string_view name) {
    return std::find(kEnvNames.begin(), kEnvNames.end(), name) != kEnvNames.end();
}

inline AnyEnv make_env(std::string_view name) {
    if (name == "pendulum") return Pendulum{};
    if (name == "cmc") return MountainCar{};
    if (name == "corridor") return Corridor{};
    throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
}

/// Tuned planner defaults per environment; mirrored by the files in configs/.
inline PlannerConfig default_config(std::string_view name) {
    PlannerConfig cfg;
    if (name == "pendulum") {
        cfg.exploration_c = 40.0;
        cfg.hoo_v1 = 16.2736;
        cfg.rollout_depth_steps = 30;
        cfg.tau_min = 0.5;
        cfg.tau_max = 5.5;
    } else if (name == "cmc") {
        cfg.exploration_c = 20.0;
        cfg.hoo_v1 = 100.1;
        cfg.rollout_depth_steps = 100;
        cfg.tau_min = 0.5;
        cfg.tau_max = 20.5;
    } else if (name == "corridor") {
        cfg.exploration_c = 1.5;
        cfg.hoo_v1 = 1.01;
        cfg.rollout_depth_steps = 60;
        cfg.tau_min = 0.5;
        cfg.tau_max = 5.5;
    } else {
        throw std::invalid_argument("unknown environment '" + std::string(name) + "'");
    }
    return cfg;
}

}  // namespace sspmcts::envs
