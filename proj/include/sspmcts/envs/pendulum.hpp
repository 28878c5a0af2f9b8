#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sspmcts/core/types.hpp"

namespace sspmcts::envs {

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double theta) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(theta + std::numbers::pi, two_pi);
    if (wrapped < 0.0) {
        wrapped += two_pi;
    }
    wrapped -= std::numbers::pi;
    return wrapped == -std::numbers::pi ? std::numbers::pi : wrapped;
}

/**
 * Frictionless inverted pendulum with the classic-control constants.
 * State is (theta, theta_dot); theta = 0 is upright.
 */
class Pendulum {
public:
    using State = std::array<double, 2>;

    struct Params {
        double gravity = 10.0;
        double mass = 1.0;
        double length = 1.0;
        double dt = 0.05;
        double max_speed = 8.0;
        double max_torque = 2.0;
        int step_limit = 200;
    };

    Pendulum() : Pendulum(Params{}) {}

    explicit Pendulum(Params params) : params_(params) {
        const double max_cost =
            std::numbers::pi * std::numbers::pi + 0.1 * params_.max_speed * params_.max_speed +
            0.001 * params_.max_torque * params_.max_torque;
        spec_ = EnvSpec{"pendulum",
                        {{-std::numbers::pi, std::numbers::pi}, {-params_.max_speed, params_.max_speed}},
                        ActionSpace::continuous(-params_.max_torque, params_.max_torque),
                        params_.dt,
                        params_.step_limit,
                        max_cost,
                        "-(wrap(theta)^2 + 0.1*theta_dot^2 + 0.001*u^2) per step"};
    }

    [[nodiscard]] const EnvSpec& spec() const { return spec_; }
    [[nodiscard]] const Params& params() const { return params_; }

    [[nodiscard]] StepOutcome<State> step(const State& state, const ControlInput& control) const {
        const double u = std::clamp(std::get<ContinuousControl>(control).value, -params_.max_torque,
                                    params_.max_torque);
        const auto& [theta, theta_dot] = state;
        const double g = params_.gravity;
        const double m = params_.mass;
        const double l = params_.length;

        const double angle = wrap_angle(theta);
        const double cost = angle * angle + 0.1 * theta_dot * theta_dot + 0.001 * u * u;

        double next_dot = theta_dot + (-3.0 * g / (2.0 * l) * std::sin(theta + std::numbers::pi) +
                                       3.0 / (m * l * l) * u) *
                                          params_.dt;
        next_dot = std::clamp(next_dot, -params_.max_speed, params_.max_speed);
        const double next_theta = wrap_angle(theta + next_dot * params_.dt);
        return {{next_theta, next_dot}, -cost, false};
    }

    [[nodiscard]] bool is_terminal(const State&) const { return false; }

    [[nodiscard]] State initial_state(Rng& rng) const {
        std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
        std::uniform_real_distribution<double> speed(-1.0, 1.0);
        const double theta = angle(rng);
        return {theta, speed(rng)};
    }

private:
    Params params_;
    EnvSpec spec_;
};

}  // namespace sspmcts::envs
