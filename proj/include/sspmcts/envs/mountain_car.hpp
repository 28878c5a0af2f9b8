#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "sspmcts/core/types.hpp"

namespace sspmcts::envs {

/// Continuous-force mountain car. State is (position, velocity).
class MountainCar {
public:
    using State = std::array<double, 2>;

    static constexpr double kMinPosition = -1.2;
    static constexpr double kMaxPosition = 0.6;
    static constexpr double kMaxSpeed = 0.07;
    static constexpr double kGoalPosition = 0.45;
    static constexpr double kPower = 0.0015;
    static constexpr double kGoalReward = 100.0;

    MountainCar()
        : spec_{"cmc",
                {{kMinPosition, kMaxPosition}, {-kMaxSpeed, kMaxSpeed}},
                ActionSpace::continuous(-1.0, 1.0),
                1.0,
                999,
                kGoalReward + 0.1,
                "-0.1*f^2 per step, +100 on reaching position >= 0.45"} {}

    [[nodiscard]] const EnvSpec& spec() const { return spec_; }

    [[nodiscard]] StepOutcome<State> step(const State& state, const ControlInput& control) const {
        // Goal states absorb.
        if (is_terminal(state)) {
            return {state, 0.0, true};
        }
        const double force = std::clamp(std::get<ContinuousControl>(control).value, -1.0, 1.0);
        const auto& [x, v] = state;

        double next_v = std::clamp(v + force * kPower - 0.0025 * std::cos(3.0 * x), -kMaxSpeed, kMaxSpeed);
        const double next_x = std::clamp(x + next_v, kMinPosition, kMaxPosition);
        if (next_x == kMinPosition && next_v < 0.0) {
            next_v = 0.0;
        }
        const bool done = next_x >= kGoalPosition;
        const double reward = -0.1 * force * force + (done ? kGoalReward : 0.0);
        return {{next_x, next_v}, reward, done};
    }

    [[nodiscard]] bool is_terminal(const State& state) const { return state[0] >= kGoalPosition; }

    [[nodiscard]] State initial_state(Rng& rng) const {
        std::uniform_real_distribution<double> position(-0.6, -0.4);
        return {position(rng), 0.0};
    }

private:
    EnvSpec spec_;
};

}  // namespace sspmcts::envs
