#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <random>

#include "sspmcts/core/types.hpp"

namespace sspmcts::envs {

/**
 * Deterministic 1xN corridor: step left, right or stay until the target
 * cell is reached. Each move costs 0.01; landing on the target pays +1 and
 * ends the episode.
 */
class Corridor {
public:
    using State = std::array<double, 1>;

    enum Action : std::size_t { kLeft = 0, kRight = 1, kStay = 2 };

    static constexpr double kStepCost = 0.01;
    static constexpr double kTargetReward = 1.0;

    explicit Corridor(int length = 20, int target = 14, int step_limit = 200)
        : length_(length),
          target_(target),
          spec_{"corridor",
                {{0.0, static_cast<double>(length - 1)}},
                ActionSpace::finite(3),
                1.0,
                step_limit,
                kTargetReward + kStepCost,
                "+1 on reaching the target, -0.01 otherwise"} {
        if (length < 2 || target < 0 || target >= length) {
            throw std::invalid_argument("corridor requires length >= 2 and target inside the corridor");
        }
    }

    [[nodiscard]] const EnvSpec& spec() const { return spec_; }
    [[nodiscard]] int length() const { return length_; }
    [[nodiscard]] int target() const { return target_; }

    [[nodiscard]] StepOutcome<State> step(const State& state, const ControlInput& control) const {
        const auto* action = std::get_if<DiscreteControl>(&control);
        if (action == nullptr || action->index >= 3) {
            throw DomainError("corridor action must be a discrete index in {0,1,2}");
        }
        if (is_terminal(state)) {
            return {state, 0.0, true};
        }
        const int cell = static_cast<int>(state[0]);
        int next = cell;
        if (action->index == kLeft) {
            next = cell - 1;
        } else if (action->index == kRight) {
            next = cell + 1;
        }
        next = std::clamp(next, 0, length_ - 1);
        const bool done = next == target_;
        return {{static_cast<double>(next)}, done ? kTargetReward : -kStepCost, done};
    }

    [[nodiscard]] bool is_terminal(const State& state) const { return static_cast<int>(state[0]) == target_; }

    /// Uniform over every non-target cell.
    [[nodiscard]] State initial_state(Rng& rng) const {
        std::uniform_int_distribution<int> pick(0, length_ - 2);
        int cell = pick(rng);
        if (cell >= target_) {
            ++cell;
        }
        return {static_cast<double>(cell)};
    }

    /// Best achievable discounted return from `cell`: walk straight to the target.
    [[nodiscard]] double optimal_return(int cell, double gamma) const {
        const int distance = std::abs(cell - target_);
        if (distance == 0) {
            return 0.0;
        }
        double ret = 0.0;
        double discount = 1.0;
        for (int k = 0; k + 1 < distance; ++k) {
            ret -= discount * kStepCost;
            discount *= gamma;
        }
        return ret + discount * kTargetReward;
    }

private:
    int length_;
    int target_;
    EnvSpec spec_;
};

}  // namespace sspmcts::envs
