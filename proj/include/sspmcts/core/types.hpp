#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sspmcts {

/// Control magnitude for environments with a continuous action interval.
struct ContinuousControl {
    double value = 0.0;
    friend bool operator==(const ContinuousControl&, const ContinuousControl&) = default;
};

/// Action index for environments with a finite action set.
struct DiscreteControl {
    std::size_t index = 0;
    friend bool operator==(const DiscreteControl&, const DiscreteControl&) = default;
};

using ControlInput = std::variant<ContinuousControl, DiscreteControl>;

/**
 * @brief Period during which a control is held before the next decision.
 *
 * The raw value is what the sampler drew from [tau_min, tau_max]; steps is the
 * number of environment steps actually executed.
 */
struct SimPeriod {
    double raw = 1.0;
    int steps = 1;

    /// Rounds to the nearest step count, clamped to [1, max_steps].
    static SimPeriod quantize(double raw, int max_steps) {
        const double rounded = std::round(raw);
        const int hi = std::max(1, max_steps);
        int steps = 1;
        if (rounded >= static_cast<double>(hi)) {
            steps = hi;
        } else if (rounded > 1.0) {
            steps = static_cast<int>(rounded);
        }
        return {raw, steps};
    }

    static SimPeriod single_step() { return {1.0, 1}; }
};

/// A control paired with how long it is held. Equality ignores the raw period.
struct Decision {
    ControlInput control;
    SimPeriod period;

    friend bool operator==(const Decision& a, const Decision& b) {
        return a.control == b.control && a.period.steps == b.period.steps;
    }
};

inline std::string to_string(const ControlInput& control) {
    if (const auto* c = std::get_if<ContinuousControl>(&control)) {
        return "a=" + std::to_string(c->value);
    }
    return "i=" + std::to_string(std::get<DiscreteControl>(control).index);
}

template <class State>
struct StepOutcome {
    State next_state{};
    double reward = 0.0;
    bool terminal = false;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] double mid() const { return lo + 0.5 * (hi - lo); }
};

/// Either a closed control interval or a finite action count.
struct ActionSpace {
    bool discrete = false;
    Interval bounds{};
    std::size_t count = 0;

    static ActionSpace continuous(double lo, double hi) { return {false, {lo, hi}, 0}; }
    static ActionSpace finite(std::size_t n) { return {true, {}, n}; }

    [[nodiscard]] bool valid(const ControlInput& control) const {
        if (discrete) {
            const auto* d = std::get_if<DiscreteControl>(&control);
            return d != nullptr && d->index < count;
        }
        const auto* c = std::get_if<ContinuousControl>(&control);
        return c != nullptr && std::isfinite(c->value) && bounds.contains(c->value);
    }
};

struct EnvSpec {
    std::string name;
    std::vector<Interval> state_bounds;
    ActionSpace actions;
    double dt = 1.0;
    int step_limit = 1;
    /// Width of the per-step reward range; used to scale the HOO bias term.
    double reward_range = 1.0;
    std::string reward_description;
};

using Rng = std::mt19937_64;

/**
 * A deterministic generative model. States are fixed-size real arrays so
 * drift can be measured as a Euclidean distance.
 */
template <class E>
concept Environment = requires(const E& env, const typename E::State& s, const ControlInput& u, Rng& rng) {
    typename E::State;
    { env.spec() } -> std::convertible_to<const EnvSpec&>;
    { env.step(s, u) } -> std::same_as<StepOutcome<typename E::State>>;
    { env.is_terminal(s) } -> std::same_as<bool>;
    { env.initial_state(rng) } -> std::same_as<typename E::State>;
    { std::size(s) } -> std::convertible_to<std::size_t>;
};

template <class State>
double state_distance(const State& a, const State& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < std::size(a); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

/// Raised when a control does not belong to the environment's action space.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Steps the model after validating the control against its action space.
template <Environment Env>
StepOutcome<typename Env::State> env_step(const Env& model, const typename Env::State& state,
                                          const ControlInput& control) {
    if (!model.spec().actions.valid(control)) {
        throw DomainError("control " + to_string(control) + " is not valid for environment '" +
                          model.spec().name + "'");
    }
    return model.step(state, control);
}

template <class State>
struct MultiStepResult {
    State final_state{};
    double discounted_return = 0.0;
    bool terminal = false;
    int steps_executed = 0;
    /// gamma^steps_executed, the factor applied to whatever follows.
    double discount = 1.0;
};

/// Holds `control` for up to `steps` steps, discounting per environment step.
template <Environment Env>
MultiStepResult<typename Env::State> multi_step_return(const Env& model, const typename Env::State& state,
                                                       const ControlInput& control, int steps, double gamma) {
    if (steps < 1) {
        throw std::invalid_argument("multi_step_return requires steps >= 1");
    }
    MultiStepResult<typename Env::State> result;
    result.final_state = state;
    for (int k = 0; k < steps; ++k) {
        auto outcome = env_step(model, result.final_state, control);
        result.discounted_return += result.discount * outcome.reward;
        result.discount *= gamma;
        result.final_state = outcome.next_state;
        ++result.steps_executed;
        if (outcome.terminal) {
            result.terminal = true;
            break;
        }
    }
    return result;
}

}  // namespace sspmcts
