#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sspmcts/core/config.hpp"
#include "sspmcts/core/types.hpp"
#include "sspmcts/hoo.hpp"
#include "sspmcts/search_tree.hpp"

namespace sspmcts {

/**
 * Ssp samples (control, period) pairs; Pw samples controls uniformly and
 * holds them one step; PwHoot samples controls with HOO and holds them one
 * step.
 */
enum class PlannerKind { Ssp, Pw, PwHoot };

inline std::string_view to_string(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::Ssp: return "ssp";
        case PlannerKind::Pw: return "pw";
        case PlannerKind::PwHoot: return "pw-hoot";
    }
    return "?";
}

inline std::optional<PlannerKind> parse_planner_kind(std::string_view name) {
    if (name == "ssp") return PlannerKind::Ssp;
    if (name == "pw") return PlannerKind::Pw;
    if (name == "pw-hoot") return PlannerKind::PwHoot;
    return std::nullopt;
}

class PlannerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SearchBudget {
    std::uint64_t total_simulations = 0;
    std::uint64_t consumed = 0;

    [[nodiscard]] std::uint64_t remaining() const { return total_simulations - consumed; }
};

/// A decision returned by a search, with a flag for the zero-budget fallback.
struct SearchResult {
    Decision decision;
    bool fallback = false;
};

/**
 * Proposes new outgoing decisions for a search node.
 *
 * Continuous spaces use one HOO tree per node (over control and period, or
 * control alone when the period is fixed). Discrete spaces pick the action
 * round-robin for the first |A| expansions and by UCB1 over per-action
 * aggregates afterwards; the period then comes from that action's 1-D HOO
 * tree.
 */
class DecisionSampler {
public:
    struct Proposal {
        Decision decision;
        HooBinding binding;
    };

    DecisionSampler(const EnvSpec& spec, const PlannerConfig& cfg, PlannerKind kind)
        : spec_(&spec), cfg_(&cfg), kind_(kind), period_axis_(kind == PlannerKind::Ssp && !cfg.fixed_period()),
          fixed_period_(kind == PlannerKind::Ssp ? SimPeriod::quantize(cfg.tau_min, cfg.tau_max_steps())
                                                 : SimPeriod::single_step()) {}

    [[nodiscard]] bool period_axis() const { return period_axis_; }
    [[nodiscard]] bool uses_hoo() const {
        if (kind_ == PlannerKind::Pw) {
            return false;
        }
        return !spec_->actions.discrete || period_axis_;
    }

    template <class State>
    std::optional<Proposal> propose(SearchNode<State>& node, Rng& rng) const {
        const ActionSpace& actions = spec_->actions;
        if (kind_ == PlannerKind::Pw) {
            return Proposal{{random_control(actions, rng), SimPeriod::single_step()}, {}};
        }
        if (node.hoo_trees.empty() && uses_hoo()) {
            init_trees(node);
        }
        if (!actions.discrete) {
            const hoo::HooSample s = node.hoo_trees.front().query(rng);
            const SimPeriod period =
                period_axis_ ? SimPeriod::quantize(s.point[1], cfg_->tau_max_steps()) : fixed_period_;
            return Proposal{{ContinuousControl{s.point[0]}, period}, {0, s.leaf}};
        }
        const auto action = pick_action(node);
        if (!action) {
            return std::nullopt;
        }
        if (!period_axis_) {
            return Proposal{{DiscreteControl{*action}, fixed_period_}, {}};
        }
        const hoo::HooSample s = node.hoo_trees[*action].query(rng);
        return Proposal{{DiscreteControl{*action}, SimPeriod::quantize(s.point[0], cfg_->tau_max_steps())},
                        {*action, s.leaf}};
    }

    /// Pushes the child's live edge statistics into the parent's HOO tree.
    template <class State>
    static void record(SearchNode<State>& parent, const SearchNode<State>& child) {
        if (!child.binding.bound() || parent.hoo_trees.empty()) {
            return;
        }
        parent.hoo_trees[child.binding.tree].record(child.binding.node, child.edge_mean(), child.visits);
    }

private:
    template <class State>
    void init_trees(SearchNode<State>& node) const {
        const hoo::HooParams params{cfg_->hoo_v1, cfg_->hoo_rho, cfg_->hoo_weighted_aggregation};
        const Interval period{cfg_->tau_min, cfg_->tau_max};
        if (!spec_->actions.discrete) {
            hoo::Region region;
            region.axes[0] = spec_->actions.bounds;
            region.dims = 1;
            if (period_axis_) {
                region.axes[1] = period;
                region.dims = 2;
            }
            node.hoo_trees.emplace_back(region, params);
            return;
        }
        hoo::Region region;
        region.axes[0] = period;
        region.dims = 1;
        node.hoo_trees.assign(spec_->actions.count, hoo::HooTree(region, params));
    }

    template <class State>
    std::optional<std::size_t> pick_action(SearchNode<State>& node) const {
        const std::size_t count = spec_->actions.count;
        std::vector<std::uint64_t> visits(count, 0);
        std::vector<double> mass(count, 0.0);
        std::vector<bool> present(count, false);
        for (const auto& child : node.children) {
            const std::size_t a = std::get<DiscreteControl>(child->decision.control).index;
            present[a] = true;
            visits[a] += child->visits;
            mass[a] += static_cast<double>(child->visits) * child->edge_mean();
        }
        const auto available = [&](std::size_t a) { return period_axis_ || !present[a]; };

        if (node.expansions < count) {
            for (std::size_t k = 0; k < count; ++k) {
                const std::size_t a = (node.expansions + k) % count;
                if (available(a)) {
                    ++node.expansions;
                    return a;
                }
            }
            return std::nullopt;
        }
        std::optional<std::size_t> best;
        double best_score = -hoo::kInfinity;
        for (std::size_t a = 0; a < count; ++a) {
            if (!available(a)) {
                continue;
            }
            const double mean = visits[a] > 0 ? mass[a] / static_cast<double>(visits[a]) : 0.0;
            const double score = ucb1_score(mean, visits[a], node.visits, cfg_->exploration_c);
            if (!best || score > best_score) {
                best = a;
                best_score = score;
            }
        }
        if (best) {
            ++node.expansions;
        }
        return best;
    }

    const EnvSpec* spec_;
    const PlannerConfig* cfg_;
    PlannerKind kind_;
    bool period_axis_;
    /// Period used when there is no period axis.
    SimPeriod fixed_period_;
};

/// Applies `control` for `steps` steps; zero steps is the identity.
template <Environment Env>
typename Env::State project_state(const Env& model, typename Env::State state, const ControlInput& control,
                                  int steps) {
    for (int k = 0; k < steps; ++k) {
        const auto outcome = env_step(model, state, control);
        state = outcome.next_state;
        if (outcome.terminal) {
            break;
        }
    }
    return state;
}

/**
 * One resumable search from a fixed root state. Simulations can be added in
 * slices with run(); decide() returns the most-visited root child.
 */
template <Environment Env>
class Search {
public:
    using State = typename Env::State;
    using Node = SearchNode<State>;

    Search(const Env& model, const PlannerConfig& cfg, PlannerKind kind, RandomStreams& streams,
           const State& root_state)
        : model_(&model), cfg_(&cfg), streams_(&streams), sampler_(model.spec(), cfg, kind),
          root_(std::make_unique<Node>()) {
        root_->expected_state = root_state;
        root_->edge_evaluated = true;
        root_->terminal = model.is_terminal(root_state);
    }

    void run(std::uint64_t simulations) {
        for (std::uint64_t i = 0; i < simulations; ++i) {
            simulate();
        }
    }

    [[nodiscard]] const Node& root() const { return *root_; }
    [[nodiscard]] std::uint64_t simulations() const { return simulations_; }
    [[nodiscard]] std::uint64_t pruned_edges() const { return pruned_; }
    [[nodiscard]] const State& root_state() const { return root_->expected_state; }

    /// Most visits, then higher mean, then earlier insertion.
    [[nodiscard]] SearchResult decide() {
        const Node* best = nullptr;
        for (const auto& child : root_->children) {
            if (best == nullptr || child->visits > best->visits ||
                (child->visits == best->visits && child->edge_mean() > best->edge_mean())) {
                best = child.get();
            }
        }
        if (best != nullptr) {
            return {best->decision, false};
        }
        return {{random_control(model_->spec().actions, streams_->sampling), SimPeriod::single_step()}, true};
    }

private:
    void simulate() {
        ++simulations_;
        std::vector<Node*> path{root_.get()};
        Node* node = root_.get();
        double leaf_return = 0.0;
        while (true) {
            if (node->terminal) {
                break;
            }
            maybe_prune(*node);
            if (node->children.size() < pw_allowance(node->visits, cfg_->pw_coeff, cfg_->pw_alpha)) {
                if (Node* child = try_expand(*node)) {
                    evaluate_edge(*node, *child);
                    path.push_back(child);
                    if (!child->terminal) {
                        leaf_return = rollout(*model_, child->expected_state, cfg_->rollout_depth_steps, cfg_->gamma,
                                              streams_->rollout);
                    }
                    break;
                }
            }
            if (node->children.empty()) {
                leaf_return = rollout(*model_, node->expected_state, cfg_->rollout_depth_steps, cfg_->gamma,
                                      streams_->rollout);
                break;
            }
            node = node->children[select_child(*node, cfg_->exploration_c)].get();
            path.push_back(node);
        }
        backpropagate<State>(std::span<Node* const>(path), leaf_return,
                             [](Node& parent, Node& child) { DecisionSampler::record(parent, child); });
    }

    void maybe_prune(Node& node) {
        if (node.visits == 0 || node.visits % static_cast<std::uint64_t>(cfg_->prune_interval) != 0) {
            return;
        }
        if (node.children.size() < pw_allowance(node.visits, cfg_->pw_coeff, cfg_->pw_alpha)) {
            return;
        }
        pruned_ += static_cast<std::uint64_t>(prune(node, *cfg_));
    }

    Node* try_expand(Node& node) {
        for (int attempt = 0; attempt < cfg_->max_collision_retries; ++attempt) {
            const auto proposal = sampler_.propose(node, streams_->sampling);
            if (!proposal) {
                return nullptr;
            }
            if (Node* child = expand(node, proposal->decision, proposal->binding, *cfg_)) {
                return child;
            }
        }
        return nullptr;
    }

    void evaluate_edge(const Node& parent, Node& child) {
        const auto result = multi_step_return(*model_, parent.expected_state, child.decision.control,
                                              child.decision.period.steps, cfg_->gamma);
        child.expected_state = result.final_state;
        child.edge_reward = result.discounted_return;
        child.edge_discount = result.discount;
        child.edge_steps = result.steps_executed;
        child.terminal = result.terminal;
        child.edge_evaluated = true;
    }

    const Env* model_;
    const PlannerConfig* cfg_;
    RandomStreams* streams_;
    DecisionSampler sampler_;
    std::unique_ptr<Node> root_;
    std::uint64_t simulations_ = 0;
    std::uint64_t pruned_ = 0;
};

/// Runs a fresh search with `budget` simulations from `root_state`.
template <Environment Env>
SearchResult search(const typename Env::State& root_state, const Env& model, const PlannerConfig& cfg,
                    PlannerKind kind, RandomStreams& streams, SearchBudget& budget) {
    Search<Env> tree(model, cfg, kind, streams, root_state);
    tree.run(budget.remaining());
    budget.consumed = budget.total_simulations;
    return tree.decide();
}

template <class State>
struct DecisionRecord {
    State state{};
    Decision decision;
    std::uint64_t budget = 0;
    std::vector<double> rewards;
    bool fallback = false;
};

template <class State>
struct EpisodeTrace {
    std::vector<DecisionRecord<State>> decisions;
    double accumulated_reward = 0.0;
    int steps = 0;
    std::uint64_t seed = 0;
    int drift_restarts = 0;
    double max_drift = 0.0;
    bool terminal = false;
};

/**
 * Plays one episode on `env`, planning against `model`.
 *
 * While decision i is held for its period, the search for decision i+1 runs
 * from the state projected at the end of the hold, with a budget of
 * sims_per_step simulations per held step split evenly across the hold.
 * After every real step the projection is recomputed from the observed
 * state; if it moved by more than drift_tolerance the tree is discarded and
 * the search restarts with whatever budget is left.
 */
template <Environment Env>
EpisodeTrace<typename Env::State> run_episode(const Env& env, const Env& model, const PlannerConfig& cfg,
                                              PlannerKind kind) {
    using State = typename Env::State;
    cfg.validate();
    RandomStreams streams(cfg.seed);
    EpisodeTrace<State> trace;
    trace.seed = cfg.seed;

    const int step_limit = env.spec().step_limit;
    const auto per_step = static_cast<std::uint64_t>(cfg.sims_per_step);

    State state = env.initial_state(streams.init);
    SearchBudget first{per_step, 0};
    SearchResult current = search(state, model, cfg, kind, streams, first);
    std::uint64_t current_budget = first.consumed;
    int drifting_steps = 0;

    while (trace.steps < step_limit) {
        const ControlInput control = current.decision.control;
        const int hold = std::min(current.decision.period.steps, step_limit - trace.steps);
        const bool plan_next = trace.steps + hold < step_limit;

        DecisionRecord<State> record{state, current.decision, current_budget, {}, current.fallback};

        SearchBudget budget{per_step * static_cast<std::uint64_t>(current.decision.period.steps), 0};
        State projected = project_state(model, state, control, hold);
        std::optional<Search<Env>> next;
        if (plan_next) {
            next.emplace(model, cfg, kind, streams, projected);
        }

        bool terminal = false;
        for (int j = 0; j < hold; ++j) {
            const auto outcome = env_step(env, state, control);
            state = outcome.next_state;
            record.rewards.push_back(outcome.reward);
            trace.accumulated_reward += outcome.reward;
            ++trace.steps;
            if (outcome.terminal) {
                terminal = true;
                break;
            }
            if (!next) {
                continue;
            }

            const State reprojected = project_state(model, state, control, hold - j - 1);
            const double drift = state_distance(reprojected, projected);
            trace.max_drift = std::max(trace.max_drift, drift);
            if (drift > cfg.drift_tolerance) {
                ++trace.drift_restarts;
                if (++drifting_steps >= cfg.mismatch_abort_steps) {
                    throw PlannerError("model and environment disagree on every step (drift " +
                                       std::to_string(drift) + " > tolerance " +
                                       std::to_string(cfg.drift_tolerance) + " for " +
                                       std::to_string(drifting_steps) + " consecutive steps)");
                }
                projected = reprojected;
                next.emplace(model, cfg, kind, streams, projected);
            } else {
                drifting_steps = 0;
            }

            const std::uint64_t share = budget.total_simulations * static_cast<std::uint64_t>(j + 1) /
                                            static_cast<std::uint64_t>(hold) -
                                        budget.consumed;
            next->run(share);
            budget.consumed += share;
        }
        trace.decisions.push_back(std::move(record));
        if (terminal) {
            trace.terminal = true;
            break;
        }
        if (!next) {
            break;
        }
        // A hold cut short by the step limit never reaches this point.
        next->run(budget.remaining());
        budget.consumed = budget.total_simulations;
        current = next->decide();
        current_budget = budget.consumed;
    }
    return trace;
}

}  // namespace sspmcts
