#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sspmcts/core/config.hpp"
#include "sspmcts/core/types.hpp"
#include "sspmcts/hoo.hpp"

namespace sspmcts {

/// UCB1 with natural log; unvisited children score +inf.
inline double ucb1_score(double child_mean, std::uint64_t child_visits, std::uint64_t parent_visits, double c) {
    if (child_visits == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const double n = static_cast<double>(std::max<std::uint64_t>(parent_visits, 1));
    return child_mean + c * std::sqrt(2.0 * std::log(n) / static_cast<double>(child_visits));
}

/// Progressive-widening cap: max(1, ceil(coeff * visits^alpha)).
inline std::size_t pw_allowance(std::uint64_t visits, double coeff, double alpha) {
    const double cap = std::ceil(coeff * std::pow(static_cast<double>(visits), alpha));
    return cap < 1.0 ? 1 : static_cast<std::size_t>(cap);
}

/// Where a search edge's sample came from in its parent's HOO trees.
struct HooBinding {
    std::size_t tree = hoo::kNoNode;
    std::size_t node = hoo::kNoNode;

    [[nodiscard]] bool bound() const { return tree != hoo::kNoNode; }
};

/**
 * A search node together with the edge that leads into it.
 *
 * value_mean is the mean return observed from this node's state onward;
 * edge_mean() adds the deterministic reward collected while holding the
 * edge's decision, which is what the parent compares children by.
 */
template <class State>
struct SearchNode {
    double value_mean = 0.0;
    std::uint64_t visits = 0;

    Decision decision{ContinuousControl{}, SimPeriod::single_step()};
    double edge_reward = 0.0;
    double edge_discount = 1.0;
    int edge_steps = 0;
    bool edge_evaluated = false;
    bool terminal = false;
    State expected_state{};

    HooBinding binding;
    std::uint64_t insertion = 0;

    /// Samplers for this node's own outgoing edges, created on first expansion.
    std::vector<hoo::HooTree> hoo_trees;
    std::uint64_t expansions = 0;
    std::uint64_t next_insertion = 0;
    std::vector<std::unique_ptr<SearchNode>> children;

    [[nodiscard]] double edge_mean() const { return edge_reward + edge_discount * value_mean; }

    [[nodiscard]] bool has_child(const Decision& d) const {
        for (const auto& child : children) {
            if (child->decision == d) {
                return true;
            }
        }
        return false;
    }

    void record_return(double ret) {
        ++visits;
        value_mean += (ret - value_mean) / static_cast<double>(visits);
    }
};

/// Index of the child maximizing UCB1; ties keep the earliest child.
template <class State>
std::size_t select_child(const SearchNode<State>& node, double c) {
    if (node.children.empty()) {
        throw std::logic_error("select_child called on a node without children");
    }
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& child = *node.children[i];
        const double score = ucb1_score(child.edge_mean(), child.visits, node.visits, c);
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

/**
 * Attaches a fresh child for `sampled`. Returns nullptr when the decision
 * already labels a child (periods collide after quantization); the caller
 * re-samples.
 */
template <class State>
SearchNode<State>* expand(SearchNode<State>& node, const Decision& sampled, HooBinding binding,
                          const PlannerConfig& cfg) {
    if (node.children.size() >= pw_allowance(node.visits, cfg.pw_coeff, cfg.pw_alpha)) {
        throw std::logic_error("expand called on a node at its widening allowance");
    }
    if (node.has_child(sampled)) {
        return nullptr;
    }
    auto child = std::make_unique<SearchNode<State>>();
    child->decision = sampled;
    child->binding = binding;
    child->insertion = node.next_insertion++;
    node.children.push_back(std::move(child));
    return node.children.back().get();
}

/**
 * Removes the lowest-mean child among those with at least prune_min_visits
 * visits (ties: fewer visits, then earlier insertion). Ancestor statistics
 * are left untouched. Returns the number of removed edges.
 */
template <class State>
int prune(SearchNode<State>& node, const PlannerConfig& cfg) {
    std::size_t victim = node.children.size();
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        const auto& child = *node.children[i];
        if (child.visits < static_cast<std::uint64_t>(cfg.prune_min_visits)) {
            continue;
        }
        if (victim == node.children.size()) {
            victim = i;
            continue;
        }
        const auto& worst = *node.children[victim];
        const double mean = child.edge_mean();
        const double worst_mean = worst.edge_mean();
        if (mean < worst_mean || (mean == worst_mean && child.visits < worst.visits)) {
            victim = i;
        }
    }
    if (victim == node.children.size()) {
        return 0;
    }
    node.children.erase(node.children.begin() + static_cast<std::ptrdiff_t>(victim));
    return 1;
}

/**
 * Pushes a leaf return up a root-to-leaf path. Each parent receives its
 * child's edge reward plus the child's return discounted by the edge length.
 * `on_edge(parent, child)` fires after every child update so that bound
 * samplers can be refreshed.
 */
template <class State, class OnEdge>
void backpropagate(std::span<SearchNode<State>* const> path, double outcome, OnEdge&& on_edge) {
    double ret = outcome;
    for (std::size_t i = path.size(); i-- > 0;) {
        SearchNode<State>& node = *path[i];
        node.record_return(ret);
        if (i > 0) {
            on_edge(*path[i - 1], node);
            ret = node.edge_reward + node.edge_discount * ret;
        }
    }
}

template <class State>
void backpropagate(std::span<SearchNode<State>* const> path, double outcome) {
    backpropagate(path, outcome, [](SearchNode<State>&, SearchNode<State>&) {});
}

/// Draws a uniformly random single-step control from the action space.
inline ControlInput random_control(const ActionSpace& actions, Rng& rng) {
    if (actions.discrete) {
        std::uniform_int_distribution<std::size_t> pick(0, actions.count - 1);
        return DiscreteControl{pick(rng)};
    }
    std::uniform_real_distribution<double> draw(actions.bounds.lo, actions.bounds.hi);
    return ContinuousControl{draw(rng)};
}

/// Discounted return of uniformly random controls until terminal or depth.
template <Environment Env>
double rollout(const Env& model, typename Env::State state, int depth_steps, double gamma, Rng& rng) {
    double ret = 0.0;
    double discount = 1.0;
    if (model.is_terminal(state)) {
        return 0.0;
    }
    const ActionSpace& actions = model.spec().actions;
    for (int k = 0; k < depth_steps; ++k) {
        const auto outcome = model.step(state, random_control(actions, rng));
        ret += discount * outcome.reward;
        discount *= gamma;
        if (outcome.terminal) {
            break;
        }
        state = outcome.next_state;
    }
    return ret;
}

/// Debug dump: node id, parent id, decision, edge mean, value mean, visits.
template <class State>
void dump_tree(const SearchNode<State>& root, std::ostream& out) {
    out << "id,parent,control,tau_steps,edge_mean,value_mean,visits\n";
    std::size_t next_id = 0;
    struct Frame {
        const SearchNode<State>* node;
        long long parent;
    };
    std::vector<Frame> stack{{&root, -1}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const auto id = static_cast<long long>(next_id++);
        out << id << ',' << f.parent << ',' << to_string(f.node->decision.control) << ','
            << f.node->decision.period.steps << ',' << f.node->edge_mean() << ',' << f.node->value_mean << ','
            << f.node->visits << '\n';
        for (auto it = f.node->children.rbegin(); it != f.node->children.rend(); ++it) {
            stack.push_back({it->get(), id});
        }
    }
}

}  // namespace sspmcts
