#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sspmcts/core/types.hpp"

/**
 * @file hoo.hpp
 * @brief Hierarchical optimistic optimization cover trees over one or two
 * axes (control and/or period).
 *
 * Node values are not immediate rewards: each sampled leaf is bound to the
 * search-tree edge created from its sample, and the edge's running mean is
 * aggregated up the cover tree on refresh.
 */

namespace sspmcts::hoo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);

/// Optimistic upper bound of a node; unsampled nodes are +inf.
inline double hoo_u(double r_hat, std::uint64_t visits, std::uint64_t total_n, int depth, double v1, double rho) {
    if (visits == 0) {
        return kInfinity;
    }
    const double n = static_cast<double>(std::max<std::uint64_t>(total_n, 1));
    return r_hat + std::sqrt(2.0 * std::log(n) / static_cast<double>(visits)) + v1 * std::pow(rho, depth);
}

/// B = U for a leaf, otherwise min(U, max child B).
inline double hoo_b(double u, std::span<const double> child_b) {
    if (child_b.empty()) {
        return u;
    }
    return std::min(u, *std::max_element(child_b.begin(), child_b.end()));
}

/// Axis-aligned box with one or two axes. Midpoint splits tile it exactly.
struct Region {
    std::array<Interval, 2> axes{};
    std::size_t dims = 1;

    [[nodiscard]] bool contains(std::span<const double> point) const {
        for (std::size_t k = 0; k < dims; ++k) {
            if (!axes[k].contains(point[k])) {
                return false;
            }
        }
        return true;
    }

    /// Child `mask` takes the upper half of axis k when bit k is set.
    [[nodiscard]] Region split(std::size_t mask) const {
        Region child = *this;
        for (std::size_t k = 0; k < dims; ++k) {
            const double mid = axes[k].mid();
            if ((mask >> k) & 1u) {
                child.axes[k].lo = mid;
            } else {
                child.axes[k].hi = mid;
            }
        }
        return child;
    }
};

struct HooNode {
    double r_hat = 0.0;
    std::uint64_t visits = 0;
    int depth = 0;
    Region region{};
    double u_value = kInfinity;
    double b_value = kInfinity;
    /// Running mean and visit count of the bound search edge.
    double own_mean = 0.0;
    std::uint64_t own_visits = 0;
    std::size_t parent = kNoNode;
    std::vector<std::size_t> children;
    bool stale = false;

    [[nodiscard]] bool is_leaf() const { return children.empty(); }
};

struct HooParams {
    double v1 = 1.0;
    double rho = 0.5;
    bool weighted_aggregation = false;
};

struct HooSample {
    std::array<double, 2> point{};
    std::size_t leaf = kNoNode;
};

class HooTree {
public:
    HooTree(Region root, HooParams params) : params_(params) {
        if (root.dims < 1 || root.dims > 2) {
            throw std::invalid_argument("HOO trees support one or two axes");
        }
        for (std::size_t k = 0; k < root.dims; ++k) {
            if (!(root.axes[k].lo < root.axes[k].hi)) {
                throw std::invalid_argument("HOO region needs lo < hi on every axis");
            }
        }
        HooNode root_node;
        root_node.region = root;
        nodes_.push_back(std::move(root_node));
    }

    [[nodiscard]] const HooNode& node(std::size_t id) const { return nodes_.at(id); }
    [[nodiscard]] const HooNode& root() const { return nodes_.front(); }
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }
    [[nodiscard]] std::size_t dims() const { return nodes_.front().region.dims; }
    [[nodiscard]] const HooParams& params() const { return params_; }
    [[nodiscard]] bool has_stale() const { return any_stale_; }

    /**
     * Refreshes, descends along maximal B (ties broken uniformly at random),
     * samples uniformly inside the reached leaf and splits that leaf at its
     * midpoints. Returns the point and the pre-split leaf id.
     */
    HooSample query(Rng& rng) {
        refresh();
        std::size_t current = 0;
        std::vector<std::size_t> best;
        while (!nodes_[current].is_leaf()) {
            best.clear();
            double best_b = -kInfinity;
            for (const std::size_t child : nodes_[current].children) {
                const double b = nodes_[child].b_value;
                if (b > best_b) {
                    best_b = b;
                    best.assign(1, child);
                } else if (b == best_b) {
                    best.push_back(child);
                }
            }
            if (best.size() == 1) {
                current = best.front();
            } else {
                std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
                current = best[pick(rng)];
            }
        }

        HooSample sample;
        sample.leaf = current;
        const Region region = nodes_[current].region;
        for (std::size_t k = 0; k < region.dims; ++k) {
            std::uniform_real_distribution<double> draw(region.axes[k].lo, region.axes[k].hi);
            sample.point[k] = draw(rng);
        }
        split(current);
        return sample;
    }

    /// Binds a node to the latest statistics of its search edge.
    void record(std::size_t id, double edge_mean, std::uint64_t edge_visits) {
        HooNode& n = nodes_.at(id);
        n.own_mean = edge_mean;
        n.own_visits = edge_visits;
        mark_stale(id);
    }

    /**
     * Bottom-up recomputation of R, U and B. Children always carry larger ids
     * than their parent, so a reverse sweep is a valid post-order.
     */
    void refresh() {
        if (!any_stale_) {
            return;
        }
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            HooNode& n = nodes_[i];
            if (!n.stale) {
                continue;
            }
            std::uint64_t visits = n.own_visits;
            double mass = 0.0;
            if (n.own_visits > 0) {
                mass = params_.weighted_aggregation ? static_cast<double>(n.own_visits) * n.own_mean : n.own_mean;
            }
            for (const std::size_t c : n.children) {
                visits += nodes_[c].visits;
                mass += static_cast<double>(nodes_[c].visits) * nodes_[c].r_hat;
            }
            n.visits = visits;
            n.r_hat = visits > 0 ? mass / static_cast<double>(visits) : 0.0;
            n.stale = false;
        }

        // U depends on the root count, so every node's scores move together.
        const std::uint64_t total_n = nodes_.front().visits;
        std::vector<double> child_b;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            HooNode& n = nodes_[i];
            n.u_value = hoo_u(n.r_hat, n.visits, total_n, n.depth, params_.v1, params_.rho);
            child_b.clear();
            for (const std::size_t c : n.children) {
                child_b.push_back(nodes_[c].b_value);
            }
            n.b_value = n.visits == 0 ? kInfinity : hoo_b(n.u_value, child_b);
        }
        any_stale_ = false;
    }

    /// One line per node: id parent depth region r_hat visits u b.
    void dump(std::ostream& out) const {
        out << "id,parent,depth,a_lo,a_hi,t_lo,t_hi,r_hat,visits,u,b\n";
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const HooNode& n = nodes_[i];
            out << i << ',' << (n.parent == kNoNode ? -1 : static_cast<long long>(n.parent)) << ',' << n.depth;
            for (std::size_t k = 0; k < 2; ++k) {
                if (k < n.region.dims) {
                    out << ',' << n.region.axes[k].lo << ',' << n.region.axes[k].hi;
                } else {
                    out << ",,";
                }
            }
            out << ',' << n.r_hat << ',' << n.visits << ',' << n.u_value << ',' << n.b_value << '\n';
        }
    }

private:
    void split(std::size_t id) {
        assert(nodes_[id].is_leaf());
        const std::size_t fanout = std::size_t{1} << nodes_[id].region.dims;
        const Region region = nodes_[id].region;
        const int depth = nodes_[id].depth + 1;
        nodes_[id].children.reserve(fanout);
        for (std::size_t mask = 0; mask < fanout; ++mask) {
            HooNode child;
            child.depth = depth;
            child.region = region.split(mask);
            child.parent = id;
            nodes_.push_back(std::move(child));
            nodes_[id].children.push_back(nodes_.size() - 1);
        }
    }

    void mark_stale(std::size_t id) {
        while (id != kNoNode) {
            nodes_[id].stale = true;
            id = nodes_[id].parent;
        }
        any_stale_ = true;
    }

    HooParams params_;
    std::vector<HooNode> nodes_;
    bool any_stale_ = false;
};

}  // namespace sspmcts::hoo
