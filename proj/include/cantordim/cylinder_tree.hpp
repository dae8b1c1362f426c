#ifndef CANTORDIM_CYLINDER_TREE_HPP
#define CANTORDIM_CYLINDER_TREE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "cantordim/geometry.hpp"

namespace cantordim {

/// All cylinder squares Q_I for |I| <= depth, stored level by level.
///
/// Node (l, i) is the cylinder with word_from_index(i, l); its children are
/// (l + 1, i * N + j). Parent squares contain their children, so a parent's
/// distance bounds the distance to every descendant from below and the
/// nearest-leaf query can run best-first.
class CylinderTree {
public:
    struct Node {
        Complex scale;
        Complex anchor;
        Complex inv_scale;
        double modulus;

        double distance(Complex p) const noexcept {
            // local coordinates u = (p - anchor) / scale, in real arithmetic
            const double px = p.real() - anchor.real(), py = p.imag() - anchor.imag();
            const double ux = px * inv_scale.real() - py * inv_scale.imag();
            const double uy = px * inv_scale.imag() + py * inv_scale.real();
            const double dx = std::max({-ux, 0.0, ux - 1.0});
            const double dy = std::max({-uy, 0.0, uy - 1.0});
            if (dx == 0.0 && dy == 0.0) {
                return 0.0;
            }
            return modulus * std::sqrt(dx * dx + dy * dy);
        }
    };

    struct Nearest {
        double distance = std::numeric_limits<double>::infinity();
        std::uint64_t leaf = 0;  // index among level-depth words
    };

    /// Reusable per-level buffers for nearest(); one per thread.
    struct Scratch {
        struct Entry {
            double dist;
            std::uint64_t index;
        };
        std::vector<Entry> buffer;
    };

    CylinderTree() = default;

    CylinderTree(const CantorSystem& system, std::size_t depth, std::size_t start_generation = 0)
        : branch_count_(system.branch_count()), depth_(depth) {
        system.require_generations(start_generation + depth);
        const double total = std::pow(static_cast<double>(branch_count_), static_cast<double>(depth));
        if (total > 1.0e8) {
            throw InvalidArgument("cylinder tree of depth " + std::to_string(depth) +
                                  " is too large to materialize");
        }
        levels_.resize(depth + 1);
        levels_[0].push_back(make_node(Complex(1.0, 0.0), Complex(0.0, 0.0)));
        for (std::size_t l = 0; l < depth; ++l) {
            const auto gen = system.generation(start_generation + l);
            const auto& parent = levels_[l];
            auto& next = levels_[l + 1];
            next.reserve(parent.size() * branch_count_);
            for (const auto& p : parent) {
                for (const auto& br : gen.branches) {
                    next.push_back(make_node(p.scale * br.scale,
                                             p.anchor - p.scale * br.scale * br.offset));
                }
            }
        }
        leaf_span_.resize(depth + 1);
        for (std::size_t l = 0; l <= depth; ++l) {
            leaf_span_[l] = ipow(branch_count_, depth - l);
        }
        min_leaf_diameter_ = std::numeric_limits<double>::infinity();
        for (const auto& n : levels_[depth]) {
            min_leaf_diameter_ = std::min(min_leaf_diameter_, n.modulus * kBaseDiameter);
        }
    }

    std::size_t depth() const noexcept { return depth_; }
    std::size_t branch_count() const noexcept { return branch_count_; }
    const std::vector<Node>& level(std::size_t l) const { return levels_.at(l); }
    double min_leaf_diameter() const noexcept { return min_leaf_diameter_; }

    Square square(std::size_t l, std::uint64_t i) const {
        const auto& n = levels_.at(l).at(i);
        return Square{n.scale, n.anchor};
    }

    /// Exact distance to the union of level-depth squares and the nearest leaf.
    /// Ties go to the lexicographically smallest word.
    ///
    /// Depth-first with children visited in (distance, index) order; a subtree
    /// is skipped once its box distance cannot beat or tie the best leaf.
    Nearest nearest(Complex p, Scratch& scratch) const {
        scratch.buffer.resize((depth_ + 1) * branch_count_);
        Nearest best;
        if (depth_ == 0) {
            return Nearest{levels_[0][0].distance(p), 0};
        }
        descend(p, 0, 0, best, scratch.buffer.data());
        return best;
    }

    Nearest nearest(Complex p) const {
        Scratch s;
        return nearest(p, s);
    }

private:
    void descend(Complex p, std::size_t level, std::uint64_t index, Nearest& best,
                 Scratch::Entry* buf) const {
        const auto& children = levels_[level + 1];
        const std::size_t n = branch_count_;
        const std::uint64_t base = index * n;
        for (std::size_t j = 0; j < n; ++j) {
            Scratch::Entry e{children[base + j].distance(p), base + j};
            std::size_t k = j;
            while (k > 0 && buf[k - 1].dist > e.dist) {
                buf[k] = buf[k - 1];
                --k;
            }
            buf[k] = e;
        }
        const bool leaves = level + 1 == depth_;
        for (std::size_t j = 0; j < n; ++j) {
            const auto e = buf[j];
            const std::uint64_t first_leaf = e.index * leaf_span_[level + 1];
            if (e.dist > best.distance) {
                break;
            }
            if (e.dist == best.distance && first_leaf >= best.leaf) {
                continue;
            }
            if (leaves) {
                best = Nearest{e.dist, e.index};
            } else {
                descend(p, level + 1, e.index, best, buf + n);
            }
        }
    }

    static Node make_node(Complex scale, Complex anchor) {
        return Node{scale, anchor, 1.0 / scale, std::abs(scale)};
    }

    std::size_t branch_count_ = 0;
    std::size_t depth_ = 0;
    std::vector<std::vector<Node>> levels_;
    std::vector<std::uint64_t> leaf_span_;
    double min_leaf_diameter_ = 0.0;
};

/// Euclidean distance from point to K_depth, the union of closed level-depth squares.
inline double distance_to_approximation(const CantorSystem& system, Complex point,
                                        std::size_t depth) {
    return CylinderTree(system, depth).nearest(point).distance;
}

}  // namespace cantordim

#endif  // CANTORDIM_CYLINDER_TREE_HPP
