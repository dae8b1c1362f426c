#ifndef CANTORDIM_CONFORMAL_HPP
#define CANTORDIM_CONFORMAL_HPP

// h-conformal measures nu_k on the cylinders of X_k:
//
//   nu_k(I) = |A_I|^h / (lambda_{k,h} ... lambda_{k+m-1,h}),   |I| = m,
//
// with A_I the composed scale of I read from generation k. Everything is
// evaluated lazily and in log-space; only full-level enumeration materializes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cantordim/dimension.hpp"
#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/level_measure.hpp"

namespace cantordim {

inline constexpr std::size_t kMaxEnumerationLevel = 12;

class ConformalMeasure {
public:
    ConformalMeasure(CantorSystem system, double exponent, std::size_t start_generation = 0)
        : system_(std::move(system)), exponent_(exponent), start_(start_generation) {
        if (exponent < 0.0) {
            throw InvalidArgument("conformal exponent must be non-negative");
        }
    }

    const CantorSystem& system() const noexcept { return system_; }
    double exponent() const noexcept { return exponent_; }
    std::size_t start_generation() const noexcept { return start_; }

    double log_mass(const Word& word) const {
        system_.require_generations(start_ + word.size());
        double acc = 0.0;
        for (std::size_t j = 0; j < word.size(); ++j) {
            const auto gen = system_.generation(start_ + j);
            acc += exponent_ * std::log(gen.branch(word[j]).modulus()) - std::log(lambda(gen, exponent_));
        }
        return acc;
    }

    double mass(const Word& word) const { return std::exp(log_mass(word)); }

    /// Visits every word of length `level` with its log-mass and log|A_I|.
    void for_each_cylinder(std::size_t level,
                           const std::function<void(std::uint64_t, double, double)>& visit) const {
        if (level > kMaxEnumerationLevel) {
            throw InvalidArgument("full-level enumeration is capped at level " +
                                  std::to_string(kMaxEnumerationLevel));
        }
        const ScaleTable scales(system_, level, start_);
        std::vector<double> log_lam(level);
        for (std::size_t j = 0; j < level; ++j) {
            log_lam[j] = scales.log_lambda(j, exponent_);
        }
        const std::size_t n = system_.branch_count();
        std::function<void(std::size_t, std::uint64_t, double, double)> rec =
            [&](std::size_t depth, std::uint64_t idx, double lm, double la) {
                if (depth == level) {
                    visit(idx, lm, la);
                    return;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double l = scales.log_modulus(depth, i);
                    rec(depth + 1, idx * n + i, lm + exponent_ * l - log_lam[depth], la + l);
                }
            };
        rec(0, 0, 0.0, 0.0);
    }

    /// Masses on all levels 0..levels.
    LevelMeasure materialize(std::size_t levels) const {
        std::vector<double> finest(ipow(system_.branch_count(), levels));
        for_each_cylinder(levels, [&](std::uint64_t idx, double lm, double) {
            finest[idx] = std::exp(lm);
        });
        return aggregate_levels(system_.branch_count(), std::move(finest));
    }

private:
    CantorSystem system_;
    double exponent_;
    std::size_t start_;
};

inline double conformal_mass(const ConformalMeasure& measure, const Word& word) {
    return measure.mass(word);
}

/// Total mass of level m, summed as log-sum-exp with compensated accumulation.
inline double level_mass_sum(const ConformalMeasure& measure, std::size_t level) {
    std::vector<double> logs;
    logs.reserve(ipow(measure.system().branch_count(), level));
    measure.for_each_cylinder(level, [&](std::uint64_t, double lm, double) { logs.push_back(lm); });
    const double mx = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0, comp = 0.0;
    for (double l : logs) {
        const double v = std::exp(l - mx);
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return std::exp(mx) * (sum + comp);
}

/// max over words J with 1 <= |J| <= depth of |nu_{k+1}(J) - sum_i nu_k(iJ)|.
inline double check_invariance(const ConformalMeasure& measure, std::size_t depth) {
    if (depth < 1) {
        throw InvalidArgument("invariance depth must be at least 1");
    }
    const ConformalMeasure next(measure.system(), measure.exponent(),
                                measure.start_generation() + 1);
    const std::size_t n = measure.system().branch_count();
    double worst = 0.0;
    for (std::size_t len = 1; len <= depth; ++len) {
        const std::uint64_t count = ipow(n, len);
        for (std::uint64_t w = 0; w < count; ++w) {
            const Word j = word_from_index(w, len, n);
            double pulled = 0.0;
            Word ij(len + 1);
            std::copy(j.begin(), j.end(), ij.begin() + 1);
            for (std::size_t i = 0; i < n; ++i) {
                ij[0] = static_cast<std::uint32_t>(i);
                pulled += measure.mass(ij);
            }
            worst = std::max(worst, std::abs(next.mass(j) - pulled));
        }
    }
    return worst;
}

struct LocalDimension {
    double with_constant = 0.0;     // denominator uses log diam(Q_I) = log|A_I| + log sqrt(2)
    double without_constant = 0.0;  // denominator uses log|A_I|
};

/// Coarse entropy / Lyapunov ratio sum nu log nu / sum nu log diam(Q_I) at level m.
inline LocalDimension local_dimension_profile(const ConformalMeasure& measure, std::size_t level) {
    if (level == 0) {
        throw InvalidArgument("local dimension is undefined at level 0");
    }
    double entropy = 0.0, lyap = 0.0, mass = 0.0;
    measure.for_each_cylinder(level, [&](std::uint64_t, double lm, double la) {
        const double v = std::exp(lm);
        entropy += v * lm;
        lyap += v * la;
        mass += v;
    });
    LocalDimension d;
    d.without_constant = entropy / lyap;
    d.with_constant = entropy / (lyap + mass * std::log(kBaseDiameter));
    return d;
}

}  // namespace cantordim

#endif  // CANTORDIM_CONFORMAL_HPP
