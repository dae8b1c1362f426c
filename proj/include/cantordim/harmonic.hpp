#ifndef CANTORDIM_HARMONIC_HPP
#define CANTORDIM_HARMONIC_HPP

// Harmonic measure at infinity of K_n (the union of level-n cylinder squares)
// by walk-on-spheres.
//
// A walker starts uniformly on the circle of radius R about the centroid of
// the level-1 squares, which is the exact hitting law of that circle for
// Brownian motion started at infinity. Inside the re-entry circle it jumps to
// a uniform point on the largest circle avoiding K_n; once it leaves the
// re-entry circle it is returned to it with the exterior Poisson kernel, so
// long excursions cost one step and introduce no bias. A walk ends when it is
// within eps_term of K_n and reports the nearest level-n cylinder.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cantordim/cylinder_tree.hpp"
#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/level_measure.hpp"
#include "cantordim/parallel.hpp"
#include "cantordim/rng.hpp"

namespace cantordim {

struct WalkConfig {
    std::size_t depth = 8;           // K_n approximation level
    std::size_t report_level = 1;    // m <= depth - 2
    std::uint64_t walkers = 100000;
    double start_radius_factor = 64.0;    // R = factor * diam Q
    double reentry_radius_factor = 2.0;   // re-entry circle = factor * radius of Q about the centroid
    double termination_rel = 1e-3;        // eps_term = termination_rel * smallest level-n diameter
    std::uint64_t max_steps = 1000000;
    std::uint64_t seed = 1;
    std::size_t threads = 0;              // 0: hardware concurrency (capped by CANTORDIM_THREADS)

    void validate() const {
        if (report_level + 2 > depth) {
            throw InvalidArgument("report level must satisfy m <= depth - 2");
        }
        if (walkers < 1) {
            throw InvalidArgument("need at least one walker");
        }
        if (!(start_radius_factor > 1.0)) {
            throw InvalidArgument("start radius factor must exceed 1");
        }
        if (!(reentry_radius_factor > 1.0)) {
            throw InvalidArgument("re-entry radius factor must exceed 1");
        }
        if (!(termination_rel > 0.0 && termination_rel < 1.0)) {
            throw InvalidArgument("termination band must be in (0, 1)");
        }
        if (max_steps < 1) {
            throw InvalidArgument("max_steps must be positive");
        }
    }
};

struct WalkAborted {
    std::uint64_t steps = 0;
};

struct WalkHit {
    std::uint64_t leaf = 0;   // level-depth cylinder index
    Word word;                // level-m word
    std::uint64_t steps = 0;
};

using WalkOutcome = std::variant<WalkHit, WalkAborted>;

/// Precomputed geometry shared by all walkers of one configuration.
class WalkContext {
public:
    WalkContext(const CantorSystem& system, const WalkConfig& config)
        : config_(config), tree_((config.validate(), system), config.depth) {
        const auto& l1 = tree_.level(1);
        Complex sum{};
        for (const auto& n : l1) {
            sum += n.anchor + n.scale * Complex(0.5, 0.5);
        }
        center_ = sum / static_cast<double>(l1.size());
        double enclosing = 0.0;
        for (Complex corner : {Complex(0, 0), Complex(1, 0), Complex(1, 1), Complex(0, 1)}) {
            enclosing = std::max(enclosing, std::abs(corner - center_));
        }
        reentry_radius_ = config.reentry_radius_factor * enclosing;
        start_radius_ = std::max(config.start_radius_factor * kBaseDiameter, reentry_radius_);
        eps_term_ = config.termination_rel * tree_.min_leaf_diameter();
        leaf_per_report_ = ipow(system.branch_count(), config.depth - config.report_level);
    }

    const WalkConfig& config() const noexcept { return config_; }
    const CylinderTree& tree() const noexcept { return tree_; }
    Complex center() const noexcept { return center_; }
    double start_radius() const noexcept { return start_radius_; }
    double reentry_radius() const noexcept { return reentry_radius_; }
    double termination_band() const noexcept { return eps_term_; }
    std::uint64_t leaves_per_report_cell() const noexcept { return leaf_per_report_; }

    /// One walk; depends only on (seed, walker_index).
    WalkOutcome walk(std::uint64_t walker_index, CylinderTree::Scratch& scratch) const {
        RandomStream rng(config_.seed, walker_index);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        Complex z = center_ + std::polar(start_radius_, two_pi * rng.uniform());
        for (std::uint64_t step = 0; step < config_.max_steps; ++step) {
            const Complex rel = z - center_;
            if (std::abs(rel) > reentry_radius_) {
                z = center_ + exterior_hit(rel, rng.uniform());
                continue;
            }
            const auto near = tree_.nearest(z, scratch);
            if (near.distance < eps_term_) {
                const std::uint64_t cell = near.leaf / leaf_per_report_;
                return WalkHit{near.leaf,
                               word_from_index(cell, config_.report_level, tree_.branch_count()),
                               step + 1};
            }
            z += std::polar(near.distance, two_pi * rng.uniform());
        }
        return WalkAborted{config_.max_steps};
    }

    WalkOutcome walk(std::uint64_t walker_index) const {
        CylinderTree::Scratch s;
        return walk(walker_index, s);
    }

private:
    /// Hitting point on the re-entry circle for a walker at rel (outside it).
    /// Inversion in the circle carries the exterior problem to the interior
    /// one at R^2 / conj(rel), whose hitting law is the Moebius image of the uniform law.
    Complex exterior_hit(Complex rel, double u) const {
        const double r = reentry_radius_;
        const Complex alpha = (r / std::conj(rel)) ;
        const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * u);
        return r * (e + alpha) / (1.0 + std::conj(alpha) * e);
    }

    WalkConfig config_;
    CylinderTree tree_;
    Complex center_{};
    double start_radius_ = 0.0;
    double reentry_radius_ = 0.0;
    double eps_term_ = 0.0;
    std::uint64_t leaf_per_report_ = 1;
};

inline WalkOutcome sample_harmonic_hit(const CantorSystem& system, const WalkConfig& config,
                                       std::uint64_t walker_index) {
    if (walker_index >= config.walkers) {
        throw InvalidArgument("walker index out of range");
    }
    return WalkContext(system, config).walk(walker_index);
}

struct HarmonicMeasureEstimate {
    WalkConfig config;
    std::size_t branch_count = 0;
    std::uint64_t total = 0;
    std::uint64_t aborted = 0;
    std::uint64_t total_steps = 0;
    std::vector<std::vector<std::uint64_t>> counts;  // levels 0..report_level

    std::uint64_t hits() const noexcept { return total - aborted; }
    double aborted_fraction() const noexcept {
        return total ? static_cast<double>(aborted) / static_cast<double>(total) : 0.0;
    }
    bool flagged() const noexcept { return aborted_fraction() > 0.01; }

    double mass(std::size_t level, std::uint64_t i) const {
        return static_cast<double>(counts.at(level).at(i)) / static_cast<double>(hits());
    }

    /// Binomial standard error of mass(level, i).
    double standard_error(std::size_t level, std::uint64_t i) const {
        const double p = mass(level, i);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(hits()));
    }

    LevelMeasure to_level_measure() const {
        LevelMeasure m;
        m.branch_count = branch_count;
        for (const auto& lvl : counts) {
            std::vector<double> mass_row, hit_row;
            mass_row.reserve(lvl.size());
            hit_row.reserve(lvl.size());
            for (auto c : lvl) {
                hit_row.push_back(static_cast<double>(c));
                mass_row.push_back(static_cast<double>(c) / static_cast<double>(hits()));
            }
            m.masses.push_back(std::move(mass_row));
            m.hits.push_back(std::move(hit_row));
        }
        return m;
    }
};

inline HarmonicMeasureEstimate estimate_harmonic_measure(const CantorSystem& system,
                                                         const WalkConfig& config) {
    const WalkContext ctx(system, config);
    const std::size_t n = system.branch_count();
    const std::uint64_t cells = ipow(n, config.report_level);
    constexpr std::uint64_t kChunk = 4096;
    const std::size_t chunks = static_cast<std::size_t>((config.walkers + kChunk - 1) / kChunk);

    struct Partial {
        std::vector<std::uint64_t> counts;
        std::uint64_t aborted = 0;
        std::uint64_t steps = 0;
    };
    std::vector<Partial> partials(chunks);
    parallel_chunks(chunks, resolve_threads(config.threads), [&](std::size_t c) {
        Partial p;
        p.counts.assign(cells, 0);
        CylinderTree::Scratch scratch;
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min<std::uint64_t>(config.walkers, begin + kChunk);
        for (std::uint64_t w = begin; w < end; ++w) {
            const auto out = ctx.walk(w, scratch);
            if (const auto* hit = std::get_if<WalkHit>(&out)) {
                ++p.counts[hit->leaf / ctx.leaves_per_report_cell()];
                p.steps += hit->steps;
            } else {
                ++p.aborted;
                p.steps += std::get<WalkAborted>(out).steps;
            }
        }
        partials[c] = std::move(p);
    });

    HarmonicMeasureEstimate est;
    est.config = config;
    est.branch_count = n;
    est.total = config.walkers;
    est.counts.resize(config.report_level + 1);
    est.counts[config.report_level].assign(cells, 0);
    for (const auto& p : partials) {
        for (std::uint64_t i = 0; i < cells; ++i) {
            est.counts[config.report_level][i] += p.counts[i];
        }
        est.aborted += p.aborted;
        est.total_steps += p.steps;
    }
    for (std::size_t l = config.report_level; l-- > 0;) {
        est.counts[l].assign(est.counts[l + 1].size() / n, 0);
        for (std::size_t i = 0; i < est.counts[l + 1].size(); ++i) {
            est.counts[l][i / n] += est.counts[l + 1][i];
        }
    }
    if (est.hits() == 0) {
        throw Error("every walk aborted");
    }
    return est;
}

/// max over level-m cells of |w_n - w_{n+2}| in units of the combined standard error.
struct DepthComparison {
    double max_z = 0.0;
    HarmonicMeasureEstimate coarse;
    HarmonicMeasureEstimate fine;
};

inline DepthComparison compare_depths(const CantorSystem& system, const WalkConfig& config) {
    WalkConfig fine_cfg = config;
    fine_cfg.depth = config.depth + 2;
    DepthComparison cmp{0.0, estimate_harmonic_measure(system, config),
                        estimate_harmonic_measure(system, fine_cfg)};
    const std::size_t m = config.report_level;
    for (std::uint64_t i = 0; i < cmp.coarse.counts[m].size(); ++i) {
        const double se = std::hypot(cmp.coarse.standard_error(m, i), cmp.fine.standard_error(m, i));
        const double d = std::abs(cmp.coarse.mass(m, i) - cmp.fine.mass(m, i));
        if (se > 0.0) {
            cmp.max_z = std::max(cmp.max_z, d / se);
        }
    }
    return cmp;
}

/// Log-linear fit of max_{|I|=l} w(I) ~ C gamma^l over levels 1..m.
struct MassDecayFit {
    double gamma = 1.0;
    double log_c = 0.0;
    std::vector<double> log_max_mass;  // index l-1
};

inline MassDecayFit mass_decay_fit(const HarmonicMeasureEstimate& est) {
    const std::size_t m = est.config.report_level;
    if (m < 2) {
        throw InvalidArgument("decay fit needs report level >= 2");
    }
    MassDecayFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t l = 1; l <= m; ++l) {
        double mx = 0.0;
        for (std::uint64_t i = 0; i < est.counts[l].size(); ++i) {
            mx = std::max(mx, est.mass(l, i));
        }
        const double y = std::log(mx);
        fit.log_max_mass.push_back(y);
        sx += l;
        sy += y;
        sxx += double(l) * l;
        sxy += l * y;
    }
    const double k = static_cast<double>(m);
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.gamma = std::exp(slope);
    fit.log_c = (sy - slope * sx) / k;
    return fit;
}

}  // namespace cantordim

#endif  // CANTORDIM_HARMONIC_HPP
