#ifndef CANTORDIM_DIAGNOSTICS_HPP
#define CANTORDIM_DIAGNOSTICS_HPP

// Comparison of a harmonic measure estimate with a conformal measure:
// the discrepancy scan, the constant beta(gamma), Bourgain sums and the
// resulting dimension gap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/level_measure.hpp"

namespace cantordim {

namespace detail {

/// Maximizer of a concave function on [lo, hi].
template <class F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({f(lo), f(hi), f(0.5 * (a + b))});
}

}  // namespace detail

/// Objective of the one-coordinate reduction: q_j = t, p_j = gamma t, the
/// remaining mass proportional on the free coordinates.
inline double beta_objective(double gamma, double t) {
    const double rest = std::max(0.0, (1.0 - gamma * t) * (1.0 - t));
    return std::sqrt(gamma) * t + std::sqrt(rest);
}

/// sup of sum sqrt(p_i q_i) over probability vectors of length kappa_cells with
/// q_i >= q_min and p_j >= gamma q_j for some j.
inline double beta_from_gamma(double gamma, std::size_t kappa_cells, double q_min) {
    if (!(gamma >= 1.0)) {
        throw InvalidArgument("gamma must be at least 1");
    }
    if (kappa_cells < 2) {
        throw InvalidArgument("need at least two cells");
    }
    if (!(q_min >= 0.0 && q_min * static_cast<double>(kappa_cells) < 1.0)) {
        throw InvalidArgument("q_min must lie in [0, 1/kappa)");
    }
    if (gamma * q_min > 1.0) {
        throw Infeasible("constraint set is empty: gamma * q_min > 1");
    }
    const double lo = q_min;
    const double hi = std::min(1.0 / gamma, 1.0 - static_cast<double>(kappa_cells - 1) * q_min);
    if (hi < lo) {
        throw Infeasible("constraint set is empty");
    }
    return detail::golden_section_max([&](double t) { return beta_objective(gamma, t); }, lo, hi, 1e-10);
}

/// Lower bound of nu(IJ)/nu(I) for |J| = depth on a system with scales in [a_lower, a_upper].
inline double conformal_ratio_floor(const SystemParams& p, double rho, std::size_t depth) {
    const double per_level = std::pow(p.a_lower / p.a_upper, rho) / static_cast<double>(p.branch_count);
    return std::pow(per_level, static_cast<double>(depth));
}

struct StarCell {
    std::uint64_t index = 0;   // level-L cylinder
    double statistic = 1.0;    // gamma_hat(I)
    double std_error = 0.0;
    Word witness;              // maximizing subword J
    double hits = 0.0;
    bool insufficient = false;
};

struct StarReport {
    std::size_t level = 0;
    std::size_t depth = 0;
    double z = 3.0;
    std::vector<StarCell> cells;
    double statistic = 1.0;          // min over sufficient cells of gamma_hat
    double statistic_stderr = 0.0;   // stderr of that cell
    double lower_edge = 1.0;         // min over sufficient cells of gamma_hat - z * stderr
    std::size_t insufficient = 0;

    bool exceeds_one() const noexcept { return lower_edge > 1.0; }
};

inline constexpr double kMinScanHits = 20.0;

inline StarReport star_condition_scan(const LevelMeasure& omega, const LevelMeasure& nu,
                                      std::size_t level, std::size_t depth, double z = 3.0) {
    if (depth < 1) {
        throw InvalidArgument("subword depth must be at least 1");
    }
    omega.require_level(level + depth);
    nu.require_level(level + depth);
    if (omega.branch_count != nu.branch_count) {
        throw InvalidArgument("measures disagree on the branch count");
    }
    const std::size_t n = omega.branch_count;
    StarReport rep;
    rep.level = level;
    rep.depth = depth;
    rep.z = z;
    rep.statistic = std::numeric_limits<double>::infinity();
    rep.lower_edge = std::numeric_limits<double>::infinity();
    const std::uint64_t cells = ipow(n, level);
    for (std::uint64_t i = 0; i < cells; ++i) {
        StarCell cell;
        cell.index = i;
        const double w_i = omega.mass(level, i);
        const double v_i = nu.mass(level, i);
        cell.hits = omega.has_counts() ? omega.count(level, i) : std::numeric_limits<double>::infinity();
        cell.insufficient = cell.hits < kMinScanHits || w_i <= 0.0;
        if (!cell.insufficient) {
            for (std::size_t len = 1; len <= depth; ++len) {
                const std::uint64_t span = ipow(n, len);
                for (std::uint64_t j = 0; j < span; ++j) {
                    const std::uint64_t sub = i * span + j;
                    const double p = omega.mass(level + len, sub) / w_i;
                    const double q = nu.mass(level + len, sub) / v_i;
                    const double r = p / q;
                    const double stat = r >= 1.0 ? r : 1.0 / r;
                    if (stat > cell.statistic) {
                        const double se_p =
                            omega.has_counts() ? std::sqrt(std::max(0.0, p * (1.0 - p)) / cell.hits) : 0.0;
                        cell.statistic = stat;
                        cell.std_error = r >= 1.0 ? se_p / q : (se_p / q) / (r * r);
                        cell.witness = word_from_index(j, len, n);
                    }
                }
            }
            if (cell.statistic < rep.statistic) {
                rep.statistic = cell.statistic;
                rep.statistic_stderr = cell.std_error;
            }
            rep.lower_edge = std::min(rep.lower_edge, cell.statistic - z * cell.std_error);
        } else {
            ++rep.insufficient;
        }
        rep.cells.push_back(std::move(cell));
    }
    if (rep.insufficient == cells) {
        throw InvalidArgument("every scan cell has fewer than " + std::to_string(int(kMinScanHits)) +
                              " hits");
    }
    return rep;
}

struct BourgainProfile {
    std::vector<double> sums;          // S_n, index n-1
    double beta_tilde = 1.0;
    double intercept = 0.0;
    double slope = 0.0;                // log beta_tilde
    double slope_stderr = 0.0;
    double slope_ci_low = 0.0;         // 95% band
    double slope_ci_high = 0.0;
    std::vector<double> residuals;

    bool decays_with_confidence() const noexcept { return slope_ci_high < 0.0; }
};

inline BourgainProfile bourgain_profile(const LevelMeasure& omega, const LevelMeasure& nu,
                                        std::size_t levels) {
    if (levels < 3) {
        throw InvalidArgument("the decay fit needs at least 3 levels");
    }
    omega.require_level(levels);
    nu.require_level(levels);
    BourgainProfile bp;
    for (std::size_t l = 1; l <= levels; ++l) {
        double s = 0.0;
        for (std::size_t i = 0; i < omega.masses[l].size(); ++i) {
            s += std::sqrt(omega.masses[l][i] * nu.masses[l][i]);
        }
        bp.sums.push_back(s);
    }
    const double k = static_cast<double>(levels);
    double mx = 0, my = 0;
    for (std::size_t l = 1; l <= levels; ++l) {
        mx += double(l);
        my += std::log(bp.sums[l - 1]);
    }
    mx /= k;
    my /= k;
    double sxx = 0, sxy = 0;
    for (std::size_t l = 1; l <= levels; ++l) {
        sxx += (l - mx) * (l - mx);
        sxy += (l - mx) * (std::log(bp.sums[l - 1]) - my);
    }
    bp.slope = sxy / sxx;
    bp.intercept = my - bp.slope * mx;
    bp.beta_tilde = std::exp(bp.slope);
    double rss = 0.0;
    for (std::size_t l = 1; l <= levels; ++l) {
        const double r = std::log(bp.sums[l - 1]) - (bp.intercept + bp.slope * double(l));
        bp.residuals.push_back(r);
        rss += r * r;
    }
    const double dof = k - 2.0;
    bp.slope_stderr = dof > 0 ? std::sqrt(rss / dof / sxx) : 0.0;
    const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
    bp.slope_ci_low = bp.slope - t * bp.slope_stderr;
    bp.slope_ci_high = bp.slope + t * bp.slope_stderr;
    return bp;
}

struct DimensionGap {
    double epsilon = 0.0;
    double s = 0.0;
    double beta_hat = 1.0;
    double beta_tilde = 1.0;
    std::string caveat = "MC-estimated beta_tilde";
};

/// Largest eps on a grid of the given resolution such that some s > rho on the
/// same grid has beta_tilde a^(rho - s) < 1 and beta_tilde a^((rho - s - eps)/2) < 1.
inline DimensionGap dimension_gap_report(double beta_tilde, double rho, double a_lower,
                                         double resolution = 1e-4) {
    if (!(beta_tilde < 1.0) || !(beta_tilde > 0.0)) {
        throw InvalidArgument("no gap: beta_tilde must lie in (0, 1)");
    }
    if (!(a_lower > 0.0 && a_lower < 1.0)) {
        throw InvalidArgument("a_lower must lie in (0, 1)");
    }
    const double log_b = std::log(beta_tilde), log_a = std::log(a_lower);
    DimensionGap g;
    g.beta_tilde = beta_tilde;
    g.s = rho;
    bool found = false;
    for (std::size_t ks = 1;; ++ks) {
        const double ds = ks * resolution;
        if (!(log_b - ds * log_a < 0.0)) {
            break;
        }
        // beta_hat < 1  <=>  eps < 2 log b / log a - ds
        std::int64_t ke = static_cast<std::int64_t>(std::ceil((2.0 * log_b / log_a - ds) / resolution));
        while (ke > 0 && !(log_b + 0.5 * (-ds - ke * resolution) * log_a < 0.0)) {
            --ke;
        }
        if (ke > 0 && ke * resolution > g.epsilon) {
            g.epsilon = ke * resolution;
            g.s = rho + ds;
            g.beta_hat = std::exp(log_b + 0.5 * (-ds - g.epsilon) * log_a);
            found = true;
        }
    }
    if (!found) {
        throw InvalidArgument("no positive gap at this resolution");
    }
    return g;
}

inline DimensionGap dimension_gap_report(const BourgainProfile& profile, double rho, double a_lower,
                                         double resolution = 1e-4) {
    return dimension_gap_report(profile.beta_tilde, rho, a_lower, resolution);
}

}  // namespace cantordim

#endif  // CANTORDIM_DIAGNOSTICS_HPP
