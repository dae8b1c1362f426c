#ifndef CANTORDIM_REGULARIZER_HPP
#define CANTORDIM_REGULARIZER_HPP

// Rescaling of contraction moduli so that the running products of
// lambda_{k,rho} stay >= 1 and return to exactly 1 at a sequence of
// checkpoints n_1 < n_2 < ...; the rescaled set then has positive finite
// rho-dimensional Hausdorff measure and the same dimension.
//
// Zero-measure input: on the segment after n_{j-1}, eps_{j,n} solves
//   prod_{k=n_{j-1}}^{n-1} lambda_{k, rho - eps} = 1,
// n_j maximizes it, and every |a| on the segment becomes |a|^{1 - eps_j/rho}.
// Infinite-measure input: scales are first damped block by block by
// delta_j^{1/rho}, delta_j = 1 - 2^{-j}, which drives the products to zero,
// and the result then goes through the zero-measure construction.
//
// Generations are 0-based: segment [s, n) covers generations s..n-1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cantordim/dimension.hpp"
#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"

namespace cantordim {

enum class MeasureCase { zero_measure, infinite_measure, already_finite };

inline const char* to_string(MeasureCase c) noexcept {
    switch (c) {
        case MeasureCase::zero_measure: return "zero_measure";
        case MeasureCase::infinite_measure: return "infinite_measure";
        case MeasureCase::already_finite: return "already_finite";
    }
    return "unknown";
}

struct MeasureClassification {
    MeasureCase tag = MeasureCase::already_finite;
    bool caveat = false;  // decided inside the +-threshold band
    ProfileSummary summary;
};

inline MeasureClassification classify_measure(const CantorSystem& system, double rho,
                                              std::size_t n_max) {
    const auto profile = product_profile(system, rho, n_max);
    MeasureClassification c;
    c.summary = summarize_profile(profile);
    c.caveat = !c.summary.by_threshold;
    switch (c.summary.trend) {
        case ProfileTrend::decays: c.tag = MeasureCase::zero_measure; break;
        case ProfileTrend::grows: c.tag = MeasureCase::infinite_measure; break;
        case ProfileTrend::bounded: c.tag = MeasureCase::already_finite; break;
    }
    return c;
}

/// eps with sum_{k=k_start}^{n-1} log lambda_{k, rho - eps} = 0 over the tabulated generations.
///
/// The sum is strictly increasing in eps, positive at eps = rho (exponent 0),
/// so bisection on [rho - 2, rho] converges to the unique root.
inline double epsilon_solver(const ScaleTable& scales, std::size_t k_start, std::size_t n,
                             double rho) {
    if (!(n > k_start)) {
        throw InvalidArgument("epsilon solver needs n > k_start");
    }
    if (n > scales.size()) {
        throw HorizonExceeded("epsilon solver segment ends beyond the tabulated generations");
    }
    auto f = [&](double eps) {
        double acc = 0.0;
        for (std::size_t k = k_start; k < n; ++k) {
            acc += scales.log_lambda(k, rho - eps);
        }
        return acc;
    };
    double lo = rho - 2.0, hi = rho;
    if (!(f(lo) < 0.0)) {
        throw Infeasible("no sign change of the segment product on [rho-2, rho]; degenerate scales");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct Checkpoint {
    std::size_t n = 0;  // products over generations [0, n) equal 1
    double epsilon = 0.0;
};

struct RegularizeOptions {
    bool enforce_case = true;     // error when the input is not in the requested case
    std::size_t classify_n_max = 0;  // horizon used for classification; 0 means the regularization horizon
};

struct RegularizationResult {
    CantorSystem modified;
    MeasureCase case_tag = MeasureCase::already_finite;
    std::vector<Checkpoint> checkpoints;
    std::vector<double> delta_sequence;          // infinite-measure input only
    std::vector<std::size_t> block_boundaries;   // n_j ending each completed damping block
    double damped_min_log_product = 0.0;         // running min after damping, before re-entry
    std::vector<double> max_perturbation;        // per generation max_i |a~ - a|
    bool horizon_limited = false;
    double max_checkpoint_defect = 0.0;          // |log prod| at checkpoints
    double min_running_log_product = 0.0;        // over n <= horizon
    AdmissibilityReport admissibility;
};

namespace detail {

inline GenerationMap rescale_moduli(const GenerationMap& g, double power, double factor) {
    GenerationMap out = g;
    for (auto& b : out.branches) {
        const double m = std::abs(b.scale);
        b.scale *= factor * std::pow(m, power - 1.0);
    }
    return out;
}

struct SegmentMax {
    std::size_t n = 0;
    double epsilon = 0.0;
};

/// argmax over n in (start, horizon] of eps_n; ties go to the smallest n.
inline SegmentMax segment_argmax(const ScaleTable& scales, std::size_t start, double rho) {
    const std::size_t horizon = scales.size();
    std::vector<double> sums(horizon + 1);
    auto any_negative = [&](double eps) {
        double acc = 0.0;
        bool found = false;
        for (std::size_t k = start; k < horizon; ++k) {
            acc += scales.log_lambda(k, rho - eps);
            sums[k + 1] = acc;
            found = found || acc < 0.0;
        }
        return found;
    };
    double lo = rho - 2.0, hi = rho;
    if (!any_negative(lo)) {
        throw Infeasible("segment products never drop below 1 on [rho-2, rho]");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (any_negative(mid) ? lo : hi) = mid;
    }
    any_negative(lo);
    SegmentMax best{0, -std::numeric_limits<double>::infinity()};
    for (std::size_t n = start + 1; n <= horizon; ++n) {
        if (sums[n] < 0.0) {
            const double eps = epsilon_solver(scales, start, n, rho);
            if (eps > best.epsilon + 1e-12) {
                best = SegmentMax{n, eps};
            }
        }
    }
    return best;
}

inline std::vector<double> perturbation_profile(const CantorSystem& a, const CantorSystem& b,
                                                std::size_t horizon) {
    std::vector<double> out(horizon, 0.0);
    for (std::size_t k = 0; k < horizon; ++k) {
        const auto ga = a.generation(k), gb = b.generation(k);
        for (std::size_t i = 0; i < ga.size(); ++i) {
            out[k] = std::max(out[k], std::abs(ga.branches[i].scale - gb.branches[i].scale));
        }
    }
    return out;
}

/// Zero-measure construction on generations [0, horizon) of `system`.
inline RegularizationResult inflate_to_critical(const CantorSystem& system, double rho,
                                                std::size_t horizon) {
    if (!(rho > 0.0)) {
        throw InvalidArgument("rho must be positive");
    }
    const ScaleTable scales(system, horizon);
    RegularizationResult res;
    res.case_tag = MeasureCase::zero_measure;
    std::vector<GenerationMap> gens;
    gens.reserve(horizon);
    for (std::size_t k = 0; k < horizon; ++k) {
        gens.push_back(system.generation(k));
    }
    const std::size_t tail_mark = horizon - horizon / 10;
    std::size_t start = 0;
    while (start < horizon) {
        const SegmentMax seg = segment_argmax(scales, start, rho);
        if (!(seg.epsilon > 0.0)) {
            if (res.checkpoints.empty()) {
                throw CaseMismatch("no positive epsilon on the first segment: the products at rho "
                                   "never drop below 1 within the horizon");
            }
            // Remaining unmodified products over [start, n) are all >= 1.
            res.horizon_limited = true;
            break;
        }
        if (seg.n > tail_mark && start < tail_mark) {
            res.horizon_limited = true;
        }
        for (std::size_t k = start; k < seg.n; ++k) {
            gens[k] = rescale_moduli(gens[k], 1.0 - seg.epsilon / rho, 1.0);
        }
        res.checkpoints.push_back(Checkpoint{seg.n, seg.epsilon});
        start = seg.n;
    }

    SystemParams params = system.params();
    params.a_upper = std::pow(params.a_upper, 1.0 - res.checkpoints.front().epsilon / rho);
    if (!(params.a_upper < 1.0)) {
        throw Error("rescaled upper scale bound reaches 1");
    }
    res.modified = system.with_prefix(std::move(gens), params);

    const auto prof = product_profile(res.modified, rho, horizon);
    for (const auto& c : res.checkpoints) {
        res.max_checkpoint_defect = std::max(res.max_checkpoint_defect, std::abs(prof[c.n]));
    }
    res.min_running_log_product = *std::min_element(prof.begin() + 1, prof.end());
    if (res.max_checkpoint_defect > 1e-10 || res.min_running_log_product < std::log1p(-1e-10)) {
        throw Error("regularized products violate the checkpoint postconditions (defect " +
                    std::to_string(res.max_checkpoint_defect) + ", min log product " +
                    std::to_string(res.min_running_log_product) + ")");
    }
    res.admissibility = check_admissible(res.modified, horizon);
    if (!res.admissibility.admissible) {
        throw Error("regularized system is not admissible: " + res.admissibility.failure);
    }
    res.max_perturbation = perturbation_profile(system, res.modified, horizon);
    return res;
}

}  // namespace detail

inline RegularizationResult regularize_zero_measure(const CantorSystem& system, double rho,
                                                    std::size_t horizon,
                                                    const RegularizeOptions& opts = {}) {
    system.require_generations(horizon);
    if (opts.enforce_case) {
        const auto c = classify_measure(system, rho, opts.classify_n_max ? opts.classify_n_max : horizon);
        if (c.tag != MeasureCase::zero_measure) {
            throw CaseMismatch(std::string("input classified as ") + to_string(c.tag) +
                               ", not zero_measure");
        }
    }
    return detail::inflate_to_critical(system, rho, horizon);
}

inline RegularizationResult regularize_infinite_measure(const CantorSystem& system, double rho,
                                                        std::size_t horizon,
                                                        const RegularizeOptions& opts = {}) {
    system.require_generations(horizon);
    if (opts.enforce_case) {
        const auto c = classify_measure(system, rho, opts.classify_n_max ? opts.classify_n_max : horizon);
        if (c.tag != MeasureCase::infinite_measure) {
            throw CaseMismatch(std::string("input classified as ") + to_string(c.tag) +
                               ", not infinite_measure");
        }
    }
    const ScaleTable scales(system, horizon);
    std::vector<GenerationMap> gens;
    std::vector<double> deltas;
    std::vector<std::size_t> blocks;
    std::size_t j = 1;
    double delta = 0.5;
    double log_product = 0.0;
    double running_min = 0.0;
    for (std::size_t k = 0; k < horizon; ++k) {
        if (deltas.size() < j) {
            deltas.push_back(delta);
        }
        gens.push_back(detail::rescale_moduli(system.generation(k), 1.0, std::pow(delta, 1.0 / rho)));
        log_product += scales.log_lambda(k, rho) + std::log(delta);
        running_min = std::min(running_min, log_product);
        if (log_product < -static_cast<double>(j) * std::log(2.0)) {
            blocks.push_back(k + 1);
            ++j;
            delta = 1.0 - std::ldexp(1.0, -static_cast<int>(j));
        }
    }
    if (blocks.empty()) {
        throw Error("horizon " + std::to_string(horizon) + " too small to complete a damping block");
    }
    SystemParams params = system.params();
    params.a_lower *= std::pow(deltas.front(), 1.0 / rho);
    const CantorSystem damped = system.with_prefix(std::move(gens), params);

    RegularizationResult res = detail::inflate_to_critical(damped, rho, horizon);
    res.case_tag = MeasureCase::infinite_measure;
    res.delta_sequence = std::move(deltas);
    res.block_boundaries = std::move(blocks);
    res.damped_min_log_product = running_min;
    res.max_perturbation = detail::perturbation_profile(system, res.modified, horizon);
    return res;
}

/// Classifies the input and runs the matching construction.
inline RegularizationResult regularize(const CantorSystem& system, double rho, std::size_t horizon) {
    const auto c = classify_measure(system, rho, horizon);
    RegularizeOptions relaxed;
    relaxed.enforce_case = false;
    switch (c.tag) {
        case MeasureCase::zero_measure: return regularize_zero_measure(system, rho, horizon, relaxed);
        case MeasureCase::infinite_measure:
            return regularize_infinite_measure(system, rho, horizon, relaxed);
        case MeasureCase::already_finite: break;
    }
    RegularizationResult res;
    res.modified = system;
    res.case_tag = MeasureCase::already_finite;
    const auto prof = product_profile(system, rho, horizon);
    res.min_running_log_product = *std::min_element(prof.begin() + 1, prof.end());
    res.max_perturbation.assign(horizon, 0.0);
    res.admissibility = check_admissible(system, horizon);
    return res;
}

}  // namespace cantordim

#endif  // CANTORDIM_REGULARIZER_HPP
