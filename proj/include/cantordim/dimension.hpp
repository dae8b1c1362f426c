#ifndef CANTORDIM_DIMENSION_HPP
#define CANTORDIM_DIMENSION_HPP

// Scaling factors lambda_{k,h} = sum_i |a_{k,i}|^h, their running products
// (always in log-space), the Hausdorff dimension as the transition exponent of
// those products, and covering bounds on Hausdorff measure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"

namespace cantordim {

/// Decision band, in log units, for finite-horizon liminf classification.
inline constexpr double kProfileThreshold = 20.0;
/// Minimum change of the tail minimum across successive doubling windows that
/// counts as slow (sub-threshold) divergence of a product profile.
inline constexpr double kDriftThreshold = 0.1;

inline double lambda(const GenerationMap& map, double h) {
    if (h < 0.0) {
        throw InvalidArgument("exponent h must be non-negative");
    }
    double s = 0.0;
    for (const auto& b : map.branches) {
        s += std::pow(b.modulus(), h);
    }
    return s;
}

/// log|a_{k,i}| for a run of generations; the hot path for repeated lambda(h) evaluations.
class ScaleTable {
public:
    ScaleTable() = default;

    ScaleTable(const CantorSystem& system, std::size_t count, std::size_t start = 0)
        : branch_count_(system.branch_count()), start_(start) {
        system.require_generations(start + count);
        log_moduli_.reserve(count * branch_count_);
        for (std::size_t k = 0; k < count; ++k) {
            for (const auto& b : system.generation(start + k).branches) {
                log_moduli_.push_back(std::log(b.modulus()));
            }
        }
    }

    std::size_t size() const noexcept {
        return branch_count_ == 0 ? 0 : log_moduli_.size() / branch_count_;
    }
    std::size_t start() const noexcept { return start_; }
    std::size_t branch_count() const noexcept { return branch_count_; }

    double log_modulus(std::size_t k, std::size_t i) const {
        return log_moduli_[k * branch_count_ + i];
    }

    /// log lambda for the k-th tabulated generation.
    double log_lambda(std::size_t k, double h) const {
        const double* row = log_moduli_.data() + k * branch_count_;
        double mx = h * row[0];
        for (std::size_t i = 1; i < branch_count_; ++i) {
            mx = std::max(mx, h * row[i]);
        }
        double s = 0.0;
        for (std::size_t i = 0; i < branch_count_; ++i) {
            s += std::exp(h * row[i] - mx);
        }
        return mx + std::log(s);
    }

    /// Entries n = 0..size(): sum of log lambda over the first n tabulated generations.
    std::vector<double> log_running_products(double h) const {
        std::vector<double> out(size() + 1, 0.0);
        for (std::size_t k = 0; k < size(); ++k) {
            out[k + 1] = out[k] + log_lambda(k, h);
        }
        return out;
    }

private:
    std::size_t branch_count_ = 0;
    std::size_t start_ = 0;
    std::vector<double> log_moduli_;
};

struct LambdaTable {
    double exponent = 0.0;
    std::vector<double> values;          // lambda_{k,h}, k = 0..n-1
    std::vector<double> log_running;     // sum_{k<n} log lambda_{k,h}, n = 0..size
};

inline LambdaTable lambda_table(const CantorSystem& system, double h, std::size_t generations) {
    if (h < 0.0) {
        throw InvalidArgument("exponent h must be non-negative");
    }
    ScaleTable scales(system, generations);
    LambdaTable t;
    t.exponent = h;
    t.values.reserve(generations);
    for (std::size_t k = 0; k < generations; ++k) {
        t.values.push_back(lambda(system.generation(k), h));
    }
    t.log_running = scales.log_running_products(h);
    return t;
}

/// Entry n (0..n_max) is sum_{k<n} log lambda_{k,h}; sum over |I| = n of
/// diam(Q_I)^h equals diam(Q)^h exp(entry n).
inline std::vector<double> product_profile(const CantorSystem& system, double h,
                                           std::size_t n_max) {
    if (h < 0.0) {
        throw InvalidArgument("exponent h must be non-negative");
    }
    return ScaleTable(system, n_max).log_running_products(h);
}

// ---------------------------------------------------------------------------
// Finite-horizon liminf classification.

enum class ProfileTrend { decays, bounded, grows };

struct ProfileSummary {
    double window_min = 0.0;    // min over n in [n_max/2, n_max]
    double previous_min = 0.0;  // min over n in [n_max/4, n_max/2]
    double drift = 0.0;         // window_min - previous_min
    ProfileTrend trend = ProfileTrend::bounded;
    bool by_threshold = false;  // decided by the +-threshold band rather than the drift
};

inline double window_min(std::span<const double> profile, std::size_t from, std::size_t to) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t n = from; n <= to && n < profile.size(); ++n) {
        m = std::min(m, profile[n]);
    }
    return m;
}

/// Classifies the tail of a log product profile (entries 0..n_max).
///
/// The tail is decaying (liminf 0) if its window minimum is below -threshold,
/// growing if above +threshold. Inside the band, polynomially slow trends are
/// caught by comparing the minima over the last two doubling windows.
inline ProfileSummary summarize_profile(std::span<const double> profile,
                                        double threshold = kProfileThreshold,
                                        double drift_threshold = kDriftThreshold) {
    if (profile.size() < 5) {
        throw InvalidArgument("profile too short to classify");
    }
    const std::size_t n_max = profile.size() - 1;
    ProfileSummary s;
    s.window_min = window_min(profile, n_max / 2, n_max);
    s.previous_min = window_min(profile, n_max / 4, n_max / 2);
    s.drift = s.window_min - s.previous_min;
    if (s.window_min < -threshold) {
        s.trend = ProfileTrend::decays;
        s.by_threshold = true;
    } else if (s.window_min > threshold) {
        s.trend = ProfileTrend::grows;
        s.by_threshold = true;
    } else if (s.drift < -drift_threshold) {
        s.trend = ProfileTrend::decays;
    } else if (s.drift > drift_threshold) {
        s.trend = ProfileTrend::grows;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Hausdorff dimension.

struct DimensionResult {
    double rho = 0.0;
    double s_low = 0.0;
    double s_high = 2.0;
    std::size_t horizon_used = 0;
    double profile_min = 0.0;      // tail-window min of the log product at rho
    std::size_t band_steps = 0;    // bisection probes whose tail min fell inside the band
};

/// Bisection on s in [0, 2] for the transition exponent of the products.
///
/// A probe s is above rho when the tail-window minimum of the log product is
/// negative. The window minimum is strictly decreasing in s, so the
/// classification is monotone. Both bracket ends must clear the +-20 band or
/// the horizon is too short to say anything.
inline DimensionResult hausdorff_dimension(const CantorSystem& system, std::size_t n_max,
                                           double tol) {
    if (n_max < 10) {
        throw InvalidArgument("n_max must be at least 10");
    }
    if (!(tol > 0.0)) {
        throw InvalidArgument("tolerance must be positive");
    }
    const ScaleTable scales(system, n_max);
    const std::size_t from = n_max / 2;
    auto tail_min = [&](double s) {
        double acc = 0.0;
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_max; ++k) {
            acc += scales.log_lambda(k, s);
            if (k + 1 >= from) {
                m = std::min(m, acc);
            }
        }
        return m;
    };
    const double at_low = tail_min(0.0);
    const double at_high = tail_min(2.0);
    if (!(at_low > kProfileThreshold) || !(at_high < -kProfileThreshold)) {
        throw Inconclusive("dimension classification inconclusive at horizon " +
                           std::to_string(n_max) + " (tail minima " + std::to_string(at_low) +
                           " at s=0, " + std::to_string(at_high) +
                           " at s=2); increase n_max");
    }
    DimensionResult r;
    r.horizon_used = n_max;
    double lo = 0.0, hi = 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double m = tail_min(mid);
        if (std::abs(m) < kProfileThreshold) {
            ++r.band_steps;
        }
        if (m < 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    r.s_low = lo;
    r.s_high = hi;
    r.rho = 0.5 * (lo + hi);
    r.profile_min = tail_min(r.rho);
    return r;
}

// ---------------------------------------------------------------------------
// Hausdorff measure bounds.

struct HausdorffMeasureBounds {
    double lower = 0.0;
    double upper = 0.0;
    double constant = 1.0;     // C = (a_lower * separation)^(-h)
    double separation = 0.0;   // empirical separation constant used in C
    bool diverges = false;     // upper reported as +infinity
    bool finite_horizon_proxy = true;
};

/// Natural-cover upper bound min_{1<=n<=n_max} prod lambda_{k,h}, with
/// diam(Q)^h normalized out, and the lower bound upper / C.
inline HausdorffMeasureBounds hausdorff_measure_bounds(const CantorSystem& system, double h,
                                                       std::size_t n_max) {
    if (n_max < 4) {
        throw InvalidArgument("n_max must be at least 4");
    }
    const auto profile = product_profile(system, h, n_max);
    HausdorffMeasureBounds b;
    b.separation = separation_constant(system, n_max);
    b.constant = std::pow(system.params().a_lower * b.separation, -h);
    const auto summary = summarize_profile(profile);
    if (summary.trend == ProfileTrend::grows) {
        b.diverges = true;
        b.upper = std::numeric_limits<double>::infinity();
        b.lower = std::numeric_limits<double>::infinity();
        return b;
    }
    b.upper = std::exp(window_min(profile, 1, n_max));
    b.lower = b.upper / b.constant;
    return b;
}

}  // namespace cantordim

#endif  // CANTORDIM_DIMENSION_HPP
