#ifndef CANTORDIM_FIXTURES_HPP
#define CANTORDIM_FIXTURES_HPP

// Ready-made four-branch systems used by the CLI generators and the tests.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "cantordim/geometry.hpp"

namespace cantordim::fixtures {

inline constexpr std::array<Complex, 4> kQuarterCenters = {
    Complex(0.25, 0.25), Complex(0.75, 0.25), Complex(0.25, 0.75), Complex(0.75, 0.75)};

/// Branch whose image is a square of side |a| centered at `center` (rotated by arg a).
inline AffineContraction centered_branch(Complex scale, Complex center) {
    // a (Q - b) has center a ((1+i)/2 - b)
    return AffineContraction{scale, Complex(0.5, 0.5) - center / scale};
}

inline std::vector<AffineContraction> quarter_centered_generation(const std::array<Complex, 4>& scales) {
    std::vector<AffineContraction> g;
    for (std::size_t i = 0; i < 4; ++i) {
        g.push_back(centered_branch(scales[i], kQuarterCenters[i]));
    }
    return g;
}

inline std::vector<AffineContraction> quarter_centered_generation(double scale) {
    return quarter_centered_generation({scale, scale, scale, scale});
}

inline SystemParams default_params(double a_lower, double a_upper, double modulus = 0.005) {
    return SystemParams{4, a_lower, a_upper, modulus, false};
}

/// Periodic four-corner system: squares centered at the quarter points,
/// generation k using period_scales[k % p].
inline CantorSystem quarter_centered(const std::vector<double>& period_scales,
                                     double modulus = 0.005) {
    double lo = 1.0, hi = 0.0;
    std::vector<std::vector<AffineContraction>> period;
    for (double s : period_scales) {
        lo = std::min(lo, std::abs(s));
        hi = std::max(hi, std::abs(s));
        period.push_back(quarter_centered_generation(s));
    }
    return CantorSystem::periodic(default_params(lo, hi, modulus), std::move(period));
}

/// Offsets placing the side-a squares at corners a(1,1), a(3,1), a(1,3), a(3,3).
/// Rescaling a with these offsets fixed scales the configuration about the
/// origin; the modulus proxy is then independent of a up to a ~ 0.213.
inline constexpr std::array<Complex, 4> kAnchoredOffsets = {
    Complex(-1.0, -1.0), Complex(-3.0, -1.0), Complex(-1.0, -3.0), Complex(-3.0, -3.0)};

inline std::vector<AffineContraction> anchored_generation(double scale) {
    std::vector<AffineContraction> g;
    for (auto b : kAnchoredOffsets) {
        g.push_back(AffineContraction{Complex(scale, 0.0), b});
    }
    return g;
}

/// Unbounded anchored four-branch system with generation scale scale_of(k).
inline CantorSystem anchored(std::function<double(std::size_t)> scale_of, double a_lower,
                             double a_upper, double modulus = 0.005) {
    return CantorSystem::generated(default_params(a_lower, a_upper, modulus),
                                   [scale_of = std::move(scale_of)](std::size_t k) {
                                       return GenerationMap{anchored_generation(scale_of(k)), k};
                                   });
}

/// a_k = (1/6)(1 - 1/(k+2)): zero rho-measure at rho = log 4 / log 6.
inline CantorSystem drifting() {
    return anchored([](std::size_t k) { return (1.0 / 6.0) * (1.0 - 1.0 / (k + 2.0)); },
                    1.0 / 12.0, 1.0 / 6.0);
}

/// Scales with lambda_{k,rho} = 1 + 1/(k+2)^2 at rho = log 4 / log 6 (convergent
/// product), generations counted from k = 1.
inline CantorSystem convergent_excess() {
    const double rho = std::log(4.0) / std::log(6.0);
    return anchored(
        [rho](std::size_t k) {
            const double g = static_cast<double>(k) + 1.0;
            return (1.0 / 6.0) * std::pow(1.0 + 1.0 / ((g + 2.0) * (g + 2.0)), 1.0 / rho);
        },
        1.0 / 6.0, 0.2);
}

/// a_k = min((1/6)(1 + 1/(k+2)), 0.199): products at rho grow polynomially.
inline CantorSystem growing() {
    return anchored(
        [](std::size_t k) { return std::min((1.0 / 6.0) * (1.0 + 1.0 / (k + 2.0)), 0.199); },
        1.0 / 6.0, 0.199);
}

}  // namespace cantordim::fixtures

#endif  // CANTORDIM_FIXTURES_HPP
