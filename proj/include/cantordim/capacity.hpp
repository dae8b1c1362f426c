#ifndef CANTORDIM_CAPACITY_HPP
#define CANTORDIM_CAPACITY_HPP

// Lower bound for the logarithmic capacity from the energy of nu_h.
//
// Coordinates are rescaled so that diam Q = 1. nu_h is discretized at a fixed
// depth onto cylinder centres; distinct cells interact through
// log(1 / |c_I - c_J|) and each cell carries a self-energy
// nu(I)^2 log(1 / (c_sep diam Q_I)).

#include <cmath>
#include <cstdint>
#include <vector>

#include "cantordim/conformal.hpp"
#include "cantordim/errors.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/parallel.hpp"

namespace cantordim {

struct CapacityBound {
    double h = 0.0;
    std::size_t depth = 0;
    double energy = 0.0;
    double kappa = 0.0;
};

/// nu_h at one depth, in coordinates with diam Q = 1.
struct DiscreteMeasure {
    std::vector<double> x, y;     // cell centres
    std::vector<double> mass;
    std::vector<double> diam;     // diam Q_I
    double separation = 0.0;      // c_sep

    std::size_t size() const noexcept { return mass.size(); }

    void translate(Complex shift) {
        for (std::size_t i = 0; i < size(); ++i) {
            x[i] += shift.real();
            y[i] += shift.imag();
        }
    }
};

inline DiscreteMeasure discretize_conformal(const CantorSystem& system, double h, std::size_t depth) {
    if (depth > kMaxEnumerationLevel) {
        throw InvalidArgument("capacity depth is capped at " + std::to_string(kMaxEnumerationLevel));
    }
    const ConformalMeasure nu(system, h);
    const std::size_t n = system.branch_count();
    const std::uint64_t count = ipow(n, depth);
    DiscreteMeasure d;
    d.x.resize(count);
    d.y.resize(count);
    d.mass.resize(count);
    d.diam.resize(count);
    nu.for_each_cylinder(depth, [&](std::uint64_t idx, double lm, double) { d.mass[idx] = std::exp(lm); });

    // Walk the cylinder tree once for centres and diameters.
    struct Frame {
        Complex scale;
        Complex anchor;
    };
    std::vector<Frame> level{{Complex(1.0, 0.0), Complex(0.0, 0.0)}};
    for (std::size_t l = 0; l < depth; ++l) {
        const auto gen = system.generation(l);
        std::vector<Frame> next;
        next.reserve(level.size() * n);
        for (const auto& f : level) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto& b = gen.branch(i);
                const Complex s = f.scale * b.scale;
                next.push_back({s, f.anchor - s * b.offset});
            }
        }
        level = std::move(next);
    }
    for (std::uint64_t i = 0; i < count; ++i) {
        const Complex c = (level[i].anchor + level[i].scale * Complex(0.5, 0.5)) / kBaseDiameter;
        d.x[i] = c.real();
        d.y[i] = c.imag();
        d.diam[i] = std::abs(level[i].scale);
    }
    d.separation = separation_constant(system, std::max<std::size_t>(depth, 1));
    return d;
}

/// Discrete logarithmic energy of a measure; double sum over i < j in fixed row chunks.
inline double discrete_energy(const DiscreteMeasure& d, std::size_t threads = 0) {
    const std::size_t m = d.size();
    constexpr std::size_t kRows = 64;
    const std::size_t chunks = (m + kRows - 1) / kRows;
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(chunks, resolve_threads(threads), [&](std::size_t c) {
        double acc = 0.0;
        const std::size_t end = std::min(m, (c + 1) * kRows);
        for (std::size_t i = c * kRows; i < end; ++i) {
            const double xi = d.x[i], yi = d.y[i];
            double row = 0.0;
            for (std::size_t j = i + 1; j < m; ++j) {
                const double dx = d.x[j] - xi, dy = d.y[j] - yi;
                row += d.mass[j] * std::log(dx * dx + dy * dy);
            }
            acc -= d.mass[i] * row;   // 2 * (1/2) log(1/d^2)
        }
        partial[c] = acc;
    });
    double energy = 0.0;
    for (double p : partial) {
        energy += p;
    }
    for (std::size_t i = 0; i < m; ++i) {
        energy += d.mass[i] * d.mass[i] * std::log(1.0 / (d.separation * d.diam[i]));
    }
    return energy;
}

inline CapacityBound capacity_lower_bound(const CantorSystem& system, double h, std::size_t depth,
                                          std::size_t threads = 0) {
    const auto& p = system.params();
    if (!(h > 0.0) || !(static_cast<double>(p.branch_count) * std::pow(p.a_lower, h) > 1.0)) {
        throw InvalidArgument("capacity bound needs h > 0 and N * a_lower^h > 1");
    }
    const auto d = discretize_conformal(system, h, depth);
    CapacityBound b;
    b.h = h;
    b.depth = depth;
    b.energy = discrete_energy(d, threads);
    b.kappa = std::exp(-b.energy);
    return b;
}

}  // namespace cantordim

#endif  // CANTORDIM_CAPACITY_HPP
