#ifndef CANTORDIM_GEOMETRY_HPP
#define CANTORDIM_GEOMETRY_HPP

// Base domain, generation maps, cylinder images and admissibility checks.
//
// The base domain Q is the closed unit square with corners (0,0) and (1,1).
// A branch of generation k is the inverse branch w -> a (w - b) of the
// expanding map z -> z / a + b, so its image of Q is the (possibly rotated)
// square a (Q - b). Branch symbols are 0-based in the API; their text form
// ("132") is 1-based.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cantordim/errors.hpp"

namespace cantordim {

using Complex = std::complex<double>;
using Word = std::vector<std::uint32_t>;

inline constexpr double kBaseDiameter = std::numbers::sqrt2;
inline constexpr double kGeometryTolerance = 1e-12;

struct AffineContraction {
    Complex scale{1.0, 0.0};
    Complex offset{0.0, 0.0};

    Complex inverse_apply(Complex w) const noexcept { return scale * (w - offset); }
    Complex forward_apply(Complex z) const noexcept { return z / scale + offset; }
    double modulus() const noexcept { return std::abs(scale); }

    friend bool operator==(const AffineContraction&, const AffineContraction&) = default;
};

struct GenerationMap {
    std::vector<AffineContraction> branches;
    std::size_t index = 0;

    std::size_t size() const noexcept { return branches.size(); }

    const AffineContraction& branch(std::size_t i) const {
        if (i >= branches.size()) {
            throw InvalidArgument("branch index " + std::to_string(i) + " out of range for " +
                                  std::to_string(branches.size()) + " branches");
        }
        return branches[i];
    }

    /// Image of w under the i-th inverse branch; lands in Q_{k,i} when w is in Q.
    Complex inverse_branch(std::size_t i, Complex w) const { return branch(i).inverse_apply(w); }

    friend bool operator==(const GenerationMap&, const GenerationMap&) = default;
};

inline Complex inverse_branch(const GenerationMap& map, std::size_t i, Complex w) {
    return map.inverse_branch(i, w);
}

struct SystemParams {
    std::size_t branch_count = 2;
    double a_lower = 0.0;
    double a_upper = 1.0;
    double modulus = 0.0;
    // Trust the declared modulus instead of requiring the round-annulus proxy to exceed it.
    bool assume_modulus = false;

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// A sequence of generation maps over the unit square.
///
/// Generations come from an explicit prefix followed by an optional lazy
/// source. Without a source the system has a hard horizon equal to the prefix
/// length, and asking for a later generation throws HorizonExceeded.
class CantorSystem {
public:
    using Source = std::function<GenerationMap(std::size_t)>;

    CantorSystem() = default;

    static CantorSystem explicit_system(const SystemParams& params,
                                        std::vector<std::vector<AffineContraction>> generations) {
        if (generations.empty()) {
            throw InvalidArgument("explicit system needs at least one generation");
        }
        CantorSystem sys(params);
        sys.prefix_.reserve(generations.size());
        for (std::size_t k = 0; k < generations.size(); ++k) {
            sys.prefix_.push_back(GenerationMap{std::move(generations[k]), k});
        }
        sys.validate_shape();
        return sys;
    }

    static CantorSystem periodic(const SystemParams& params,
                                 std::vector<std::vector<AffineContraction>> period) {
        if (period.empty()) {
            throw InvalidArgument("periodic system needs a non-empty period");
        }
        auto maps = std::make_shared<const std::vector<std::vector<AffineContraction>>>(
            std::move(period));
        CantorSystem sys(params);
        sys.period_ = maps->size();
        sys.source_ = [maps](std::size_t k) {
            return GenerationMap{(*maps)[k % maps->size()], k};
        };
        sys.validate_shape();
        return sys;
    }

    /// Unbounded system whose generation k is produced on demand.
    static CantorSystem generated(const SystemParams& params, Source source) {
        CantorSystem sys(params);
        sys.source_ = std::move(source);
        sys.validate_shape();
        return sys;
    }

    const SystemParams& params() const noexcept { return params_; }
    std::size_t branch_count() const noexcept { return params_.branch_count; }

    /// Number of available generations, or nullopt for unbounded systems.
    std::optional<std::size_t> horizon() const noexcept {
        if (source_) {
            return std::nullopt;
        }
        return prefix_.size();
    }

    std::optional<std::size_t> period() const noexcept {
        if (prefix_.empty() && period_ > 0) {
            return period_;
        }
        return std::nullopt;
    }

    bool has_generation(std::size_t k) const noexcept {
        return k < prefix_.size() || static_cast<bool>(source_);
    }

    void require_generations(std::size_t count) const {
        if (auto h = horizon(); h && count > *h) {
            throw HorizonExceeded("requested " + std::to_string(count) +
                                  " generations but the system horizon is " + std::to_string(*h));
        }
    }

    GenerationMap generation(std::size_t k) const {
        if (k < prefix_.size()) {
            return prefix_[k];
        }
        if (!source_) {
            throw HorizonExceeded("generation " + std::to_string(k) +
                                  " is beyond the system horizon " + std::to_string(prefix_.size()));
        }
        GenerationMap g = source_(k);
        g.index = k;
        if (g.size() != params_.branch_count) {
            throw InvalidArgument("generation " + std::to_string(k) + " has " +
                                  std::to_string(g.size()) + " branches, expected " +
                                  std::to_string(params_.branch_count));
        }
        return g;
    }

    /// Same generations under different parameters.
    CantorSystem with_params(const SystemParams& params) const {
        CantorSystem sys(params);
        sys.prefix_ = prefix_;
        sys.source_ = source_;
        sys.period_ = period_;
        sys.validate_shape();
        return sys;
    }

    /// Copy of this system with generations [0, prefix.size()) replaced.
    CantorSystem with_prefix(std::vector<GenerationMap> prefix, const SystemParams& params) const {
        CantorSystem sys(params);
        sys.source_ = source_;
        if (source_) {
            sys.period_ = 0;
        }
        sys.prefix_ = std::move(prefix);
        for (std::size_t k = 0; k < sys.prefix_.size(); ++k) {
            sys.prefix_[k].index = k;
        }
        if (!source_ && prefix_.size() > sys.prefix_.size()) {
            for (std::size_t k = sys.prefix_.size(); k < prefix_.size(); ++k) {
                sys.prefix_.push_back(prefix_[k]);
            }
        }
        sys.validate_shape();
        return sys;
    }

    /// Explicit prefix; generations produced by the lazy source are not included.
    const std::vector<GenerationMap>& explicit_generations() const noexcept { return prefix_; }

private:
    explicit CantorSystem(const SystemParams& params) : params_(params) {
        if (params.branch_count < 2) {
            throw InvalidArgument("a Cantor system needs at least two branches");
        }
        if (!(params.a_lower > 0.0 && params.a_lower <= params.a_upper && params.a_upper < 1.0)) {
            throw InvalidArgument("scale bounds must satisfy 0 < a_lower <= a_upper < 1");
        }
        if (!(params.modulus > 0.0)) {
            throw InvalidArgument("annulus modulus M must be positive");
        }
    }

    void validate_shape() const {
        for (const auto& g : prefix_) {
            if (g.size() != params_.branch_count) {
                throw InvalidArgument("generation " + std::to_string(g.index) + " has " +
                                      std::to_string(g.size()) + " branches, expected " +
                                      std::to_string(params_.branch_count));
            }
        }
    }

    SystemParams params_{};
    std::vector<GenerationMap> prefix_;
    Source source_;
    std::size_t period_ = 0;
};

// ---------------------------------------------------------------------------
// Words and flat cylinder indices.

/// Index of a word among the N^m words of its length, first symbol most significant.
inline std::uint64_t word_index(const Word& word, std::size_t branch_count) {
    std::uint64_t idx = 0;
    for (auto s : word) {
        if (s >= branch_count) {
            throw InvalidArgument("word symbol " + std::to_string(s + 1) + " exceeds N = " +
                                  std::to_string(branch_count));
        }
        idx = idx * branch_count + s;
    }
    return idx;
}

inline Word word_from_index(std::uint64_t index, std::size_t length, std::size_t branch_count) {
    Word w(length);
    for (std::size_t j = length; j-- > 0;) {
        w[j] = static_cast<std::uint32_t>(index % branch_count);
        index /= branch_count;
    }
    return w;
}

inline std::uint64_t ipow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

/// 1-based digit string for N <= 9, dot-separated 1-based symbols otherwise.
inline std::string word_to_string(const Word& word, std::size_t branch_count = 9) {
    std::string out;
    for (std::size_t j = 0; j < word.size(); ++j) {
        if (branch_count <= 9) {
            out.push_back(static_cast<char>('1' + word[j]));
        } else {
            if (j > 0) {
                out.push_back('.');
            }
            out += std::to_string(word[j] + 1);
        }
    }
    return out;
}

inline Word word_from_string(std::string_view text, std::size_t branch_count) {
    Word w;
    auto push = [&](unsigned long v) {
        if (v < 1 || v > branch_count) {
            throw InvalidArgument("word symbol " + std::to_string(v) + " outside 1.." +
                                  std::to_string(branch_count));
        }
        w.push_back(static_cast<std::uint32_t>(v - 1));
    };
    if (branch_count <= 9) {
        for (char c : text) {
            if (c < '1' || c > '9') {
                throw InvalidArgument("invalid word character '" + std::string(1, c) + "'");
            }
            push(static_cast<unsigned long>(c - '0'));
        }
    } else if (!text.empty()) {
        std::size_t start = 0;
        while (start <= text.size()) {
            auto end = text.find('.', start);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            push(std::stoul(std::string(text.substr(start, end - start))));
            start = end + 1;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Squares.

/// Affine image {A w + B : w in [0,1]^2} of the base square.
struct Square {
    Complex scale{1.0, 0.0};
    Complex anchor{0.0, 0.0};

    std::array<Complex, 4> corners() const noexcept {
        return {anchor, anchor + scale, anchor + scale * Complex(1.0, 1.0),
                anchor + scale * Complex(0.0, 1.0)};
    }

    Complex center() const noexcept { return anchor + scale * Complex(0.5, 0.5); }
    double diameter() const noexcept { return std::abs(scale) * kBaseDiameter; }

    /// Euclidean distance from p to the closed square, computed in its local frame.
    double distance(Complex p) const noexcept {
        const Complex u = (p - anchor) / scale;
        const double dx = std::max({-u.real(), 0.0, u.real() - 1.0});
        const double dy = std::max({-u.imag(), 0.0, u.imag() - 1.0});
        return std::abs(scale) * std::hypot(dx, dy);
    }

    bool contains(Complex p, double tol = kGeometryTolerance) const noexcept {
        return distance(p) <= tol;
    }

    /// Square image under w -> c.scale * (w - c.offset).
    Square mapped(const AffineContraction& c) const noexcept {
        return Square{c.scale * scale, c.scale * (anchor - c.offset)};
    }
};

inline Square branch_square(const AffineContraction& c) noexcept {
    return Square{c.scale, -c.scale * c.offset};
}

/// Cylinder word with the affine image Q_I of the base square.
struct Cylinder {
    Word word;
    std::size_t start_generation = 0;
    Complex composed_scale{1.0, 0.0};
    Complex anchor{0.0, 0.0};
    double diam = kBaseDiameter;

    Square square() const noexcept { return Square{composed_scale, anchor}; }
};

/// Q_I = phi_{k,i_0}( phi_{k+1,i_1}( ... phi_{k+m-1,i_{m-1}}(Q) ) ).
inline Cylinder cylinder_domain(const CantorSystem& system, const Word& word,
                                std::size_t start_generation = 0) {
    system.require_generations(start_generation + word.size());
    Cylinder c;
    c.word = word;
    c.start_generation = start_generation;
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};
    for (std::size_t j = 0; j < word.size(); ++j) {
        if (word[j] >= system.branch_count()) {
            throw InvalidArgument("word symbol " + std::to_string(word[j] + 1) + " exceeds N");
        }
        const AffineContraction br = system.generation(start_generation + j).branch(word[j]);
        // T o phi: w -> A a (w - b_br) + B
        b = b - a * br.scale * br.offset;
        a = a * br.scale;
    }
    c.composed_scale = a;
    c.anchor = b;
    c.diam = std::abs(a) * kBaseDiameter;
    return c;
}

// ---------------------------------------------------------------------------
// Admissibility.

namespace detail {

inline double polygon_gap(std::span<const Complex> a, std::span<const Complex> b) {
    // Largest separating-axis gap over edge normals of both convex polygons.
    double best = -std::numeric_limits<double>::infinity();
    auto scan = [&](std::span<const Complex> poly) {
        for (std::size_t i = 0; i < poly.size(); ++i) {
            Complex edge = poly[(i + 1) % poly.size()] - poly[i];
            Complex normal(-edge.imag(), edge.real());
            normal /= std::abs(normal);
            double amin = std::numeric_limits<double>::infinity(), amax = -amin;
            double bmin = amin, bmax = -amin;
            for (auto p : a) {
                double t = p.real() * normal.real() + p.imag() * normal.imag();
                amin = std::min(amin, t);
                amax = std::max(amax, t);
            }
            for (auto p : b) {
                double t = p.real() * normal.real() + p.imag() * normal.imag();
                bmin = std::min(bmin, t);
                bmax = std::max(bmax, t);
            }
            best = std::max(best, std::max(bmin - amax, amin - bmax));
        }
    };
    scan(a);
    scan(b);
    return best;
}

struct Circle {
    Complex center;
    double radius;
};

inline bool circle_covers(const Circle& c, std::span<const Complex> pts) {
    const double slack = 1e-12 * std::max(1.0, c.radius);
    return std::all_of(pts.begin(), pts.end(),
                       [&](Complex p) { return std::abs(p - c.center) <= c.radius + slack; });
}

/// Minimal enclosing circle by exhaustive search over pairs and triples; inputs are a few dozen points.
inline Circle minimal_enclosing_circle(std::span<const Complex> pts) {
    Circle best{pts.empty() ? Complex{} : pts[0], pts.empty() ? 0.0 : 0.0};
    double best_r = std::numeric_limits<double>::infinity();
    const std::size_t n = pts.size();
    if (n == 1) {
        return best;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Circle c{(pts[i] + pts[j]) * 0.5, std::abs(pts[i] - pts[j]) * 0.5};
            if (c.radius < best_r && circle_covers(c, pts)) {
                best = c;
                best_r = c.radius;
            }
            for (std::size_t k = j + 1; k < n; ++k) {
                Complex a = pts[i], b = pts[j], cc = pts[k];
                double d = 2.0 * (a.real() * (b.imag() - cc.imag()) +
                                  b.real() * (cc.imag() - a.imag()) +
                                  cc.real() * (a.imag() - b.imag()));
                if (std::abs(d) < 1e-18) {
                    continue;
                }
                double a2 = std::norm(a), b2 = std::norm(b), c2 = std::norm(cc);
                Complex center((a2 * (b.imag() - cc.imag()) + b2 * (cc.imag() - a.imag()) +
                                c2 * (a.imag() - b.imag())) / d,
                               (a2 * (cc.real() - b.real()) + b2 * (a.real() - cc.real()) +
                                c2 * (b.real() - a.real())) / d);
                Circle circ{center, std::abs(a - center)};
                if (circ.radius < best_r && circle_covers(circ, pts)) {
                    best = circ;
                    best_r = circ.radius;
                }
            }
        }
    }
    return best;
}

inline double distance_to_unit_square_boundary(Complex p) {
    if (p.real() < 0.0 || p.real() > 1.0 || p.imag() < 0.0 || p.imag() > 1.0) {
        return 0.0;
    }
    return std::min({p.real(), 1.0 - p.real(), p.imag(), 1.0 - p.imag()});
}

}  // namespace detail

struct GenerationCheck {
    std::size_t generation = 0;
    bool scale_ok = false;
    bool containment_ok = false;
    bool disjoint_ok = false;
    bool proxy_ok = false;
    // (1/2pi) log(R/r) for the round annulus around the children's enclosing circle.
    double modulus_proxy = 0.0;

    bool ok() const noexcept { return scale_ok && containment_ok && disjoint_ok && proxy_ok; }
};

struct AdmissibilityReport {
    std::vector<GenerationCheck> generations;
    bool admissible = false;
    bool modulus_declared = false;  // proxy check overridden by params.assume_modulus
    double min_modulus_proxy = std::numeric_limits<double>::infinity();
    std::string failure;
};

inline GenerationCheck check_generation(const GenerationMap& map, const SystemParams& params) {
    GenerationCheck chk;
    chk.generation = map.index;
    chk.scale_ok = std::all_of(map.branches.begin(), map.branches.end(), [&](const auto& b) {
        double m = b.modulus();
        return m >= params.a_lower * (1.0 - 1e-14) && m <= params.a_upper * (1.0 + 1e-14);
    });

    std::vector<std::array<Complex, 4>> squares;
    squares.reserve(map.size());
    chk.containment_ok = true;
    std::vector<Complex> all;
    for (const auto& b : map.branches) {
        auto c = branch_square(b).corners();
        squares.push_back(c);
        for (auto p : c) {
            all.push_back(p);
            if (!(p.real() > kGeometryTolerance && p.real() < 1.0 - kGeometryTolerance &&
                  p.imag() > kGeometryTolerance && p.imag() < 1.0 - kGeometryTolerance)) {
                chk.containment_ok = false;
            }
        }
    }
    chk.disjoint_ok = true;
    for (std::size_t i = 0; i < squares.size() && chk.disjoint_ok; ++i) {
        for (std::size_t j = i + 1; j < squares.size(); ++j) {
            if (detail::polygon_gap(squares[i], squares[j]) <= kGeometryTolerance) {
                chk.disjoint_ok = false;
                break;
            }
        }
    }
    auto circle = detail::minimal_enclosing_circle(all);
    double outer = detail::distance_to_unit_square_boundary(circle.center);
    chk.modulus_proxy = (outer > circle.radius && circle.radius > 0.0)
                            ? std::log(outer / circle.radius) / (2.0 * std::numbers::pi)
                            : -std::numeric_limits<double>::infinity();
    chk.proxy_ok = params.assume_modulus || chk.modulus_proxy > params.modulus;
    return chk;
}

/// Checks the first min(horizon, max_generations) generations.
inline AdmissibilityReport check_admissible(const CantorSystem& system,
                                            std::size_t max_generations = 1024) {
    AdmissibilityReport rep;
    rep.modulus_declared = system.params().assume_modulus;
    std::size_t count = max_generations;
    if (auto h = system.horizon()) {
        count = std::min(count, *h);
    } else if (auto p = system.period()) {
        count = std::min(count, *p);
    }
    rep.admissible = true;
    for (std::size_t k = 0; k < count; ++k) {
        auto chk = check_generation(system.generation(k), system.params());
        rep.min_modulus_proxy = std::min(rep.min_modulus_proxy, chk.modulus_proxy);
        if (!chk.ok() && rep.admissible) {
            rep.admissible = false;
            rep.failure = "generation " + std::to_string(k) + ": " +
                          (!chk.scale_ok         ? "scale bound"
                           : !chk.containment_ok ? "strict containment"
                           : !chk.disjoint_ok    ? "disjoint closures"
                                                 : "annulus modulus proxy");
        }
        rep.generations.push_back(chk);
    }
    return rep;
}

/// Empirical separation constant: min over generations l < levels and words J
/// of length `subword_depth` of dist(Q^{(l)}_J, boundary Q) / diam Q.
///
/// By affine self-similarity this equals min dist(z, boundary Q_I) / diam Q_I
/// over z in Q_{IJ}, for every cylinder I ending at generation l.
inline double separation_constant(const CantorSystem& system, std::size_t levels,
                                  std::size_t subword_depth = 1) {
    if (subword_depth == 0) {
        throw InvalidArgument("subword depth must be at least 1");
    }
    system.require_generations(levels + subword_depth - 1);
    const std::size_t n = system.branch_count();
    const std::uint64_t words = ipow(n, subword_depth);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < std::max<std::size_t>(levels, 1); ++l) {
        for (std::uint64_t w = 0; w < words; ++w) {
            auto cyl = cylinder_domain(system, word_from_index(w, subword_depth, n), l);
            for (auto p : cyl.square().corners()) {
                best = std::min(best, detail::distance_to_unit_square_boundary(p) / kBaseDiameter);
            }
        }
    }
    return best;
}

}  // namespace cantordim

#endif  // CANTORDIM_GEOMETRY_HPP
