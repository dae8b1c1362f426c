// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cantordim.hpp"
#include "oracles.hpp"

using namespace cantordim;

namespace {

const double kRho = std::log(4.0) / std::log(6.0);

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = Clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s criterion %d: %s;%s (%.2f s)\n", c.ok ? "PASS" : "FAIL", id, title.c_str(),
                c.detail.str().c_str(), seconds_since(t0));
    std::fflush(stdout);
    failures += c.ok ? 0 : 1;
}

// Shared between criteria 4 and 5: the level-6 run at depth 8.
HarmonicMeasureEstimate g_fine;
bool g_fine_ready = false;

WalkConfig walk_config(std::size_t level, std::size_t threads) {
    WalkConfig w;
    w.depth = 8;
    w.report_level = level;
    w.walkers = 1000000;
    w.seed = 1;
    w.threads = threads;
    return w;
}

}  // namespace

int main() {
    report(1, "dimension solver closed forms", [](Check& c) {
        auto t0 = Clock::now();
        const auto a = hausdorff_dimension(fixtures::quarter_centered({1.0 / 6}), 2000, 1e-10);
        const double ta = seconds_since(t0);
        t0 = Clock::now();
        const auto b = hausdorff_dimension(fixtures::quarter_centered({1.0 / 6, 1.0 / 8}), 2000, 1e-10);
        const double tb = seconds_since(t0);
        const double ea = std::abs(a.rho - kRho), eb = std::abs(b.rho - std::log(16.0) / std::log(48.0));
        c.detail << " self-similar err " << ea << " in " << ta << " s, period-2 err " << eb << " in " << tb << " s";
        c.require(ea <= 1e-4, "self-similar within 1e-4");
        c.require(eb <= 1e-4, "period-2 within 1e-4");
        c.require(ta < 1.0 && tb < 1.0, "runtime < 1 s each");
    });

    report(2, "conformal measure exactness", [](Check& c) {
        double inv = 0.0, norm = 0.0;
        for (const auto& sys : {fixtures::drifting(), fixtures::quarter_centered({1.0 / 6, 1.0 / 8})}) {
            for (std::size_t start : {0u, 5u}) {
                const ConformalMeasure nu(sys, kRho, start);
                inv = std::max(inv, check_invariance(nu, 5));
                norm = std::max(norm, std::abs(level_mass_sum(nu, 10) - 1.0));
            }
        }
        c.detail << " invariance defect " << inv << ", level-10 normalization " << norm;
        c.require(inv <= 1e-10, "invariance <= 1e-10 at depth 5");
        c.require(norm <= 1e-12, "normalization <= 1e-12 at depth 10");
    });

    report(3, "regularizer on the drifting fixture", [](Check& c) {
        const auto sys = fixtures::drifting();
        const auto t0 = Clock::now();
        const auto res = regularize_zero_measure(sys, kRho, 400);
        const auto bounds = hausdorff_measure_bounds(res.modified, kRho, 400);
        const double elapsed = seconds_since(t0);
        double defect = 0.0, running = 0.0;
        for (const auto& cp : res.checkpoints) {
            defect = std::max(defect, std::abs(std::expm1(oracle::log_product(res.modified, kRho, cp.n))));
        }
        for (std::size_t n = 1; n <= 400; ++n) {
            running = std::min(running, std::expm1(oracle::log_product(res.modified, kRho, n)));
        }
        bool decreasing = !res.checkpoints.empty();
        for (std::size_t i = 1; i < res.checkpoints.size(); ++i) {
            decreasing = decreasing && res.checkpoints[i].epsilon < res.checkpoints[i - 1].epsilon;
        }
        const double d0 = hausdorff_dimension(sys, 100000, 1e-6).rho;
        const double d1 = hausdorff_dimension(res.modified, 100000, 1e-6).rho;
        c.detail << " " << res.checkpoints.size() << " checkpoints, defect " << defect << ", running min "
                 << 1.0 + running << ", dims " << d0 << " -> " << d1 << ", measure upper " << bounds.upper << ", "
                 << elapsed << " s";
        c.require(defect <= 1e-8, "checkpoint products 1 +- 1e-8");
        c.require(running >= -1e-8, "running products >= 1 - 1e-8");
        c.require(decreasing, "epsilon strictly decreasing");
        c.require(std::abs(d1 - d0) <= 2e-4, "dimension preserved within 2e-4");
        c.require(bounds.upper >= 0.99 && bounds.upper <= 1.01, "upper bound in [0.99, 1.01]");
        c.require(res.admissibility.admissible, "output admissible");
        c.require(elapsed < 10.0, "runtime < 10 s");
    });

    report(4, "harmonic measure by walk-on-spheres", [](Check& c) {
        const auto sys = fixtures::quarter_centered({1.0 / 6});
        auto t0 = Clock::now();
        const auto coarse = estimate_harmonic_measure(sys, walk_config(1, 1));
        const double t1 = seconds_since(t0);
        t0 = Clock::now();
        g_fine = estimate_harmonic_measure(sys, walk_config(6, 8));
        const double t8 = seconds_since(t0);
        g_fine_ready = true;
        double worst_z = 0.0;
        for (std::uint64_t i = 0; i < 4; ++i) {
            worst_z = std::max(worst_z, std::abs(coarse.mass(1, i) - 0.25) / coarse.standard_error(1, i));
        }
        bool refinement = true;
        for (std::size_t l = 0; l < 6; ++l) {
            for (std::size_t i = 0; i < g_fine.counts[l].size(); ++i) {
                std::uint64_t s = 0;
                for (std::size_t j = 0; j < 4; ++j) {
                    s += g_fine.counts[l + 1][4 * i + j];
                }
                refinement = refinement && s == g_fine.counts[l][i];
            }
        }
        const bool identical = coarse.counts[1] == g_fine.counts[1] && coarse.counts[0] == g_fine.counts[0] &&
                               coarse.total_steps == g_fine.total_steps && coarse.aborted == g_fine.aborted;
        c.detail << " masses";
        for (std::uint64_t i = 0; i < 4; ++i) {
            c.detail << " " << coarse.mass(1, i);
        }
        c.detail << ", worst |z| " << worst_z << ", aborted " << coarse.aborted_fraction() << ", 1 thread " << t1
                 << " s, 8 threads " << t8 << " s";
        c.require(worst_z <= 4.0, "each mass within 4 sigma of 0.25");
        c.require(refinement, "refinement consistency exact");
        c.require(identical, "bit-identical across 1 and 8 threads");
        c.require(coarse.aborted_fraction() < 1e-3, "aborted fraction < 0.1%");
        c.require(t1 < 120.0 && t8 < 120.0, "runtime < 2 min");
    });

    report(5, "dimension gap end to end", [](Check& c) {
        if (!g_fine_ready) {
            throw Error("harmonic run of criterion 4 unavailable");
        }
        const auto sys = fixtures::quarter_centered({1.0 / 6});
        const double rho = hausdorff_dimension(sys, 2000, 1e-10).rho;
        const auto omega = g_fine.to_level_measure();
        const auto nu = ConformalMeasure(sys, rho).materialize(6);
        const auto star = star_condition_scan(omega, nu, 2, 2, 3.0);
        const auto bp = bourgain_profile(omega, nu, 6);
        c.detail << " star " << star.statistic << " (lower edge " << star.lower_edge << "), beta_tilde "
                 << bp.beta_tilde << " CI [" << std::exp(bp.slope_ci_low) << ", " << std::exp(bp.slope_ci_high)
                 << "]";
        c.require(star.exceeds_one(), "star statistic > 1 beyond 3 standard errors");
        c.require(bp.decays_with_confidence(), "beta_tilde < 1 at 95% confidence");
        if (bp.beta_tilde < 1.0) {
            const auto gap = dimension_gap_report(bp, rho, sys.params().a_lower);
            c.detail << ", gap eps " << gap.epsilon << " at s " << gap.s;
            c.require(gap.epsilon > 0.0, "gap eps > 0");
        } else {
            c.require(false, "gap eps > 0");
        }
    });

    report(6, "beta(gamma) against a dense grid", [](Check& c) {
        double worst = 0.0;
        bool monotone = true;
        for (double q_min : {0.01, 0.03}) {
            double prev = 2.0;
            for (int i = 0; i < 20; ++i) {
                const double gamma = std::pow(10.0, i / 19.0);
                const double b = beta_from_gamma(gamma, 16, q_min);
                worst = std::max(worst, std::abs(b - oracle::beta_grid(gamma, 16, q_min)));
                monotone = monotone && b <= prev && b > 0.0 && b <= 1.0 + 1e-12;
                prev = b;
            }
        }
        c.detail << " worst deviation " << worst;
        c.require(worst <= 1e-8, "agreement 1e-8 on a 20-point gamma grid");
        c.require(monotone, "non-increasing in gamma");
    });

    report(7, "capacity lower bound", [](Check& c) {
        double worst = 0.0;
        for (const auto& sys : {fixtures::quarter_centered({1.0 / 6}), fixtures::quarter_centered({1.0 / 6, 1.0 / 8})}) {
            const auto k6 = capacity_lower_bound(sys, 0.5, 6);
            const auto k8 = capacity_lower_bound(sys, 0.5, 8);
            const double rel = std::abs(k6.kappa - k8.kappa) / k8.kappa;
            c.detail << " kappa " << k6.kappa << " / " << k8.kappa << ";";
            worst = std::max(worst, rel);
        }
        auto d = discretize_conformal(fixtures::quarter_centered({1.0 / 6}), 0.5, 6);
        const double e0 = discrete_energy(d);
        d.translate(Complex(12.5, -3.75));
        const double shift = std::abs(discrete_energy(d) - e0);
        c.detail << " worst relative gap " << worst << ", translation change " << shift;
        c.require(worst <= 0.05, "depth 6 vs 8 within 5%");
        c.require(shift <= 1e-12, "translation invariance 1e-12");
    });

    std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
