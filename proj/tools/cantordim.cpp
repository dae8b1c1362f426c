// cantordim: command-line front end for the cantordim library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cantordim.hpp"

namespace fs = std::filesystem;
using namespace cantordim;

namespace {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfig = 2,
    kInconclusive = 3,
    kMonteCarlo = 4,
    kMissingDependency = 5,
};

constexpr const char* kExitTable =
    "Exit codes:\n"
    "  0  success\n"
    "  1  unexpected failure\n"
    "  2  configuration or argument error\n"
    "  3  inconclusive classification\n"
    "  4  Monte Carlo quality (aborted fraction above 1%)\n"
    "  5  missing dependency (harmonic cache required)\n";

class MissingDependency : public Error {
public:
    using Error::Error;
};

struct Common {
    std::string config_path;
    std::string out_dir;
    std::string prefix;
};

struct Run {
    SystemConfig config;
    CantorSystem system;
    std::string hash;
    fs::path dir;
    std::string prefix;

    fs::path file(const std::string& suffix) const { return dir / (prefix + "_" + suffix); }
};

Run load(const Common& c) {
    Run r;
    r.config = load_config(c.config_path);
    r.system = build_system(r.config);
    r.hash = config_hash(r.config);
    r.dir = c.out_dir.empty() ? fs::path(r.config.outputs.directory) : fs::path(c.out_dir);
    r.prefix = c.prefix.empty() ? r.config.outputs.prefix : c.prefix;
    fs::create_directories(r.dir);
    return r;
}

Json stamp(const Run& r, Json doc) {
    doc["config_hash"] = r.hash;
    doc["version"] = kVersion;
    return doc;
}

void emit(const Run& r, const std::string& name, const Json& doc) {
    const auto path = r.file(name + ".json");
    std::ofstream(path) << doc.dump(2) << "\n";
    std::cout << doc.dump(2) << "\n";
}

/// Explicit systems cap the dimension horizon at their generation count.
std::size_t capped(const CantorSystem& system, std::size_t n_max) {
    return system.horizon() ? std::min(n_max, *system.horizon()) : n_max;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// ---------------------------------------------------------------------------

struct DimArgs {
    std::size_t n_max = 100000;
    double tol = 1e-8;
};

int cmd_dim(const Common& common, const DimArgs& a) {
    const Run r = load(common);
    const std::size_t n_max = capped(r.system, a.n_max);
    const auto d = hausdorff_dimension(r.system, n_max, a.tol);
    const auto profile = product_profile(r.system, d.rho, n_max);
    const auto csv = r.file("profile.csv");
    std::ofstream out(csv);
    out << "# config_hash=" << r.hash << " version=" << kVersion << "\n";
    out << "n,log_product\n";
    for (std::size_t n = 0; n < profile.size(); ++n) {
        out << n << "," << fmt(profile[n]) << "\n";
    }
    Json doc{{"rho", d.rho},
             {"bracket", {d.s_low, d.s_high}},
             {"horizon", d.horizon_used},
             {"band_steps", d.band_steps},
             {"profile_min", d.profile_min},
             {"profile_path", csv.string()}};
    emit(r, "dim", stamp(r, doc));
    return kOk;
}

// ---------------------------------------------------------------------------

struct MeasureArgs {
    std::optional<double> exponent;
    std::size_t level = 4;
    std::size_t n_max = 100000;
};

int cmd_measure(const Common& common, const MeasureArgs& a) {
    const Run r = load(common);
    const double h =
        a.exponent ? *a.exponent : hausdorff_dimension(r.system, capped(r.system, a.n_max), 1e-10).rho;
    const ConformalMeasure nu(r.system, h);
    const auto csv = r.file("measure.csv");
    std::ofstream out(csv);
    out << "# config_hash=" << r.hash << " version=" << kVersion << "\n";
    out << "word,mass,log_scale\n";
    const std::size_t n = r.system.branch_count();
    nu.for_each_cylinder(a.level, [&](std::uint64_t idx, double lm, double la) {
        out << word_to_string(word_from_index(idx, a.level, n), n) << "," << fmt(std::exp(lm)) << ","
            << fmt(la) << "\n";
    });
    const auto local = local_dimension_profile(nu, std::max<std::size_t>(a.level, 1));
    Json doc{{"exponent", h},
             {"level", a.level},
             {"mass_sum", level_mass_sum(nu, a.level)},
             {"invariance_defect", check_invariance(nu, std::min<std::size_t>(a.level, 5))},
             {"local_dimension", local.with_constant},
             {"table_path", csv.string()}};
    emit(r, "measure", stamp(r, doc));
    return kOk;
}

// ---------------------------------------------------------------------------

struct RegularizeArgs {
    std::size_t horizon = 400;
    std::optional<double> rho;
    std::size_t n_max = 100000;
};

int cmd_regularize(const Common& common, const RegularizeArgs& a) {
    const Run r = load(common);
    const double rho = a.rho ? *a.rho : hausdorff_dimension(r.system, capped(r.system, a.n_max), 1e-10).rho;
    const auto res = regularize(r.system, rho, a.horizon);
    Json checkpoints = Json::array();
    for (const auto& c : res.checkpoints) {
        checkpoints.push_back({{"n", c.n}, {"epsilon", c.epsilon}});
    }
    const auto& p = res.modified.params();

    // The regularized prefix as a standalone explicit configuration.
    SystemConfig out_cfg;
    out_cfg.branch_count = p.branch_count;
    out_cfg.a_lower = p.a_lower;
    out_cfg.a_upper = p.a_upper;
    out_cfg.modulus = p.modulus;
    out_cfg.assume_modulus = p.assume_modulus;
    out_cfg.seed = r.config.seed;
    out_cfg.outputs = r.config.outputs;
    for (std::size_t k = 0; k < a.horizon; ++k) {
        std::vector<BranchSpec> gen;
        for (const auto& b : res.modified.generation(k).branches) {
            gen.push_back({b.scale.real(), b.scale.imag(), b.offset.real(), b.offset.imag()});
        }
        out_cfg.generations.push_back(std::move(gen));
    }
    const auto cfg_path = r.file("regularized.json");
    std::ofstream(cfg_path) << to_json(out_cfg).dump(2) << "\n";

    Json doc{{"rho", rho},
             {"case", to_string(res.case_tag)},
             {"checkpoints", checkpoints},
             {"delta_sequence", res.delta_sequence},
             {"block_boundaries", res.block_boundaries},
             {"horizon", a.horizon},
             {"horizon_limited", res.horizon_limited},
             {"max_checkpoint_defect", res.max_checkpoint_defect},
             {"min_running_log_product", res.min_running_log_product},
             {"a_lower", p.a_lower},
             {"a_upper", p.a_upper},
             {"admissible", res.admissibility.admissible},
             {"regularized_config", cfg_path.string()}};
    emit(r, "regularize", stamp(r, doc));
    return kOk;
}

// ---------------------------------------------------------------------------

struct HarmonicArgs {
    WalkConfig walk;
    bool seed_given = false;
};

int cmd_harmonic(const Common& common, HarmonicArgs a) {
    const Run r = load(common);
    if (!a.seed_given) {
        a.walk.seed = r.config.seed;
    }
    const auto est = estimate_harmonic_measure(r.system, a.walk);
    const std::size_t n = r.system.branch_count();
    const std::size_t m = a.walk.report_level;
    const auto csv = r.file("harmonic.csv");
    std::ofstream out(csv);
    out << "word,mass,stderr,hits\n";
    for (std::uint64_t i = 0; i < est.counts[m].size(); ++i) {
        out << word_to_string(word_from_index(i, m, n), n) << "," << fmt(est.mass(m, i)) << ","
            << fmt(est.standard_error(m, i)) << "," << est.counts[m][i] << "\n";
    }
    Json doc{{"total", est.total},
             {"aborted", est.aborted},
             {"aborted_fraction", est.aborted_fraction()},
             {"flagged", est.flagged()},
             {"seed", a.walk.seed},
             {"depth", a.walk.depth},
             {"level", m},
             {"mean_steps", double(est.total_steps) / double(est.total)},
             {"table_path", csv.string()}};
    emit(r, "harmonic", stamp(r, doc));
    return est.flagged() ? kMonteCarlo : kOk;
}

/// Level-m harmonic table written by `harmonic`, lifted to every coarser level.
LevelMeasure read_harmonic_table(const std::string& path, std::size_t branch_count) {
    std::ifstream in(path);
    if (!in) {
        throw MissingDependency("harmonic table " + path + " not found");
    }
    std::string line;
    std::getline(in, line);
    if (line != "word,mass,stderr,hits") {
        throw ConfigError(path, "unexpected header \"" + line + "\"");
    }
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::size_t level = 0;
    bool first = true;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) {
            f.push_back(cell);
        }
        if (line.back() == ',') {
            f.emplace_back();
        }
        if (f.size() != 4) {
            throw ConfigError(path + ":" + std::to_string(lineno), "expected 4 columns");
        }
        const Word w = word_from_string(f[0], branch_count);
        if (first) {
            level = w.size();
            first = false;
        } else if (w.size() != level) {
            throw ConfigError(path + ":" + std::to_string(lineno), "mixed word lengths");
        }
        rows.emplace_back(word_index(w, branch_count), std::stod(f[3]));
    }
    std::vector<double> hits(ipow(branch_count, level), 0.0);
    double total = 0.0;
    for (auto [i, h] : rows) {
        hits[i] = h;
        total += h;
    }
    std::vector<double> mass(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
        mass[i] = hits[i] / total;
    }
    return aggregate_levels(branch_count, std::move(mass), std::move(hits));
}

// ---------------------------------------------------------------------------

struct ScanArgs {
    std::string harmonic_table;
    std::size_t level = 2;
    std::size_t depth = 2;
    std::size_t n_max = 100000;
};

Json star_json(const StarReport& s, std::size_t n) {
    Json cells = Json::array();
    for (const auto& c : s.cells) {
        cells.push_back({{"word", word_to_string(word_from_index(c.index, s.level, n), n)},
                         {"statistic", c.statistic},
                         {"stderr", c.std_error},
                         {"witness", word_to_string(c.witness, n)},
                         {"hits", c.hits},
                         {"insufficient", c.insufficient}});
    }
    return {{"level", s.level},         {"depth", s.depth},
            {"statistic", s.statistic}, {"statistic_stderr", s.statistic_stderr},
            {"lower_edge", s.lower_edge}, {"z", s.z},
            {"exceeds_one", s.exceeds_one()}, {"insufficient", s.insufficient},
            {"cells", cells}};
}

int cmd_scan(const Common& common, const ScanArgs& a) {
    const Run r = load(common);
    const std::size_t n = r.system.branch_count();
    const auto omega = read_harmonic_table(a.harmonic_table, n);
    const double rho = hausdorff_dimension(r.system, capped(r.system, a.n_max), 1e-10).rho;
    const auto nu = ConformalMeasure(r.system, rho).materialize(omega.max_level());
    const auto s = star_condition_scan(omega, nu, a.level, a.depth);
    Json doc = star_json(s, n);
    doc["rho"] = rho;
    emit(r, "scan", stamp(r, doc));
    return kOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
    std::string harmonic_table;
    bool no_mc = false;
    bool nu_as_omega = false;
    std::size_t level = 2;
    std::size_t depth = 2;
    std::size_t n_max = 100000;
    WalkConfig walk;
    bool seed_given = false;
};

int cmd_report(const Common& common, ReportArgs a) {
    const Run r = load(common);
    const std::size_t n = r.system.branch_count();
    const double rho = hausdorff_dimension(r.system, capped(r.system, a.n_max), 1e-10).rho;
    Json caveats = Json::array();

    LevelMeasure omega;
    if (a.nu_as_omega) {
        omega = ConformalMeasure(r.system, rho).materialize(a.walk.report_level);
        caveats.push_back("conformal measure substituted for harmonic measure (test mode)");
    } else if (!a.harmonic_table.empty()) {
        omega = read_harmonic_table(a.harmonic_table, n);
    } else if (a.no_mc) {
        throw MissingDependency("--no-mc requires --harmonic <table>");
    } else {
        if (!a.seed_given) {
            a.walk.seed = r.config.seed;
        }
        const auto est = estimate_harmonic_measure(r.system, a.walk);
        if (est.flagged()) {
            caveats.push_back("aborted fraction above 1%");
        }
        omega = est.to_level_measure();
    }
    const std::size_t levels = omega.max_level();
    const auto nu = ConformalMeasure(r.system, rho).materialize(levels);
    const auto star = star_condition_scan(omega, nu, a.level, a.depth);
    const auto bp = bourgain_profile(omega, nu, levels);

    Json doc{{"rho", rho},
             {"star_statistic", star.statistic},
             {"star_stderr", star.statistic_stderr},
             {"star_lower_edge", star.lower_edge},
             {"star_exceeds_one", star.exceeds_one()},
             {"beta_tilde", bp.beta_tilde},
             {"beta_tilde_ci", {std::exp(bp.slope_ci_low), std::exp(bp.slope_ci_high)}},
             {"bourgain_sums", bp.sums},
             {"levels", levels}};
    if (!bp.decays_with_confidence()) {
        caveats.push_back("Bourgain sums do not decay at 95% confidence");
    }
    std::optional<DimensionGap> gap;
    if (bp.beta_tilde < 1.0) {
        try {
            gap = dimension_gap_report(bp, rho, r.system.params().a_lower);
        } catch (const InvalidArgument&) {
            caveats.push_back("no gap at grid resolution 1e-4");
        }
    } else {
        caveats.push_back("no gap: beta_tilde >= 1");
    }
    if (gap) {
        doc["gap_epsilon"] = gap->epsilon;
        doc["gap_s"] = gap->s;
        doc["beta_hat"] = gap->beta_hat;
        doc["harmonic_dimension_upper"] = rho - gap->epsilon;
        caveats.push_back(gap->caveat);
    }
    doc["caveats"] = caveats;
    emit(r, "report", stamp(r, doc));
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config_path, "system configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out-dir", c.out_dir, "output directory (default: config outputs.directory)");
    sub->add_option("--prefix", c.prefix, "output file prefix (default: config outputs.prefix)");
}

void add_walk(CLI::App* sub, WalkConfig& w, bool& seed_given) {
    sub->add_option("--depth", w.depth, "approximation level n of K_n")->capture_default_str();
    sub->add_option("--level", w.report_level, "report level m <= depth - 2")->capture_default_str();
    sub->add_option("--walkers", w.walkers, "number of walkers")->capture_default_str();
    sub->add_option("--start-radius", w.start_radius_factor, "start radius in units of diam Q")
        ->capture_default_str();
    sub->add_option("--termination", w.termination_rel, "termination band relative to the smallest cylinder")
        ->capture_default_str();
    sub->add_option("--max-steps", w.max_steps, "step cap per walker")->capture_default_str();
    sub->add_option("--threads", w.threads, "worker threads (0: all; CANTORDIM_THREADS caps)")
        ->capture_default_str();
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](std::uint64_t s) {
            w.seed = s;
            seed_given = true;
        },
        "RNG seed (default: config seed)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimension, conformal and harmonic measures of non-homogeneous planar Cantor sets",
                 "cantordim"};
    app.footer(kExitTable);
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Common common;
    DimArgs dim;
    auto* s_dim = app.add_subcommand("dim", "Hausdorff dimension by bisection on the lambda products");
    add_common(s_dim, common);
    s_dim->add_option("--n-max", dim.n_max, "horizon")->capture_default_str();
    s_dim->add_option("--tol", dim.tol, "bisection tolerance")->capture_default_str();

    MeasureArgs measure;
    auto* s_measure = app.add_subcommand("measure", "Conformal measure table at one level");
    add_common(s_measure, common);
    s_measure->add_option("--exponent", measure.exponent, "exponent h (default: the dimension)");
    s_measure->add_option("--level", measure.level, "cylinder level")->capture_default_str();
    s_measure->add_option("--n-max", measure.n_max, "horizon for the dimension")->capture_default_str();

    RegularizeArgs reg;
    auto* s_reg = app.add_subcommand("regularize", "Perturb the scales so the dimension-measure is finite and positive");
    add_common(s_reg, common);
    s_reg->add_option("--horizon", reg.horizon, "number of generations to modify")->capture_default_str();
    s_reg->add_option("--rho", reg.rho, "critical exponent (default: the dimension)");
    s_reg->add_option("--n-max", reg.n_max, "horizon for the dimension")->capture_default_str();

    HarmonicArgs harm;
    harm.walk.depth = 8;
    harm.walk.report_level = 6;
    auto* s_harm = app.add_subcommand("harmonic", "Harmonic measure at infinity by walk-on-spheres");
    add_common(s_harm, common);
    add_walk(s_harm, harm.walk, harm.seed_given);

    ScanArgs scan;
    auto* s_scan = app.add_subcommand("scan", "Discrepancy scan of harmonic against conformal measure");
    add_common(s_scan, common);
    s_scan->add_option("--harmonic", scan.harmonic_table, "table written by `harmonic`")->required();
    s_scan->add_option("-L,--scan-level", scan.level, "scan level L")->capture_default_str();
    s_scan->add_option("-K,--subword-depth", scan.depth, "subword depth K")->capture_default_str();
    s_scan->add_option("--n-max", scan.n_max, "horizon for the dimension")->capture_default_str();

    ReportArgs rep;
    rep.walk.depth = 8;
    rep.walk.report_level = 6;
    auto* s_rep = app.add_subcommand("report", "Scan, Bourgain sums and dimension gap in one document");
    add_common(s_rep, common);
    add_walk(s_rep, rep.walk, rep.seed_given);
    s_rep->add_option("--harmonic", rep.harmonic_table, "reuse a table written by `harmonic`");
    s_rep->add_flag("--no-mc", rep.no_mc, "never run walkers; requires --harmonic");
    s_rep->add_flag("--nu-as-omega", rep.nu_as_omega, "use the conformal measure in place of harmonic (test mode)");
    s_rep->add_option("-L,--scan-level", rep.level, "scan level L")->capture_default_str();
    s_rep->add_option("-K,--subword-depth", rep.depth, "subword depth K")->capture_default_str();
    s_rep->add_option("--n-max", rep.n_max, "horizon for the dimension")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*s_dim) return cmd_dim(common, dim);
        if (*s_measure) return cmd_measure(common, measure);
        if (*s_reg) return cmd_regularize(common, reg);
        if (*s_harm) return cmd_harmonic(common, harm);
        if (*s_scan) return cmd_scan(common, scan);
        if (*s_rep) return cmd_report(common, rep);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kConfig;
    } catch (const Inconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return kInconclusive;
    } catch (const MissingDependency& e) {
        std::cerr << "missing dependency: " << e.what() << "\n";
        return kMissingDependency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
