#ifndef CANTORDIM_CONFIG_HPP
#define CANTORDIM_CONFIG_HPP

// JSON system configuration.
//
//   {
//     "branch_count": 4, "a_lower": 0.1, "a_upper": 0.2, "modulus": 0.005,
//     "assume_modulus": false, "seed": 1,
//     "generations": [[[sr, si, or, oi], ...], ...], "periodic": true,
//     "generator": {"name": "quarter_centered", "period_scales": [0.1666]},
//     "outputs": {"directory": "out", "prefix": "run"}
//   }
//
// Exactly one of "generations" and "generator" is required. Bounds and the
// branch count default to values derived from the generations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cantordim/errors.hpp"
#include "cantordim/fixtures.hpp"
#include "cantordim/geometry.hpp"
#include "cantordim/version.hpp"

namespace cantordim {

using Json = nlohmann::json;

struct BranchSpec {
    double scale_re = 0.0, scale_im = 0.0, offset_re = 0.0, offset_im = 0.0;

    friend bool operator==(const BranchSpec&, const BranchSpec&) = default;
};

struct GeneratorSpec {
    std::string name;
    Json params = Json::object();   // every member except "name"

    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct OutputSpec {
    std::string directory = ".";
    std::string prefix = "cantordim";

    friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct SystemConfig {
    std::optional<std::size_t> branch_count;
    std::optional<double> a_lower;
    std::optional<double> a_upper;
    double modulus = 0.005;
    bool assume_modulus = false;
    std::uint64_t seed = 1;
    std::vector<std::vector<BranchSpec>> generations;
    bool periodic = false;
    std::optional<GeneratorSpec> generator;
    OutputSpec outputs;

    friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

inline constexpr const char* kGeneratorNames[] = {"quarter_centered", "anchored", "drifting",
                                                  "convergent_excess", "growing"};

namespace detail {

inline const Json& require_field(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) {
        throw ConfigError(path + "." + key, "missing required field");
    }
    return obj.at(key);
}

inline double as_number(const Json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number, got " + std::string(v.type_name()));
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        throw ConfigError(path, "expected a finite number");
    }
    return d;
}

inline std::uint64_t as_unsigned(const Json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool as_bool(const Json& v, const std::string& path) {
    if (!v.is_boolean()) {
        throw ConfigError(path, "expected a boolean");
    }
    return v.get<bool>();
}

inline std::string as_string(const Json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return v.get<std::string>();
}

inline double param_number(const GeneratorSpec& g, const char* key, double fallback) {
    if (!g.params.contains(key)) {
        return fallback;
    }
    return as_number(g.params.at(key), std::string("$.generator.") + key);
}

}  // namespace detail

inline SystemConfig parse_config(const Json& doc) {
    using namespace detail;
    if (!doc.is_object()) {
        throw ConfigError("$", "expected a JSON object");
    }
    static const std::vector<std::string> known = {"branch_count", "a_lower", "a_upper", "modulus",
                                                   "assume_modulus", "seed", "generations", "periodic",
                                                   "generator", "outputs"};
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("$." + key, "unknown field");
        }
    }
    SystemConfig c;
    if (doc.contains("branch_count")) {
        c.branch_count = as_unsigned(doc.at("branch_count"), "$.branch_count");
    }
    if (doc.contains("a_lower")) {
        c.a_lower = as_number(doc.at("a_lower"), "$.a_lower");
    }
    if (doc.contains("a_upper")) {
        c.a_upper = as_number(doc.at("a_upper"), "$.a_upper");
    }
    if (doc.contains("modulus")) {
        c.modulus = as_number(doc.at("modulus"), "$.modulus");
    }
    if (doc.contains("assume_modulus")) {
        c.assume_modulus = as_bool(doc.at("assume_modulus"), "$.assume_modulus");
    }
    if (doc.contains("seed")) {
        c.seed = as_unsigned(doc.at("seed"), "$.seed");
    }
    if (doc.contains("periodic")) {
        c.periodic = as_bool(doc.at("periodic"), "$.periodic");
    }
    const bool has_gens = doc.contains("generations");
    const bool has_gen = doc.contains("generator");
    if (has_gens == has_gen) {
        throw ConfigError("$", "exactly one of \"generations\" and \"generator\" is required");
    }
    if (has_gens) {
        const auto& gens = doc.at("generations");
        if (!gens.is_array() || gens.empty()) {
            throw ConfigError("$.generations", "expected a non-empty array of generations");
        }
        for (std::size_t k = 0; k < gens.size(); ++k) {
            const std::string gpath = "$.generations[" + std::to_string(k) + "]";
            if (!gens[k].is_array() || gens[k].empty()) {
                throw ConfigError(gpath, "expected a non-empty array of branches");
            }
            std::vector<BranchSpec> gen;
            for (std::size_t i = 0; i < gens[k].size(); ++i) {
                const std::string bpath = gpath + "[" + std::to_string(i) + "]";
                const auto& q = gens[k][i];
                if (!q.is_array() || q.size() != 4) {
                    throw ConfigError(bpath, "expected [scale_re, scale_im, offset_re, offset_im]");
                }
                gen.push_back(BranchSpec{as_number(q[0], bpath + "[0]"), as_number(q[1], bpath + "[1]"),
                                         as_number(q[2], bpath + "[2]"), as_number(q[3], bpath + "[3]")});
            }
            c.generations.push_back(std::move(gen));
        }
    } else {
        const auto& g = doc.at("generator");
        if (!g.is_object()) {
            throw ConfigError("$.generator", "expected an object");
        }
        GeneratorSpec spec;
        spec.name = as_string(require_field(g, "$.generator", "name"), "$.generator.name");
        if (std::find(std::begin(kGeneratorNames), std::end(kGeneratorNames), spec.name) ==
            std::end(kGeneratorNames)) {
            throw ConfigError("$.generator.name", "unknown generator \"" + spec.name + "\"");
        }
        for (const auto& [key, value] : g.items()) {
            if (key != "name") {
                spec.params[key] = value;
            }
        }
        c.generator = std::move(spec);
    }
    if (doc.contains("outputs")) {
        const auto& o = doc.at("outputs");
        if (!o.is_object()) {
            throw ConfigError("$.outputs", "expected an object");
        }
        if (o.contains("directory")) {
            c.outputs.directory = as_string(o.at("directory"), "$.outputs.directory");
        }
        if (o.contains("prefix")) {
            c.outputs.prefix = as_string(o.at("prefix"), "$.outputs.prefix");
        }
    }
    return c;
}

inline SystemConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("$", "cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline Json to_json(const SystemConfig& c) {
    Json doc = Json::object();
    if (c.branch_count) {
        doc["branch_count"] = *c.branch_count;
    }
    if (c.a_lower) {
        doc["a_lower"] = *c.a_lower;
    }
    if (c.a_upper) {
        doc["a_upper"] = *c.a_upper;
    }
    doc["modulus"] = c.modulus;
    doc["assume_modulus"] = c.assume_modulus;
    doc["seed"] = c.seed;
    if (c.generator) {
        Json g = c.generator->params;
        g["name"] = c.generator->name;
        doc["generator"] = std::move(g);
    } else {
        Json gens = Json::array();
        for (const auto& gen : c.generations) {
            Json row = Json::array();
            for (const auto& b : gen) {
                row.push_back({b.scale_re, b.scale_im, b.offset_re, b.offset_im});
            }
            gens.push_back(std::move(row));
        }
        doc["generations"] = std::move(gens);
    }
    doc["periodic"] = c.periodic;
    doc["outputs"] = {{"directory", c.outputs.directory}, {"prefix", c.outputs.prefix}};
    return doc;
}

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const SystemConfig& c) {
    Json doc = to_json(c);
    doc.erase("outputs");
    const std::string text = doc.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline CantorSystem build_generator(const SystemConfig& c) {
    const GeneratorSpec& g = *c.generator;
    CantorSystem base;
    if (g.name == "quarter_centered") {
        std::vector<double> scales{1.0 / 6.0};
        if (g.params.contains("period_scales")) {
            const auto& arr = g.params.at("period_scales");
            if (!arr.is_array() || arr.empty()) {
                throw ConfigError("$.generator.period_scales", "expected a non-empty array");
            }
            scales.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                scales.push_back(
                    as_number(arr[i], "$.generator.period_scales[" + std::to_string(i) + "]"));
            }
        }
        for (std::size_t i = 0; i < scales.size(); ++i) {
            if (!(scales[i] > 0.0 && scales[i] < 0.5)) {
                throw ConfigError("$.generator.period_scales[" + std::to_string(i) + "]",
                                  "scale must lie in (0, 0.5)");
            }
        }
        base = fixtures::quarter_centered(scales, c.modulus);
    } else if (g.name == "anchored") {
        const double s = param_number(g, "scale", 1.0 / 6.0);
        if (!(s > 0.0 && s < 0.2)) {
            throw ConfigError("$.generator.scale", "scale must lie in (0, 0.2)");
        }
        base = fixtures::anchored([s](std::size_t) { return s; }, s, s, c.modulus);
    } else if (g.name == "drifting") {
        base = fixtures::drifting();
    } else if (g.name == "convergent_excess") {
        base = fixtures::convergent_excess();
    } else {
        base = fixtures::growing();
    }
    for (const auto& [key, _] : g.params.items()) {
        if (!(g.name == "quarter_centered" && key == "period_scales") &&
            !(g.name == "anchored" && key == "scale")) {
            throw ConfigError("$.generator." + key, "unknown parameter for generator " + g.name);
        }
    }
    return base;
}

}  // namespace detail

/// Builds the system described by a configuration.
inline CantorSystem build_system(const SystemConfig& c) {
    if (!(c.modulus > 0.0)) {
        throw ConfigError("$.modulus", "modulus must be positive");
    }
    try {
        if (c.generator) {
            CantorSystem base = detail::build_generator(c);
            SystemParams p = base.params();
            p.modulus = c.modulus;
            p.assume_modulus = c.assume_modulus;
            if (c.branch_count && *c.branch_count != p.branch_count) {
                throw ConfigError("$.branch_count", "generator " + c.generator->name + " has " +
                                                        std::to_string(p.branch_count) + " branches");
            }
            p.a_lower = c.a_lower.value_or(p.a_lower);
            p.a_upper = c.a_upper.value_or(p.a_upper);
            return base.with_params(p);
        }
        const std::size_t n = c.generations.front().size();
        for (std::size_t k = 0; k < c.generations.size(); ++k) {
            if (c.generations[k].size() != n) {
                throw ConfigError("$.generations[" + std::to_string(k) + "]",
                                  "expected " + std::to_string(n) + " branches");
            }
        }
        if (c.branch_count && *c.branch_count != n) {
            throw ConfigError("$.branch_count", "generations have " + std::to_string(n) + " branches");
        }
        double lo = 1.0, hi = 0.0;
        std::vector<std::vector<AffineContraction>> gens;
        for (std::size_t k = 0; k < c.generations.size(); ++k) {
            std::vector<AffineContraction> gen;
            for (std::size_t i = 0; i < n; ++i) {
                const auto& b = c.generations[k][i];
                const Complex a(b.scale_re, b.scale_im);
                if (!(std::abs(a) > 0.0)) {
                    throw ConfigError("$.generations[" + std::to_string(k) + "][" + std::to_string(i) +
                                          "][0]",
                                      "scale must be non-zero");
                }
                lo = std::min(lo, std::abs(a));
                hi = std::max(hi, std::abs(a));
                gen.push_back(AffineContraction{a, Complex(b.offset_re, b.offset_im)});
            }
            gens.push_back(std::move(gen));
        }
        SystemParams p{n, c.a_lower.value_or(lo), c.a_upper.value_or(hi), c.modulus, c.assume_modulus};
        return c.periodic ? CantorSystem::periodic(p, std::move(gens))
                          : CantorSystem::explicit_system(p, std::move(gens));
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError("$", e.what());
    }
}

}  // namespace cantordim

#endif  // CANTORDIM_CONFIG_HPP
