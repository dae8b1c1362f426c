#include <gtest/gtest.h>

#include "cantordim/config.hpp"
#include "cantordim/fixtures.hpp"

using namespace cantordim;

namespace {

std::string error_path(const std::string& text) {
    try {
        build_system(parse_config_text(text));
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<none>";
}

void expect_same_generations(const CantorSystem& a, const CantorSystem& b, std::size_t n) {
    ASSERT_EQ(a.branch_count(), b.branch_count());
    for (std::size_t k = 0; k < n; ++k) {
        const auto ga = a.generation(k), gb = b.generation(k);
        for (std::size_t i = 0; i < a.branch_count(); ++i) {
            EXPECT_EQ(ga.branches[i].scale, gb.branches[i].scale) << k << " " << i;
            EXPECT_EQ(ga.branches[i].offset, gb.branches[i].offset) << k << " " << i;
        }
    }
}

}  // namespace

TEST(Config, SampleFilesRoundTrip) {
    for (const char* name : {"self_similar", "period2", "drifting", "rotated_periodic"}) {
        const auto c = load_config(std::string(CANTORDIM_CONFIGS) + "/" + name + ".json");
        const auto back = parse_config(to_json(c));
        EXPECT_EQ(back, c) << name;
        EXPECT_EQ(config_hash(back), config_hash(c));
        EXPECT_NO_THROW(build_system(c)) << name;
    }
}

TEST(Config, ExplicitRoundTripPreservesSystem) {
    const auto c = load_config(std::string(CANTORDIM_CONFIGS) + "/rotated_periodic.json");
    const auto a = build_system(c);
    const auto b = build_system(parse_config_text(to_json(c).dump()));
    EXPECT_EQ(a.period().value(), 2u);
    expect_same_generations(a, b, 6);
    EXPECT_TRUE(check_admissible(a).admissible);
}

TEST(Config, GeneratorsMatchFixtures) {
    expect_same_generations(
        build_system(parse_config_text(R"({"generator": {"name": "drifting"}})")), fixtures::drifting(), 50);
    expect_same_generations(
        build_system(parse_config_text(R"({"generator": {"name": "quarter_centered", "period_scales": [0.125, 0.1]}})")),
        fixtures::quarter_centered({0.125, 0.1}), 6);
    expect_same_generations(build_system(parse_config_text(R"({"generator": {"name": "growing"}})")),
                            fixtures::growing(), 50);
    const auto sys = build_system(parse_config_text(
        R"({"generator": {"name": "drifting"}, "modulus": 0.01, "assume_modulus": true, "a_upper": 0.18})"));
    EXPECT_EQ(sys.params().modulus, 0.01);
    EXPECT_TRUE(sys.params().assume_modulus);
    EXPECT_EQ(sys.params().a_upper, 0.18);
}

TEST(Config, ErrorPaths) {
    EXPECT_EQ(error_path(R"({"generations": [[[0.1, 0, 0, 0]], [[0.1, 0, "x", 0]]]})"), "$.generations[1][0][2]");
    EXPECT_EQ(error_path(R"({"generations": [[[0.1, 0, 0]]]})"), "$.generations[0][0]");
    EXPECT_EQ(error_path(R"({"generations": [[[0.1, 0, 0, 0], [0.1, 0, 1, 0]], [[0.1, 0, 0, 0]]]})"),
              "$.generations[1]");
    EXPECT_EQ(error_path(R"({"generations": [[[0, 0, 0, 0]]]})"), "$.generations[0][0][0]");
    EXPECT_EQ(error_path(R"({"generator": {"name": "spiral"}})"), "$.generator.name");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting", "scale": 2}})"), "$.generator.scale");
    EXPECT_EQ(error_path(R"({"generator": {"name": "anchored", "scale": 0.3}})"), "$.generator.scale");
    EXPECT_EQ(error_path(R"({"generator": {"name": "quarter_centered", "period_scales": [0.1, 0.6]}})"),
              "$.generator.period_scales[1]");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "branch_count": 3})"), "$.branch_count");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "seed": -1})"), "$.seed");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "modulus": 0})"), "$.modulus");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "outputs": {"prefix": 4}})"), "$.outputs.prefix");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "a_lower": 0.3, "a_upper": 0.2})"), "$");
}

TEST(Config, StructuralErrors) {
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "colour": 1})"), "$.colour");
    EXPECT_EQ(error_path(R"({})"), "$");
    EXPECT_EQ(error_path(R"({"generator": {"name": "drifting"}, "generations": [[[0.1, 0, 0, 0]]]})"), "$");
    EXPECT_EQ(error_path(R"([1, 2])"), "$");
    EXPECT_EQ(error_path(R"({"generator": )"), "$");
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashIgnoresOutputsOnly) {
    auto a = parse_config_text(R"({"generator": {"name": "drifting"}, "outputs": {"directory": "x"}})");
    auto b = parse_config_text(R"({"generator": {"name": "drifting"}, "outputs": {"directory": "y"}})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.seed = 9;
    EXPECT_NE(config_hash(a), config_hash(b));
}
