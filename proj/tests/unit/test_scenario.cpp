#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vwflow/errors.hpp"
#include "vwflow/scenario.hpp"

using namespace vwflow;

namespace {
const char* kMinimal = R"(horizon = 1
[field]
velocity = 0, 0
[path]
position = 0, 0
[ensemble]
radius = 2
)";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string semantic_message(const std::string& text) {
    try {
        (void)parse_scenario(text);
    } catch (const SemanticError& e) {
        return e.what();
    }
    return "";
}

ParseError parse_error(const std::string& text) {
    try {
        (void)parse_scenario(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a syntax error");
    return ParseError("", 0, 0);
}
}  // namespace

TEST_CASE("minimal scenario gets defaults") {
    const auto s = parse_scenario(kMinimal);
    CHECK(s.name == "scenario");
    CHECK(s.horizon == 1.0);
    CHECK(s.levels == std::vector<long>{16, 64, 256});
    CHECK(s.reference_level == 2048);
    CHECK(s.ensemble.radius == 2.0);
    CHECK(s.ensemble.spacing == 2.0 / 64);
    CHECK(s.dt == 1.0 / 1024);
    CHECK(s.output_times == 129);
    CHECK_FALSE(s.vortexwave);
    const auto e = build_ensemble(s);
    CHECK(e.cell_weight == doctest::Approx(std::pow(2.0 / 64, 2)));
}

TEST_CASE("semantic errors name the violated invariant") {
    CHECK(semantic_message("[field]\nvelocity = 0, 0\n[path]\nposition = 0, 0\n[ensemble]\nradius = 2\n") ==
          "horizon T required");
    CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "radius = -1\n"), ParseError);
    const std::string negative = "horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nposition = 0, 0\n[ensemble]\nradius = -2\n";
    CHECK(semantic_message(negative).find("ensemble radius R") != std::string::npos);
    const std::string no_path = "horizon = 1\n[field]\nvelocity = 0, 0\n[ensemble]\nradius = 2\n";
    CHECK(semantic_message(no_path) == "path required");
    const std::string bad_levels = std::string("levels = 16, 4096\n") + kMinimal;
    CHECK(semantic_message(bad_levels).find("reference_level") != std::string::npos);
    const std::string bad_dt = std::string("dt = 0\n") + kMinimal;
    CHECK(semantic_message(bad_dt).find("dt") != std::string::npos);
    const std::string spacing = std::string(kMinimal) + "spacing = -0.1\n";
    CHECK(semantic_message(spacing).find("spacing h") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
    CHECK(parse_error(std::string(kMinimal) + "radius = 3\n").line() == 8);
    const auto e = parse_error("horizon = 1\n[field]\nvelocity = 0, 0 +\n");
    CHECK(e.line() == 3);
    CHECK(e.column() > 12);
    CHECK(parse_error("horizon = 1\n[nonsense]\n").line() == 2);
    CHECK(parse_error("horizon 1\n").line() == 1);
    CHECK(parse_error("bogus = 1\n").column() == 1);
    CHECK(parse_error("horizon = x1\n").line() == 1);
    CHECK(parse_error("horizon = 1\n[field]\nvelocity = 0\n").line() == 3);
    CHECK(parse_error("horizon = 1\n[field]\nalready_smooth = maybe\n").line() == 3);
    CHECK(parse_error("horizon = 1\noutput_times = 2.5\n").line() == 2);
}

TEST_CASE("expressions in values and comments") {
    const auto s = parse_scenario(std::string("# a comment\nhorizon = 2*pi  # trailing\n") +
                                  "[field]\nvelocity = -x2, x1\n[path]\nposition = cos(t), sin(t)\n"
                                  "[ensemble]\ncenter = 1/2, -1/4\nradius = sqrt(2)\n");
    CHECK(s.horizon == doctest::Approx(2 * std::numbers::pi));
    CHECK(s.ensemble.center == PlaneVec{0.5, -0.25});
    CHECK(s.ensemble.radius == doctest::Approx(std::sqrt(2.0)));
    const auto v = build_smooth_field(s);
    CHECK(v.velocity(0.0, {1.0, 2.0}) == PlaneVec{-2.0, 1.0});
    CHECK(v.divergence(0.0, {1.0, 2.0}) == 0.0);
    const auto p = build_path(s);
    CHECK(norm(p.at(1.0) - PlaneVec{std::cos(1.0), std::sin(1.0)}) < 1e-4);
    CHECK(p.lipschitz_bound() <= 1.0 + 1e-9);
}

TEST_CASE("field metadata inference") {
    const auto s = parse_scenario("horizon = 2\n[field]\nvelocity = 3, 4\ndivergence = 0.5\n[path]\nposition = 0, 0\n"
                                  "[ensemble]\nradius = 1\n");
    const auto v = build_smooth_field(s);
    REQUIRE(v.sup_norm);
    CHECK(*v.sup_norm == 5.0);
    REQUIRE(v.div_sup_integral);
    CHECK(*v.div_sup_integral == 1.0);
}

TEST_CASE("sampled paths") {
    const auto s = parse_scenario("horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nsample = 0, 0, 0\n"
                                  "sample = 0.5, 1, 0\nsample = 1, 1, 1\n[ensemble]\nradius = 1\n");
    CHECK(s.path.source == PathSource::samples);
    const auto p = build_path(s);
    CHECK(p.at(0.25) == PlaneVec{0.5, 0});
    CHECK(p.lipschitz_bound() == 2.0);
    CHECK(semantic_message("horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nsample = 0, 0, 0\nsample = 0.5, 1, 0\n"
                           "[ensemble]\nradius = 1\n")
              .find("horizon") != std::string::npos);
}

TEST_CASE("zero horizon is accepted") {
    const auto s = parse_scenario("horizon = 0\n[field]\nvelocity = 1, 0\n[path]\nposition = 0, 0\n[ensemble]\nradius = 1\n");
    CHECK(s.horizon == 0.0);
    CHECK(s.dt > 0.0);
    CHECK(build_path(s).horizon() == 0.0);
}

TEST_CASE("emit then parse is the identity on every shipped scenario") {
    for (const auto& entry : std::filesystem::directory_iterator(VWFLOW_SCENARIO_DIR)) {
        if (entry.path().extension() != ".scn") continue;
        CAPTURE(entry.path().string());
        const auto s = parse_scenario(slurp(entry.path()));
        const std::string text = emit_scenario(s);
        const auto again = parse_scenario(text);
        CHECK(again == s);
        CHECK(emit_scenario(again) == text);
        CHECK(scenario_hash(again) == scenario_hash(s));
        CHECK(scenario_hash(s).size() == 16);
    }
}

TEST_CASE("hash changes with content") {
    const auto a = parse_scenario(kMinimal);
    auto b = a;
    b.horizon = 1.5;
    CHECK(scenario_hash(a) != scenario_hash(b));
}

TEST_CASE("vortexwave section builds the blob state") {
    const auto s = parse_scenario(slurp(std::filesystem::path(VWFLOW_SCENARIO_DIR) / "two_vortex.scn"));
    REQUIRE(s.vortexwave);
    const auto st = build_vortexwave_state(s);
    REQUIRE(st.ensemble.size() == 1);
    CHECK(st.ensemble.weights[0] == doctest::Approx(2 * std::numbers::pi));
    CHECK(norm(st.ensemble.positions[0] - PlaneVec{1, 0}) < 1e-12);
    CHECK(st.strength == doctest::Approx(2 * std::numbers::pi));
    const auto snaps = vortexwave_snapshot_times(s);
    CHECK(snaps.size() == 9);
    CHECK(snaps.front() == 0.0);
    CHECK(snaps.back() == s.horizon);
    CHECK(semantic_message("horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nsource = from_vortexwave\n"
                           "[ensemble]\nradius = 1\n")
              .find("vortexwave") != std::string::npos);
}

TEST_CASE("path and initial vorticity variable restrictions") {
    CHECK(semantic_message("horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nposition = x1, 0\n[ensemble]\nradius = 1\n") ==
          "path position may only depend on t");
    CHECK(semantic_message("horizon = 1\n[field]\nvelocity = 0, 0\n[path]\nposition = 0, 0\n[ensemble]\nradius = 1\n"
                           "[vortexwave]\nomega0 = t\nwindow = 0, 1, 0, 1\nblob_spacing = 0.1\ndelta_blob = 0.1\n")
              .find("omega0") != std::string::npos);
}
