#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vwflow/commands.hpp"

using namespace vwflow;

namespace {
using Table = std::vector<std::vector<double>>;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Scenario shipped(const char* name) { return parse_scenario(slurp(std::filesystem::path(VWFLOW_SCENARIO_DIR) / name)); }

const std::string& file(const CommandResult& r, const std::string& name) {
    for (const auto& f : r.files)
        if (f.name == name) return f.contents;
    FAIL("missing output " << name);
    static const std::string empty;
    return empty;
}

// Splits a CSV produced by the commands: comment line, header, numeric rows.
Table rows(const std::string& csv, std::string* header = nullptr) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# scenario=", 0) == 0);
    CHECK(line.find(" hash=") != std::string::npos);
    std::getline(in, line);
    if (header) *header = line;
    Table t;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        t.push_back(row);
    }
    return t;
}

const char* kRotation = R"(name = rotation
horizon = pi/2
output_times = 2
levels = 100
reference_level = 100
[field]
velocity = 0, 0
sup_norm = 0
already_smooth = true
[path]
position = 0, 0
[ensemble]
center = 0.75, -0.25
radius = 0.5
spacing = 0.5
)";
}  // namespace

TEST_CASE("flow command: pure-kernel rotation row") {
    const auto s = parse_scenario(kRotation);
    const auto r = cmd_flow(s, {});
    CHECK(r.exit_code == 0);
    std::string header;
    const auto t = rows(file(r, "trajectories.csv"), &header);
    CHECK(header == "point_id,x0_1,x0_2,t,X_1,X_2,min_dist");
    bool seen = false;
    const double kappa = 1.0 / (1.0 + 1e-4);
    for (const auto& row : t) {
        if (row[1] == 1.0 && row[2] == 0.0 && row[3] == std::numbers::pi / 2) {
            seen = true;
            CHECK(std::hypot(row[4], row[5] - 1.0) < 1e-3);
            const double a = kappa * std::numbers::pi / 2;
            CHECK(std::hypot(row[4] - std::cos(a), row[5] - std::sin(a)) < 1e-8);
            CHECK(row[6] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    CHECK(seen);
}

TEST_CASE("flow command: zero horizon reproduces the grid") {
    auto s = parse_scenario(std::string(kRotation) + "");
    s.horizon = 0.0;
    s.dt = 1.0;
    const auto r = cmd_flow(s, {});
    const auto e = build_ensemble(s);
    const auto t = rows(file(r, "trajectories.csv"));
    REQUIRE(t.size() == e.points.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t[i][3] == 0.0);
        CHECK(t[i][4] == e.points[i].x1);
        CHECK(t[i][5] == e.points[i].x2);
        CHECK(t[i][6] == norm(e.points[i]));
    }
}

TEST_CASE("flow command: constant field translates the grid") {
    const auto s = shipped("constant_field.scn");
    const auto r = cmd_flow(s, {});
    CHECK(r.exit_code == 0);
    const auto t = rows(file(r, "trajectories.csv"));
    // The vortex at distance ~1000 adds at most T / 998 of drift.
    const double tol = s.horizon / 998.0;
    for (const auto& row : t) {
        CHECK(std::abs(row[4] - (row[1] + 0.5 * row[3])) <= tol);
        CHECK(std::abs(row[5] - (row[2] + 0.25 * row[3])) <= tol);
    }
}

TEST_CASE("flow command output is independent of threads") {
    const auto s = shipped("pipeline.scn");
    const auto one = cmd_flow(s, {1, std::nullopt});
    const auto four = cmd_flow(s, {4, std::nullopt});
    CHECK(one.exit_code == 0);
    CHECK(file(one, "trajectories.csv") == file(four, "trajectories.csv"));
}

TEST_CASE("converge command with a single level equal to the reference") {
    auto s = parse_scenario(kRotation);
    s.horizon = 0.25;
    s.output_times = 3;
    s.levels = {s.reference_level};
    const auto r = cmd_converge(s, {});
    CHECK(r.exit_code == 0);
    std::string header;
    const auto t = rows(file(r, "convergence.csv"), &header);
    CHECK(header == "n,m,delta,ln_delta,g,g_bound,error,rate_bound,ok");
    REQUIRE(t.size() == 1);
    CHECK(t[0][6] == 0.0);
    CHECK(t[0][8] == 1.0);
}

TEST_CASE("converge command flags the first violated pair") {
    // With the vortex at 1e12 every level integrates to the same bits, so the error
    // cannot drop between levels and the second pair is flagged.
    const auto s = parse_scenario(R"(name = tied
horizon = 0.5
output_times = 3
levels = 8, 16, 32
reference_level = 64
[field]
velocity = 0.5, 0
sup_norm = 0.5
already_smooth = true
[path]
position = 1e12, 0
[ensemble]
radius = 0.5
spacing = 0.125
)");
    const auto r = cmd_converge(s, {});
    const auto t = rows(file(r, "convergence.csv"));
    REQUIRE(t.size() == 3);
    CHECK(t[0][2] > 0.0);
    CHECK(t[0][6] == 0.0);
    CHECK(t[1][6] == 0.0);
    CHECK(t[0][8] == 1.0);
    CHECK(t[1][8] == 0.0);
    CHECK(r.exit_code != 0);
    CHECK(r.summary.find("first violated pair: n=16 m=64") != std::string::npos);
}

TEST_CASE("collision command") {
    auto s = parse_scenario(kRotation);
    s.horizon = 0.5;
    s.ensemble = {{0, 0}, 1.0, 1.0 / 128};
    s.levels = {16};
    s.dt = 1.0 / 16;
    const auto r = cmd_collision(s, {});
    CHECK(r.exit_code == 0);
    std::string header;
    const auto t = rows(file(r, "collision.csv"), &header);
    CHECK(header == "epsilon,measure,oracle,uncertainty");
    REQUIRE(t.size() == 8);
    for (std::size_t k = 0; k < 4; ++k) CHECK(t[k][1] == doctest::Approx(t[k][2]).epsilon(0.1));
    CHECK(r.summary.find("fitted_exponent=") != std::string::npos);

    const auto far = cmd_collision(shipped("constant_field.scn"), {});
    for (const auto& row : rows(file(far, "collision.csv"))) CHECK(row[1] == 0.0);
}

TEST_CASE("vortexwave command with zero vorticity keeps the path constant") {
    auto s = shipped("two_vortex.scn");
    s.vortexwave->omega0 = Expression::constant(0.0);
    const auto r = cmd_vortexwave(s, {});
    CHECK(r.exit_code == 0);
    const auto t = rows(file(r, "path.csv"));
    REQUIRE(t.size() > 2);
    for (const auto& row : t) {
        CHECK(row[1] == 0.0);
        CHECK(row[2] == 0.0);
    }
    CHECK(r.files.size() == 1 + s.vortexwave->snapshots);
    CHECK(r.summary.find("|z(T) - z(0)| = 0") != std::string::npos);
}

TEST_CASE("vortexwave path feeds the flow command") {
    const auto s = shipped("pipeline.scn");
    const auto vw = cmd_vortexwave(s, {});
    const auto path_rows = rows(file(vw, "path.csv"));
    CHECK(std::hypot(path_rows.back()[1], path_rows.back()[2]) > 1e-3);
    const auto flow = cmd_flow(s, {});
    CHECK(flow.exit_code == 0);
    CHECK(rows(file(flow, "trajectories.csv")).size() == build_ensemble(s).points.size() * s.output_times);
}

TEST_CASE("outputs are written to disk") {
    const auto dir = std::filesystem::temp_directory_path() / "vwflow_unit_outputs";
    std::filesystem::remove_all(dir);
    CommandResult r;
    r.files.push_back({"a.csv", "# scenario=x hash=0\nq\n1\n"});
    write_outputs(r, dir);
    CHECK(slurp(dir / "a.csv") == "# scenario=x hash=0\nq\n1\n");
    std::filesystem::remove_all(dir);
}
