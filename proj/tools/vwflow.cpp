// vwflow: scenario-driven front end for flows, vortex-wave runs and diagnostics.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vwflow/commands.hpp"
#include "vwflow/expression.hpp"

namespace {

std::string slurp(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file " + file);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vwflow: Lagrangian flows around a point vortex"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::string out_dir = ".";
    int threads = 1;
    long level = 0;
    long seed = 0;

    auto add_common = [&](CLI::App* sub, bool with_level) {
        sub->add_option("--scenario", scenario_file, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (speed only)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "reserved; all quadratures are deterministic");
        if (with_level) sub->add_option("--level", level, "regularization level n")->check(CLI::PositiveNumber);
    };
    auto* flow = app.add_subcommand("flow", "integrate the ensemble and write trajectories.csv");
    auto* converge = app.add_subcommand("converge", "run the rate harness and write convergence.csv");
    auto* collision = app.add_subcommand("collision", "near-collision measure, collision.csv");
    auto* vortexwave = app.add_subcommand("vortexwave", "blob/vortex simulation, path.csv and snapshots");
    add_common(flow, true);
    add_common(converge, false);
    add_common(collision, true);
    add_common(vortexwave, false);

    CLI11_PARSE(app, argc, argv);

    try {
        const vwflow::Scenario scn = vwflow::parse_scenario(slurp(scenario_file));
        vwflow::RunOptions opts;
        opts.threads = threads;
        if (level > 0) opts.level = level;

        vwflow::CommandResult result;
        if (*flow)
            result = vwflow::cmd_flow(scn, opts);
        else if (*converge)
            result = vwflow::cmd_converge(scn, opts);
        else if (*collision)
            result = vwflow::cmd_collision(scn, opts);
        else
            result = vwflow::cmd_vortexwave(scn, opts);

        vwflow::write_outputs(result, out_dir);
        std::cout << result.summary;
        for (const auto& f : result.files) std::cout << "wrote " << out_dir << "/" << f.name << "\n";
        return result.exit_code;
    } catch (const vwflow::ParseError& e) {
        std::cerr << scenario_file << ": syntax error: " << e.what() << "\n";
        return 2;
    } catch (const vwflow::SemanticError& e) {
        std::cerr << scenario_file << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
