#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vwflow/diagnostics.hpp"
#include "vwflow/scenario.hpp"

namespace vwflow {

struct RunOptions {
    int threads = 1;               ///< affects speed only, never output bytes
    std::optional<long> level;     ///< flow/collision level; defaults to the scenario's first level
};

struct OutputFile {
    std::string name;
    std::string contents;
};

/// What a subcommand produced: an exit status, CSV files and a human-readable summary.
struct CommandResult {
    int exit_code = 0;
    std::vector<OutputFile> files;
    std::string summary;
};

CommandResult cmd_flow(const Scenario& scenario, const RunOptions& options);
CommandResult cmd_converge(const Scenario& scenario, const RunOptions& options);
CommandResult cmd_collision(const Scenario& scenario, const RunOptions& options);
CommandResult cmd_vortexwave(const Scenario& scenario, const RunOptions& options);

void write_outputs(const CommandResult& result, const std::filesystem::path& out_dir);

// CSV renderers. Every file starts with a "# scenario=<name> hash=<hex> ..." comment
// line, then a header row; numbers use %.17g.
std::string trajectories_csv(const Scenario& scenario, const TrajectorySet& traj, const InitialEnsemble& ensemble);
std::string convergence_csv(const Scenario& scenario, const ConvergenceReport& report);
std::string collision_csv(const Scenario& scenario, const CollisionReport& report, long level);
std::string vortex_path_csv(const Scenario& scenario, const PointVortexPath& path);
std::string blob_snapshot_csv(const Scenario& scenario, const BlobEnsemble& ensemble, double t);

}  // namespace vwflow
