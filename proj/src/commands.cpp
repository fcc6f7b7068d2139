#include "vwflow/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vwflow/errors.hpp"

namespace vwflow {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string banner(const Scenario& s, const std::string& extra) {
    return "# scenario=" + s.name + " hash=" + scenario_hash(s) + " " + extra + "\n";
}

long chosen_level(const Scenario& s, const RunOptions& o) { return o.level.value_or(s.levels.front()); }

struct FlowRun {
    InitialEnsemble ensemble;
    CompositeField field;
    TrajectorySet traj;
};

FlowRun run_flow(const Scenario& s, const RunOptions& o) {
    const long level = chosen_level(s, o);
    FlowRun r{build_ensemble(s),
              make_composite(build_smooth_field(s), build_path(s, o.threads), RegularizationLevel(level)),
              {}};
    const auto times = uniform_times(s.horizon, s.output_times);
    r.traj = integrate_flow(r.field, r.ensemble, s.horizon, s.dt, times, o.threads, scenario_hash(s));
    return r;
}

// Invariant checks shared by flow and collision; returns the number of violations.
std::size_t audit_flow(const Scenario& s, const FlowRun& r, std::ostringstream& log) {
    if (!r.field.smooth.sup_norm) {
        log << "invariants: skipped (field sup_norm unknown)\n";
        return 0;
    }
    const auto inv = check_flow_invariants(r.traj, r.field, r.ensemble, s.dt);
    log << "invariants: confinement=" << inv.confinement << " radial=" << inv.radial
        << " displacement=" << inv.displacement << "\n";
    std::size_t violations = inv.confinement + inv.radial + inv.displacement;
    if (s.diagnostics.density_spacing && r.field.smooth.div_sup_integral) {
        const auto c = compressibility(r.traj, *s.diagnostics.density_spacing, *r.field.smooth.div_sup_integral);
        log << "compressibility: empirical_LR=" << num(c.empirical_LR)
            << " bound=" << num(std::exp(*r.field.smooth.div_sup_integral)) << (c.bound_ok ? " ok" : " VIOLATED")
            << "\n";
        if (!c.bound_ok) ++violations;
    }
    return violations;
}

}  // namespace

std::string trajectories_csv(const Scenario& s, const TrajectorySet& traj, const InitialEnsemble& ensemble) {
    std::string out = banner(s, "command=flow level=" + std::to_string(traj.level.n()));
    out += "point_id,x0_1,x0_2,t,X_1,X_2,min_dist\n";
    for (std::size_t i = 0; i < traj.point_count(); ++i) {
        const PlaneVec x0 = ensemble.points[i];
        const std::string prefix = std::to_string(i) + "," + num(x0.x1) + "," + num(x0.x2) + ",";
        const std::string suffix = "," + num(traj.min_distance[i]) + "\n";
        for (std::size_t k = 0; k < traj.time_count(); ++k) {
            const PlaneVec x = traj.position(i, k);
            out += prefix + num(traj.output_times[k]) + "," + num(x.x1) + "," + num(x.x2) + suffix;
        }
    }
    return out;
}

std::string convergence_csv(const Scenario& s, const ConvergenceReport& report) {
    std::string out = banner(s, "command=converge C_rate=" + num(report.fitted_C_rate) +
                                    " C_g=" + num(report.fitted_C_g));
    out += "n,m,delta,ln_delta,g,g_bound,error,rate_bound,ok\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.n) + "," + std::to_string(r.m) + "," + num(r.delta) + "," +
               num(r.delta > 0.0 ? std::log(r.delta) : -INFINITY) + "," + num(r.g_value) + "," + num(r.g_bound) +
               "," + num(r.flow_error) + "," + num(r.rate_bound) + "," + (r.bound_satisfied ? "1" : "0") + "\n";
    }
    return out;
}

std::string collision_csv(const Scenario& s, const CollisionReport& report, long level) {
    std::string out = banner(s, "command=collision level=" + std::to_string(level) +
                                    " fitted_exponent=" + num(report.fitted_exponent));
    out += "epsilon,measure,oracle,uncertainty\n";
    for (std::size_t k = 0; k < report.epsilons.size(); ++k) {
        const double eps = report.epsilons[k];
        out += num(eps) + "," + num(report.measures[k]) + "," + num(std::numbers::pi * eps * eps) + "," +
               num(report.reported_uncertainty) + "\n";
    }
    return out;
}

std::string vortex_path_csv(const Scenario& s, const PointVortexPath& path) {
    std::string out = banner(s, "command=vortexwave lipschitz_bound=" + num(path.lipschitz_bound()));
    out += "t,z_1,z_2\n";
    for (std::size_t k = 0; k < path.times().size(); ++k) {
        const PlaneVec z = path.positions()[k];
        out += num(path.times()[k]) + "," + num(z.x1) + "," + num(z.x2) + "\n";
    }
    return out;
}

std::string blob_snapshot_csv(const Scenario& s, const BlobEnsemble& ensemble, double t) {
    std::string out = banner(s, "command=vortexwave t=" + num(t) + " core=" + num(ensemble.core));
    out += "blob_id,x_1,x_2,weight\n";
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
        const PlaneVec p = ensemble.positions[j];
        out += std::to_string(j) + "," + num(p.x1) + "," + num(p.x2) + "," + num(ensemble.weights[j]) + "\n";
    }
    return out;
}

CommandResult cmd_flow(const Scenario& s, const RunOptions& o) {
    const FlowRun r = run_flow(s, o);
    std::ostringstream log;
    log << "flow: scenario=" << s.name << " level=" << r.traj.level.n() << " points=" << r.traj.point_count()
        << " max_substep=" << num(r.traj.max_substep) << "\n";
    const std::size_t violations = audit_flow(s, r, log);
    CommandResult result;
    result.files.push_back({"trajectories.csv", trajectories_csv(s, r.traj, r.ensemble)});
    result.exit_code = violations == 0 ? 0 : 1;
    result.summary = log.str();
    return result;
}

CommandResult cmd_converge(const Scenario& s, const RunOptions& o) {
    HarnessSetup setup;
    setup.smooth = build_smooth_field(s);
    setup.path = build_path(s, o.threads);
    setup.ensemble = build_ensemble(s);
    setup.horizon = s.horizon;
    setup.dt = s.dt;
    setup.output_times = uniform_times(s.horizon, s.output_times);
    setup.levels = s.levels;
    setup.reference = s.reference_level;
    setup.time_samples = s.diagnostics.time_samples;
    setup.space_divisions = s.diagnostics.space_divisions;
    setup.threads = o.threads;
    setup.field_hash = scenario_hash(s);
    const ConvergenceReport report = rate_harness(setup);

    std::ostringstream log;
    log << "converge: scenario=" << s.name << " R~=" << num(report.tilde_radius)
        << " C_rate=" << num(report.fitted_C_rate) << " C_g=" << num(report.fitted_C_g) << "\n";
    CommandResult result;
    for (const auto& row : report.rows) {
        log << "  n=" << row.n << " m=" << row.m << " delta=" << num(row.delta) << " error=" << num(row.flow_error)
            << " g=" << num(row.g_value) << (row.bound_satisfied ? " ok" : " FAILED") << "\n";
        if (!row.bound_satisfied && result.exit_code == 0) {
            result.exit_code = 1;
            log << "first violated pair: n=" << row.n << " m=" << row.m << "\n";
        }
    }
    result.files.push_back({"convergence.csv", convergence_csv(s, report)});
    result.summary = log.str();
    return result;
}

CommandResult cmd_collision(const Scenario& s, const RunOptions& o) {
    const FlowRun r = run_flow(s, o);
    const auto eps = default_epsilons(s.ensemble.radius);
    const CollisionReport report = near_collision_measure(r.traj, r.ensemble, eps);
    std::ostringstream log;
    log << "collision: scenario=" << s.name << " level=" << r.traj.level.n()
        << " fitted_exponent=" << num(report.fitted_exponent)
        << " uncertainty=" << num(report.reported_uncertainty) << "\n";
    const std::size_t violations = audit_flow(s, r, log);
    CommandResult result;
    result.files.push_back({"collision.csv", collision_csv(s, report, r.traj.level.n())});
    result.exit_code = violations == 0 ? 0 : 1;
    result.summary = log.str();
    return result;
}

CommandResult cmd_vortexwave(const Scenario& s, const RunOptions& o) {
    const VortexWaveState initial = build_vortexwave_state(s);
    const auto& spec = *s.vortexwave;
    const auto snaps = vortexwave_snapshot_times(s);
    const VortexWaveRun out = run(initial, s.horizon, spec.dt.value_or(s.dt), snaps, o.threads);

    CommandResult result;
    result.files.push_back({"path.csv", vortex_path_csv(s, out.path)});
    for (std::size_t k = 0; k < out.snapshots.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
        result.files.push_back({name, blob_snapshot_csv(s, out.snapshots[k], out.snapshot_times[k])});
    }

    std::ostringstream log;
    const PlaneVec z0 = out.path.positions().front();
    const PlaneVec z1 = out.path.positions().back();
    log << "vortexwave: scenario=" << s.name << " blobs=" << initial.ensemble.size()
        << " circulation=" << num(initial.ensemble.total_circulation()) << "\n";
    log << "  |z(T) - z(0)| = " << num(norm(z1 - z0)) << "\n";
    log << "  lipschitz_bound = " << num(out.path.lipschitz_bound()) << "\n";
    if (spec.deposit_spacing && !out.snapshots.empty()) {
        const double l2_first = deposit_vorticity(out.snapshots.front(), *spec.deposit_spacing, spec.window).l2_norm();
        const double l2_last = deposit_vorticity(out.snapshots.back(), *spec.deposit_spacing, spec.window).l2_norm();
        log << "  deposited L2: first=" << num(l2_first) << " last=" << num(l2_last)
            << " drift=" << num(l2_first > 0.0 ? std::abs(l2_last - l2_first) / l2_first : 0.0) << "\n";
    }
    result.summary = log.str();
    return result;
}

void write_outputs(const CommandResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& f : result.files) {
        std::ofstream os(out_dir / f.name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (out_dir / f.name).string());
        os << f.contents;
    }
}

}  // namespace vwflow
