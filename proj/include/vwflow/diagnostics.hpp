#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vwflow/fields.hpp"
#include "vwflow/flow.hpp"

namespace vwflow {

/// ||b_n - b_m||_{L^1([0,T] x B_radius)} by midpoint-in-time x cell-center-in-space quadrature.
///
/// Both fields must share their vortex path and have finite levels. Cells whose
/// center lies within two cell diagonals of z(t) are refined into quadrants until
/// the cell size drops below 1/(8 max(n, m)), so the kernel difference, which lives
/// on the 1/n scale around the vortex, is resolved whatever the base spacing.
/// A non-positive `space_spacing` selects radius / 128.
double delta_l1(const CompositeField& field_n, const CompositeField& field_m, double horizon, double radius,
                std::size_t time_samples = 64, double space_spacing = 0.0, int threads = 1);

/// sum_x h^2 max_k ln(|X_n - X_m|(t_k, x) / delta + 1).
double g_functional(const TrajectorySet& traj_n, const TrajectorySet& traj_m, double delta,
                    const InitialEnsemble& ensemble);

/// sum_x h^2 max_k |X_n - X_m|(t_k, x).
double flow_error(const TrajectorySet& traj_n, const TrajectorySet& traj_m, const InitialEnsemble& ensemble);

struct CollisionReport {
    std::vector<double> epsilons;   ///< decreasing
    std::vector<double> measures;   ///< h^2 #{x : min_t |X - z| < eps}
    double fitted_exponent = 0.0;   ///< slope of ln(measure) against ln(eps); NaN with < 2 nonzero measures
    double reported_uncertainty = 0.0;  ///< (||v|| + ||z'||) * max substep, the sampling undershoot of min_distance
};

/// Geometric grid R 2^-k for k = first..last.
std::vector<double> default_epsilons(double radius, int first = 3, int last = 10);

CollisionReport near_collision_measure(const TrajectorySet& traj, const InitialEnsemble& ensemble,
                                       std::span<const double> epsilons);

struct CompressibilityResult {
    double empirical_LR = 0.0;
    bool bound_ok = false;
};

/// max over output times of the pushforward density, tested against e^{L0} (1 + 5%).
CompressibilityResult compressibility(const TrajectorySet& traj, double grid_spacing, double L0);

/// Inputs of a convergence study: one smooth field and path, several regularization levels.
struct HarnessSetup {
    TimeVaryingField smooth;
    PointVortexPath path = PointVortexPath::constant({}, 0.0);
    InitialEnsemble ensemble;
    double horizon = 0.0;
    double dt = 0.0;
    std::vector<double> output_times;
    std::vector<long> levels;
    long reference = 0;
    std::size_t time_samples = 64;
    std::size_t space_divisions = 128;
    int threads = 1;
    std::string field_hash;
};

struct ConvergenceRow {
    long n = 0;
    long m = 0;
    double delta = 0.0;
    double g_value = 0.0;
    double flow_error = 0.0;
    double g_bound = 0.0;       ///< C_g |ln delta|^{2/3}
    double rate_bound = 0.0;    ///< C_rate / |ln delta|^{1/3}
    double epsilon_coupling = 0.0;  ///< |ln delta|^{-1/3}
    /// Bound on how far the true sup over [0, T] can exceed the sup over output times.
    double time_sampling_uncertainty = 0.0;
    bool bound_satisfied = false;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  ///< one per level, ascending n, m = reference
    double fitted_C_rate = 0.0;
    double fitted_C_g = 0.0;
    double tilde_radius = 0.0;
    std::vector<TrajectorySet> runs;   ///< one per level, then the reference run

    [[nodiscard]] bool all_satisfied() const;
};

/// Integrates every level and the reference on one ensemble and tests the rate shapes
///   error(n) <= C / |ln delta(n, ref)|^{1/3},   g(n) <= C' |ln delta(n, ref)|^{2/3},
/// with C and C' fitted on the coarsest level. A row also fails when its error does not
/// drop below that of the next coarser level: integrator noise then dominates the pair.
ConvergenceReport rate_harness(const HarnessSetup& setup);

}  // namespace vwflow
