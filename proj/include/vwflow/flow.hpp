#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vwflow/fields.hpp"

namespace vwflow {

/// Uniform grid discretization of the disk B_R(center).
struct InitialEnsemble {
    PlaneVec center;
    double radius = 0.0;
    double spacing = 0.0;
    std::vector<PlaneVec> points;
    double cell_weight = 0.0;  ///< h^2
};

/// Grid points center + ((i + 1/2) h, (j + 1/2) h) that lie in the closed disk.
InitialEnsemble make_disk_ensemble(PlaneVec center, double radius, double spacing);

/// Approximate flow X_n(t, x) sampled on output times, one trajectory per ensemble point.
struct TrajectorySet {
    std::vector<double> output_times;
    std::vector<PlaneVec> positions;    ///< point-major, positions[i * times + k]
    std::vector<double> min_distance;   ///< min over substep endpoints of |X_n - z|
    RegularizationLevel level{1};
    std::string field_hash;
    double cell_weight = 0.0;
    double max_substep = 0.0;
    double radial_speed_bound = 0.0;    ///< ||v||_inf + ||z'||_inf of the integrated field

    [[nodiscard]] std::size_t point_count() const { return min_distance.size(); }
    [[nodiscard]] std::size_t time_count() const { return output_times.size(); }
    [[nodiscard]] PlaneVec position(std::size_t point, std::size_t time_index) const {
        return positions[point * output_times.size() + time_index];
    }
};

/// `count` equispaced times 0 = t_0 < ... < t_{count-1} = horizon (a single 0 when horizon is 0).
std::vector<double> uniform_times(double horizon, std::size_t count);

/// Classical RK4 integration of every ensemble trajectory of a finite-level field.
///
/// Macro steps of length dt are split into substeps
///   dt' = min(dt, 0.1 * max(d, 1/n) / (n/2 + ||v||_inf)),  d = |X - z(t)|,
/// which bounds the rotation per substep near the vortex. Output positions are
/// linear interpolants of the substep endpoints. Exact-level fields are refused.
TrajectorySet integrate_flow(const CompositeField& field, const InitialEnsemble& ensemble, double horizon,
                             double dt, std::span<const double> output_times, int threads = 1,
                             std::string field_hash = {});

/// Pushforward density estimate: cloud-in-cell mass per grid node, normalized by cell area.
struct DensityMap {
    double spacing = 0.0;
    std::map<std::pair<long, long>, double> cells;  ///< node (i, j) at (i s, j s) -> density
    double max = 0.0;                               ///< empirical L_R
};

DensityMap pushforward_density(const TrajectorySet& traj, std::size_t time_index, double grid_spacing);

std::vector<double> min_distance_profile(const TrajectorySet& traj);

/// |center| + R + 2 ||z||_inf + (||v||_inf + ||z'||_inf) T; needs a known ||v||_inf.
double confinement_radius(const CompositeField& field, const InitialEnsemble& ensemble, double horizon);

/// Violation counts of the a priori bounds every computed trajectory must satisfy.
struct FlowInvariantReport {
    std::size_t confinement = 0;   ///< samples outside the confinement disk
    std::size_t radial = 0;        ///< |d/dt |X - z|| above ||v|| + ||z'||
    std::size_t displacement = 0;  ///< |X(t_{k+1}) - X(t_k)| above sup|b_n| (t_{k+1} - t_k)
    [[nodiscard]] bool ok() const { return confinement == 0 && radial == 0 && displacement == 0; }
};

FlowInvariantReport check_flow_invariants(const TrajectorySet& traj, const CompositeField& field,
                                          const InitialEnsemble& ensemble, double dt);

}  // namespace vwflow
