#include "vwflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vwflow/errors.hpp"
#include "vwflow/parallel.hpp"

namespace vwflow {

namespace {

constexpr double kSubstepFraction = 0.1;

void validate_output_times(std::span<const double> times, double horizon) {
    if (times.empty()) throw InvalidArgument("integrate_flow: output_times is empty");
    if (times.front() != 0.0) throw InvalidArgument("integrate_flow: output_times must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw InvalidArgument("integrate_flow: output_times must increase");
    if (times.back() > horizon) throw InvalidArgument("integrate_flow: output_times exceed the horizon");
}

struct TrajectoryResult {
    double min_distance;
    double max_substep;
};

TrajectoryResult integrate_one(const CompositeField& field, PlaneVec x0, double horizon, double dt,
                               std::span<const double> output_times, std::span<PlaneVec> out) {
    const RegularizationLevel level = *field.level;
    const double speed = level.kernel_bound() + field.smooth.sup_norm.value_or(0.0);
    const double min_scale = 1.0 / static_cast<double>(level.n());

    std::size_t segment = 0;
    auto rhs = [&](double t, PlaneVec x) { return composite_velocity(field, t, x, segment); };

    PlaneVec x = x0;
    double t = 0.0;
    double min_dist = norm(x - field.path.at(0.0, segment));
    double max_h = 0.0;
    out[0] = x0;
    std::size_t next_out = 1;

    const double macro_count = std::ceil(horizon / dt);
    for (double m = 1.0; t < horizon; m += 1.0) {
        const double macro_end = m >= macro_count ? horizon : std::min(m * dt, horizon);
        while (t < macro_end) {
            const double d = norm(x - field.path.at(t, segment));
            double h = std::min(macro_end - t, kSubstepFraction * std::max(d, min_scale) / speed);
            double t_next = t + h;
            if (t_next >= macro_end || macro_end - t_next < 1e-3 * h) {
                t_next = macro_end;
                h = macro_end - t;
            }
            const double t_mid = std::min(t + 0.5 * h, horizon);
            const PlaneVec k1 = rhs(t, x);
            const PlaneVec k2 = rhs(t_mid, x + (0.5 * h) * k1);
            const PlaneVec k3 = rhs(t_mid, x + (0.5 * h) * k2);
            const PlaneVec k4 = rhs(t_next, x + h * k3);
            const PlaneVec x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

            while (next_out < output_times.size() && output_times[next_out] <= t_next) {
                const double s = (output_times[next_out] - t) / h;
                out[next_out] = s == 1.0 ? x_next : x + s * (x_next - x);
                ++next_out;
            }
            t = t_next;
            x = x_next;
            min_dist = std::min(min_dist, norm(x - field.path.at(t, segment)));
            max_h = std::max(max_h, h);
        }
    }
    return {min_dist, max_h};
}

}  // namespace

InitialEnsemble make_disk_ensemble(PlaneVec center, double radius, double spacing) {
    if (!(radius > 0.0)) throw InvalidArgument("ensemble: radius R must be > 0");
    if (!(spacing > 0.0)) throw InvalidArgument("ensemble: spacing h must be > 0");
    InitialEnsemble e{center, radius, spacing, {}, spacing * spacing};
    const long half = static_cast<long>(std::ceil(radius / spacing));
    for (long j = -half; j < half; ++j) {
        for (long i = -half; i < half; ++i) {
            const PlaneVec offset{(static_cast<double>(i) + 0.5) * spacing, (static_cast<double>(j) + 0.5) * spacing};
            if (norm(offset) <= radius) e.points.push_back(center + offset);
        }
    }
    if (e.points.empty()) throw InvalidArgument("ensemble: spacing too coarse, no grid point inside B_R");
    return e;
}

std::vector<double> uniform_times(double horizon, std::size_t count) {
    if (!(horizon >= 0.0)) throw InvalidArgument("uniform_times: horizon must be >= 0");
    if (horizon == 0.0 || count < 2) return {0.0};
    std::vector<double> times(count);
    for (std::size_t k = 0; k < count; ++k)
        times[k] = horizon * static_cast<double>(k) / static_cast<double>(count - 1);
    times.back() = horizon;
    return times;
}

TrajectorySet integrate_flow(const CompositeField& field, const InitialEnsemble& ensemble, double horizon,
                             double dt, std::span<const double> output_times, int threads,
                             std::string field_hash) {
    if (field.is_exact())
        throw UnsupportedOperation("integrate_flow: the exact singular field has no classical flow; use a finite level");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("integrate_flow: dt must be > 0");
    if (!(horizon >= 0.0)) throw InvalidArgument("integrate_flow: horizon must be >= 0");
    if (horizon > field.path.horizon()) throw InvalidArgument("integrate_flow: horizon exceeds the vortex path");
    validate_output_times(output_times, horizon);

    TrajectorySet traj;
    traj.output_times.assign(output_times.begin(), output_times.end());
    traj.level = *field.level;
    traj.field_hash = std::move(field_hash);
    traj.cell_weight = ensemble.cell_weight;
    traj.radial_speed_bound = field.radial_speed_bound().value_or(std::numeric_limits<double>::infinity());

    const std::size_t n_points = ensemble.points.size();
    const std::size_t n_times = output_times.size();
    traj.positions.resize(n_points * n_times);
    traj.min_distance.resize(n_points);
    std::vector<double> substeps(n_points, 0.0);

    parallel_for(n_points, threads, [&](std::size_t i) {
        std::span<PlaneVec> out(traj.positions.data() + i * n_times, n_times);
        const auto r = integrate_one(field, ensemble.points[i], horizon, dt, output_times, out);
        traj.min_distance[i] = r.min_distance;
        substeps[i] = r.max_substep;
    });
    for (double h : substeps) traj.max_substep = std::max(traj.max_substep, h);
    return traj;
}

DensityMap pushforward_density(const TrajectorySet& traj, std::size_t time_index, double grid_spacing) {
    if (time_index >= traj.time_count()) throw InvalidArgument("pushforward_density: time index out of range");
    if (!(grid_spacing > 0.0)) throw InvalidArgument("pushforward_density: grid spacing must be > 0");
    DensityMap map;
    map.spacing = grid_spacing;
    // Cloud-in-cell deposit onto the nodes (i h, j h); plain nearest-cell counts alias
    // against the deformed lattice and swing by O(h / spacing).
    const double per_point = traj.cell_weight / (grid_spacing * grid_spacing);
    for (std::size_t i = 0; i < traj.point_count(); ++i) {
        const PlaneVec x = traj.position(i, time_index);
        const double gx = x.x1 / grid_spacing;
        const double gy = x.x2 / grid_spacing;
        const double fx = std::floor(gx);
        const double fy = std::floor(gy);
        const double ax = gx - fx;
        const double ay = gy - fy;
        const long ix = static_cast<long>(fx);
        const long iy = static_cast<long>(fy);
        map.cells[{ix, iy}] += per_point * (1.0 - ax) * (1.0 - ay);
        map.cells[{ix + 1, iy}] += per_point * ax * (1.0 - ay);
        map.cells[{ix, iy + 1}] += per_point * (1.0 - ax) * ay;
        map.cells[{ix + 1, iy + 1}] += per_point * ax * ay;
    }
    for (const auto& [cell, value] : map.cells) map.max = std::max(map.max, value);
    return map;
}

std::vector<double> min_distance_profile(const TrajectorySet& traj) { return traj.min_distance; }

double confinement_radius(const CompositeField& field, const InitialEnsemble& ensemble, double horizon) {
    const auto speed = field.radial_speed_bound();
    if (!speed) throw UnsupportedOperation("confinement_radius: ||v||_inf unknown");
    return norm(ensemble.center) + ensemble.radius + 2.0 * field.path.sup_norm() + *speed * horizon;
}

FlowInvariantReport check_flow_invariants(const TrajectorySet& traj, const CompositeField& field,
                                          const InitialEnsemble& ensemble, double dt) {
    FlowInvariantReport report;
    const auto speed = field.radial_speed_bound();
    const auto sup = field.sup_bound();
    if (!speed || !sup) throw UnsupportedOperation("check_flow_invariants: ||v||_inf unknown");
    const double horizon = traj.output_times.back();
    const double r_conf = confinement_radius(field, ensemble, horizon) * (1.0 + 1e-12);
    const double slack = 1.0 + 5.0 * dt;

    std::vector<PlaneVec> z(traj.time_count());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = field.path.at(traj.output_times[k]);

    // The kernel is tangential, so the one-step scheme only moves points radially through
    // its truncation error. On a rotation by theta per substep RK4 scales the radius by
    // |R(i theta)| = 1 - theta^6/144 + O(theta^8); allow four times that, accumulated over
    // the substeps the clamp takes at the sample's distance.
    const double n = static_cast<double>(field.level->n());
    const double core_sq = field.level->core_sq();
    const double smooth_sup = *field.smooth.sup_norm;
    auto truncation = [&](double r, double span_t) {
        const double h = std::min(dt, 0.1 * std::max(r, 1.0 / n) / (0.5 * n + smooth_sup));
        const double theta = h / (r * r + core_sq);
        const double steps = std::ceil(span_t / h) + 1.0;
        return 4.0 * std::pow(theta, 6) / 144.0 * r * steps;
    };

    for (std::size_t i = 0; i < traj.point_count(); ++i) {
        for (std::size_t k = 0; k < traj.time_count(); ++k) {
            const PlaneVec x = traj.position(i, k);
            if (!is_finite(x) || norm(x) > r_conf) ++report.confinement;
            if (k == 0) continue;
            const PlaneVec prev = traj.position(i, k - 1);
            const double span_t = traj.output_times[k] - traj.output_times[k - 1];
            const double eps = 1e-12 * (1.0 + norm(x));
            const double r_prev = norm(prev - z[k - 1]);
            const double r_now = norm(x - z[k]);
            const double radial = std::abs(r_now - r_prev);
            if (radial > *speed * span_t * slack + truncation(std::min(r_prev, r_now), span_t) + eps) ++report.radial;
            if (norm(x - prev) > *sup * span_t * slack + eps) ++report.displacement;
        }
    }
    return report;
}

}  // namespace vwflow
