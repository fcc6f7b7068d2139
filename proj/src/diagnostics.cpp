#include "vwflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vwflow/errors.hpp"
#include "vwflow/parallel.hpp"

namespace vwflow {

namespace {

constexpr double kFitSlack = 1e-12;

void require_comparable(const TrajectorySet& a, const TrajectorySet& b, const InitialEnsemble& ensemble,
                        const char* who) {
    if (a.output_times != b.output_times)
        throw InvalidArgument(std::string(who) + ": trajectory sets use different output times");
    if (a.point_count() != b.point_count() || a.point_count() != ensemble.points.size())
        throw InvalidArgument(std::string(who) + ": trajectory sets do not match the ensemble");
}

// Adaptive cell-center rule on one square cell for a fixed time.
class CellIntegrator {
public:
    CellIntegrator(const CompositeField& a, const CompositeField& b, double t, double min_cell)
        : a_(a), b_(b), t_(t), z_(a.path.at(t)), min_cell_(min_cell) {}

    double integrate(PlaneVec center, double size) const {
        const double diag = size * std::sqrt(2.0);
        if (size > min_cell_ && norm(center - z_) < 2.0 * diag) {
            const double q = 0.25 * size;
            return integrate(center + PlaneVec{-q, -q}, 0.5 * size) + integrate(center + PlaneVec{q, -q}, 0.5 * size) +
                   integrate(center + PlaneVec{-q, q}, 0.5 * size) + integrate(center + PlaneVec{q, q}, 0.5 * size);
        }
        const PlaneVec diff = composite_velocity(a_, t_, center) - composite_velocity(b_, t_, center);
        return norm(diff) * size * size;
    }

private:
    const CompositeField& a_;
    const CompositeField& b_;
    double t_;
    PlaneVec z_;
    double min_cell_;
};

}  // namespace

double delta_l1(const CompositeField& field_n, const CompositeField& field_m, double horizon, double radius,
                std::size_t time_samples, double space_spacing, int threads) {
    if (field_n.is_exact() || field_m.is_exact())
        throw InvalidArgument("delta_l1: both fields need a finite regularization level");
    if (!(field_n.path == field_m.path)) throw InvalidArgument("delta_l1: fields have mismatched vortex paths");
    if (!(radius > 0.0)) throw InvalidArgument("delta_l1: radius must be > 0");
    if (time_samples == 0) throw InvalidArgument("delta_l1: time_samples must be >= 1");
    if (!(horizon >= 0.0) || horizon > field_n.path.horizon())
        throw InvalidArgument("delta_l1: horizon outside the path interval");
    if (horizon == 0.0) return 0.0;

    const double spacing = space_spacing > 0.0 ? space_spacing : radius / 128.0;
    const long n_max = std::max(field_n.level->n(), field_m.level->n());
    const double min_cell = 1.0 / (8.0 * static_cast<double>(n_max));

    std::vector<PlaneVec> centers;
    const long half = static_cast<long>(std::ceil(radius / spacing));
    for (long j = -half; j < half; ++j)
        for (long i = -half; i < half; ++i) {
            const PlaneVec c{(static_cast<double>(i) + 0.5) * spacing, (static_cast<double>(j) + 0.5) * spacing};
            if (norm(c) <= radius) centers.push_back(c);
        }

    const double dt = horizon / static_cast<double>(time_samples);
    std::vector<double> per_time(time_samples, 0.0);
    parallel_for(time_samples, threads, [&](std::size_t k) {
        const double t = (static_cast<double>(k) + 0.5) * dt;
        const CellIntegrator cells(field_n, field_m, t, min_cell);
        double sum = 0.0;
        for (PlaneVec c : centers) sum += cells.integrate(c, spacing);
        per_time[k] = sum;
    });
    double total = 0.0;
    for (double s : per_time) total += s;
    return total * dt;
}

double g_functional(const TrajectorySet& traj_n, const TrajectorySet& traj_m, double delta,
                    const InitialEnsemble& ensemble) {
    require_comparable(traj_n, traj_m, ensemble, "g_functional");
    if (!(delta > 0.0)) throw InvalidArgument("g_functional: delta must be > 0");
    double total = 0.0;
    for (std::size_t i = 0; i < traj_n.point_count(); ++i) {
        double sup = 0.0;
        for (std::size_t k = 0; k < traj_n.time_count(); ++k)
            sup = std::max(sup, std::log(norm(traj_n.position(i, k) - traj_m.position(i, k)) / delta + 1.0));
        total += sup;
    }
    return total * ensemble.cell_weight;
}

double flow_error(const TrajectorySet& traj_n, const TrajectorySet& traj_m, const InitialEnsemble& ensemble) {
    require_comparable(traj_n, traj_m, ensemble, "flow_error");
    double total = 0.0;
    for (std::size_t i = 0; i < traj_n.point_count(); ++i) {
        double sup = 0.0;
        for (std::size_t k = 0; k < traj_n.time_count(); ++k)
            sup = std::max(sup, norm(traj_n.position(i, k) - traj_m.position(i, k)));
        total += sup;
    }
    return total * ensemble.cell_weight;
}

std::vector<double> default_epsilons(double radius, int first, int last) {
    std::vector<double> eps;
    for (int k = first; k <= last; ++k) eps.push_back(std::ldexp(radius, -k));
    return eps;
}

CollisionReport near_collision_measure(const TrajectorySet& traj, const InitialEnsemble& ensemble,
                                       std::span<const double> epsilons) {
    if (traj.point_count() != ensemble.points.size())
        throw InvalidArgument("near_collision_measure: trajectory set does not match the ensemble");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (!(epsilons[k] > 0.0)) throw InvalidArgument("near_collision_measure: epsilons must be positive");
        if (k > 0 && !(epsilons[k] < epsilons[k - 1]))
            throw InvalidArgument("near_collision_measure: epsilons must decrease");
    }

    CollisionReport report;
    report.epsilons.assign(epsilons.begin(), epsilons.end());
    std::vector<double> sorted = traj.min_distance;
    std::sort(sorted.begin(), sorted.end());
    for (double eps : epsilons) {
        const auto count = std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin();
        report.measures.push_back(static_cast<double>(count) * ensemble.cell_weight);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        if (report.measures[k] <= 0.0) continue;
        const double x = std::log(epsilons[k]);
        const double y = std::log(report.measures[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    const double m = static_cast<double>(used);
    const double denom = m * sxx - sx * sx;
    report.fitted_exponent =
        used >= 2 && denom > 0.0 ? (m * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
    report.reported_uncertainty = traj.radial_speed_bound * traj.max_substep;
    return report;
}

CompressibilityResult compressibility(const TrajectorySet& traj, double grid_spacing, double L0) {
    CompressibilityResult r;
    for (std::size_t k = 0; k < traj.time_count(); ++k)
        r.empirical_LR = std::max(r.empirical_LR, pushforward_density(traj, k, grid_spacing).max);
    r.bound_ok = r.empirical_LR <= std::exp(L0) * 1.05;
    return r;
}

bool ConvergenceReport::all_satisfied() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.bound_satisfied; });
}

ConvergenceReport rate_harness(const HarnessSetup& setup) {
    if (setup.levels.empty()) throw InvalidArgument("rate_harness: no levels");
    std::vector<long> levels = setup.levels;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.back() > setup.reference) throw InvalidArgument("rate_harness: levels must not exceed the reference");
    if (!setup.smooth.sup_norm) throw UnsupportedOperation("rate_harness: ||v||_inf must be declared");

    auto composite = [&](long n) { return make_composite(setup.smooth, setup.path, RegularizationLevel(n)); };
    auto integrate = [&](const CompositeField& f) {
        return integrate_flow(f, setup.ensemble, setup.horizon, setup.dt, setup.output_times, setup.threads,
                              setup.field_hash);
    };

    ConvergenceReport report;
    const CompositeField reference = composite(setup.reference);
    report.tilde_radius = confinement_radius(reference, setup.ensemble, setup.horizon);
    const TrajectorySet ref_run = integrate(reference);

    double max_gap = 0.0;
    for (std::size_t k = 1; k < setup.output_times.size(); ++k)
        max_gap = std::max(max_gap, setup.output_times[k] - setup.output_times[k - 1]);

    for (long n : levels) {
        ConvergenceRow row;
        row.n = n;
        row.m = setup.reference;
        const CompositeField field = composite(n);
        report.runs.push_back(n == setup.reference ? ref_run : integrate(field));
        const TrajectorySet& run = report.runs.back();
        row.flow_error = flow_error(run, ref_run, setup.ensemble);
        if (n != setup.reference) {
            const double spacing = report.tilde_radius / static_cast<double>(setup.space_divisions);
            row.delta = delta_l1(field, reference, setup.horizon, report.tilde_radius, setup.time_samples, spacing,
                                 setup.threads);
            row.g_value = g_functional(run, ref_run, row.delta, setup.ensemble);
        }
        row.time_sampling_uncertainty = 0.5 * max_gap * (*field.sup_bound() + *reference.sup_bound());
        report.rows.push_back(row);
    }
    report.runs.push_back(ref_run);

    // Constants fitted on the coarsest pair with a usable delta.
    for (const auto& row : report.rows) {
        const double log_delta = std::abs(std::log(row.delta));
        if (row.delta > 0.0 && log_delta > 0.0) {
            report.fitted_C_rate = row.flow_error * std::cbrt(log_delta);
            report.fitted_C_g = row.g_value / std::pow(log_delta, 2.0 / 3.0);
            break;
        }
    }

    double prev_error = std::numeric_limits<double>::infinity();
    for (auto& row : report.rows) {
        if (row.delta > 0.0) {
            const double log_delta = std::abs(std::log(row.delta));
            row.epsilon_coupling = 1.0 / std::cbrt(log_delta);
            row.rate_bound = report.fitted_C_rate / std::cbrt(log_delta);
            row.g_bound = report.fitted_C_g * std::pow(log_delta, 2.0 / 3.0);
            row.bound_satisfied = row.flow_error <= row.rate_bound * (1.0 + kFitSlack) &&
                                  row.g_value <= row.g_bound * (1.0 + kFitSlack) && row.flow_error < prev_error;
        } else {
            row.bound_satisfied = row.flow_error == 0.0 && row.g_value == 0.0;
        }
        prev_error = row.flow_error;
    }
    return report;
}

}  // namespace vwflow
