#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vwflow/plane_vec.hpp"

namespace vwflow {

/// Sampled Lipschitz world-line z(t) of a point vortex on [0, T].
///
/// Between samples the path is the piecewise-linear interpolant, so the
/// declared Lipschitz bound holds on the whole interval iff it holds
/// segment by segment. The constructor enforces that.
class PointVortexPath {
public:
    PointVortexPath(std::vector<double> times, std::vector<PlaneVec> positions,
                    double lipschitz_bound);

    /// Stationary vortex at `position` over [0, horizon].
    static PointVortexPath constant(PlaneVec position, double horizon);

    /// Builds the path from samples and sets the bound to the largest segment slope.
    static PointVortexPath from_samples(std::vector<double> times, std::vector<PlaneVec> positions);

    /// Position at time t; throws RangeError outside [0, T].
    [[nodiscard]] PlaneVec at(double t) const;

    /// Same as `at`, reusing `segment` as a search hint. Monotone queries are O(1).
    [[nodiscard]] PlaneVec at(double t, std::size_t& segment) const;

    [[nodiscard]] double horizon() const { return times_.back(); }
    [[nodiscard]] double lipschitz_bound() const { return lipschitz_bound_; }
    /// max_t |z(t)|, exact for the interpolant.
    [[nodiscard]] double sup_norm() const { return sup_norm_; }

    [[nodiscard]] std::span<const double> times() const { return times_; }
    [[nodiscard]] std::span<const PlaneVec> positions() const { return positions_; }

    friend bool operator==(const PointVortexPath&, const PointVortexPath&) = default;

private:
    std::vector<double> times_;
    std::vector<PlaneVec> positions_;
    double lipschitz_bound_ = 0.0;
    double sup_norm_ = 0.0;
};

/// Piecewise-linear evaluation of the sampled path.
PlaneVec eval_path(const PointVortexPath& path, double t);

/// min over i != j and t in [0, T] of |z_i(t) - z_j(t)|, exact for the interpolants.
/// Paths must share the horizon. Returns +inf for fewer than two paths.
double min_separation(std::span<const PointVortexPath> paths);

}  // namespace vwflow
