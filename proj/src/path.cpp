#include "vwflow/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vwflow/errors.hpp"

namespace vwflow {

namespace {

constexpr double kLipschitzSlack = 1e-9;

// Distance from the origin to the segment a + s (b - a), s in [0, 1].
double segment_min_norm(PlaneVec a, PlaneVec b) {
    const PlaneVec d = b - a;
    const double len_sq = norm_sq(d);
    double s = 0.0;
    if (len_sq > 0.0) s = std::clamp(-dot(a, d) / len_sq, 0.0, 1.0);
    return norm(a + s * d);
}

}  // namespace

PointVortexPath::PointVortexPath(std::vector<double> times, std::vector<PlaneVec> positions,
                                 double lipschitz_bound)
    : times_(std::move(times)), positions_(std::move(positions)), lipschitz_bound_(lipschitz_bound) {
    if (times_.empty()) throw InvalidArgument("path: at least one sample required");
    if (times_.size() != positions_.size())
        throw InvalidArgument("path: times and positions differ in length");
    if (times_.front() != 0.0) throw InvalidArgument("path: first sample time must be 0");
    if (!(lipschitz_bound_ >= 0.0) || !std::isfinite(lipschitz_bound_))
        throw InvalidArgument("path: lipschitz_bound must be finite and >= 0");
    for (std::size_t k = 0; k < positions_.size(); ++k) {
        if (!is_finite(positions_[k]) || !std::isfinite(times_[k]))
            throw InvalidArgument("path: non-finite sample at index " + std::to_string(k));
        sup_norm_ = std::max(sup_norm_, norm(positions_[k]));
        if (k == 0) continue;
        const double dt = times_[k] - times_[k - 1];
        if (!(dt > 0.0)) throw InvalidArgument("path: sample times must be strictly increasing");
        const double step = norm(positions_[k] - positions_[k - 1]);
        if (step > lipschitz_bound_ * dt * (1.0 + kLipschitzSlack))
            throw InvalidArgument("path: segment " + std::to_string(k) +
                                  " violates the Lipschitz bound");
    }
}

PointVortexPath PointVortexPath::constant(PlaneVec position, double horizon) {
    if (!(horizon >= 0.0)) throw InvalidArgument("path: horizon must be >= 0");
    if (horizon == 0.0) return PointVortexPath({0.0}, {position}, 0.0);
    return PointVortexPath({0.0, horizon}, {position, position}, 0.0);
}

PointVortexPath PointVortexPath::from_samples(std::vector<double> times, std::vector<PlaneVec> positions) {
    double lip = 0.0;
    for (std::size_t k = 1; k < times.size() && k < positions.size(); ++k) {
        const double dt = times[k] - times[k - 1];
        if (dt > 0.0) lip = std::max(lip, norm(positions[k] - positions[k - 1]) / dt);
    }
    return PointVortexPath(std::move(times), std::move(positions), lip);
}

PlaneVec PointVortexPath::at(double t) const {
    std::size_t segment = 0;
    return at(t, segment);
}

PlaneVec PointVortexPath::at(double t, std::size_t& segment) const {
    if (!(t >= 0.0 && t <= times_.back()))
        throw RangeError("path: time " + std::to_string(t) + " outside [0, " +
                         std::to_string(times_.back()) + "]");
    const std::size_t last = times_.size() - 1;
    if (last == 0) return positions_[0];
    if (segment >= last) segment = last - 1;
    if (!(times_[segment] <= t && t <= times_[segment + 1])) {
        if (segment + 2 <= last && times_[segment + 1] <= t && t <= times_[segment + 2]) {
            ++segment;
        } else {
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            segment = static_cast<std::size_t>(std::distance(times_.begin(), it));
            segment = std::clamp<std::size_t>(segment, 1, last) - 1;
        }
    }
    const double t0 = times_[segment];
    const double t1 = times_[segment + 1];
    if (t == t0) return positions_[segment];
    if (t == t1) return positions_[segment + 1];
    const double s = (t - t0) / (t1 - t0);
    return positions_[segment] + s * (positions_[segment + 1] - positions_[segment]);
}

PlaneVec eval_path(const PointVortexPath& path, double t) { return path.at(t); }

double min_separation(std::span<const PointVortexPath> paths) {
    double best = std::numeric_limits<double>::infinity();
    if (paths.size() < 2) return best;
    std::vector<double> breaks;
    for (const auto& p : paths) {
        if (p.horizon() != paths[0].horizon())
            throw InvalidArgument("min_separation: paths have different horizons");
        breaks.insert(breaks.end(), p.times().begin(), p.times().end());
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
            std::size_t hi = 0, hj = 0;
            PlaneVec prev = paths[i].at(breaks[0], hi) - paths[j].at(breaks[0], hj);
            best = std::min(best, norm(prev));
            for (std::size_t k = 1; k < breaks.size(); ++k) {
                const PlaneVec cur = paths[i].at(breaks[k], hi) - paths[j].at(breaks[k], hj);
                best = std::min(best, segment_min_norm(prev, cur));
                prev = cur;
            }
        }
    }
    return best;
}

}  // namespace vwflow
