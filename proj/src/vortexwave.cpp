#include "vwflow/vortexwave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vwflow/errors.hpp"
#include "vwflow/kernels.hpp"
#include "vwflow/parallel.hpp"

namespace vwflow {

namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

struct BlobColumns {
    std::vector<double> x1, x2;
};

// sum_j w_j K_core(p - x_j) with four interleaved partial sums. The lane layout is
// fixed, so the result depends only on the inputs, never on the caller's threading.
PlaneVec kernel_sum(const BlobColumns& blobs, std::span<const double> weights, PlaneVec p, double core_sq) {
    constexpr std::size_t kLanes = 4;
    double u[kLanes] = {};
    double v[kLanes] = {};
    const std::size_t n = weights.size();
    const double* xs = blobs.x1.data();
    const double* ys = blobs.x2.data();
    const double* ws = weights.data();
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) {
            const double dx = p.x1 - xs[j + l];
            const double dy = p.x2 - ys[j + l];
            const double s = ws[j + l] / (dx * dx + dy * dy + core_sq);
            u[l] -= dy * s;
            v[l] += dx * s;
        }
    }
    for (std::size_t l = 0; j < n; ++j, ++l) {
        const double dx = p.x1 - xs[j];
        const double dy = p.x2 - ys[j];
        const double s = ws[j] / (dx * dx + dy * dy + core_sq);
        u[l] -= dy * s;
        v[l] += dx * s;
    }
    return {(u[0] + u[1]) + (u[2] + u[3]), (v[0] + v[1]) + (v[2] + v[3])};
}

BlobColumns columns_of(std::span<const PlaneVec> positions) {
    BlobColumns c;
    c.x1.reserve(positions.size());
    c.x2.reserve(positions.size());
    for (PlaneVec p : positions) {
        c.x1.push_back(p.x1);
        c.x2.push_back(p.x2);
    }
    return c;
}

struct Rates {
    std::vector<PlaneVec> blobs;
    PlaneVec vortex;
};

Rates coupled_rates(std::span<const PlaneVec> positions, PlaneVec z, std::span<const double> weights,
                    double strength, double core_sq, int threads) {
    const BlobColumns cols = columns_of(positions);
    Rates r;
    r.blobs.resize(positions.size());
    const std::size_t n = positions.size();
    parallel_for(n + 1, threads, [&](std::size_t i) {
        if (i == n) {
            r.vortex = kInvTwoPi * kernel_sum(cols, weights, z, core_sq);
            return;
        }
        const PlaneVec x = positions[i];
        r.blobs[i] = kInvTwoPi * (kernel_sum(cols, weights, x, core_sq) + strength * algebraic_kernel(x - z, core_sq));
    });
    return r;
}

std::vector<PlaneVec> advance(std::span<const PlaneVec> x, std::span<const PlaneVec> rate, double h) {
    std::vector<PlaneVec> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * rate[i];
    return out;
}

}  // namespace

double BlobEnsemble::total_circulation() const {
    double sum = 0.0;
    for (double w : weights) sum += w;
    return sum;
}

BlobEnsemble make_blob_lattice(const std::function<double(PlaneVec)>& omega0, const Window& window,
                               double spacing, double core) {
    if (!(spacing > 0.0)) throw InvalidArgument("blob lattice: spacing must be > 0");
    if (!(core > 0.0)) throw InvalidArgument("blob lattice: core must be > 0");
    if (!(window.x_max > window.x_min && window.y_max > window.y_min))
        throw InvalidArgument("blob lattice: empty window");
    BlobEnsemble e;
    e.core = core;
    const double cell_area = spacing * spacing;
    for (long j = 0;; ++j) {
        const double y = window.y_min + (static_cast<double>(j) + 0.5) * spacing;
        if (y >= window.y_max) break;
        for (long i = 0;; ++i) {
            const double x = window.x_min + (static_cast<double>(i) + 0.5) * spacing;
            if (x >= window.x_max) break;
            const double w = omega0({x, y}) * cell_area;
            if (w == 0.0) continue;
            if (!std::isfinite(w)) throw InvalidArgument("blob lattice: omega0 is not finite");
            e.positions.push_back({x, y});
            e.weights.push_back(w);
        }
    }
    return e;
}

PlaneVec induced_velocity(const BlobEnsemble& ensemble, PlaneVec x) {
    const BlobColumns cols = columns_of(ensemble.positions);
    return kInvTwoPi * kernel_sum(cols, ensemble.weights, x, ensemble.core * ensemble.core);
}

VortexWaveState step(const VortexWaveState& state, double dt, int threads) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("vortexwave step: dt must be > 0");
    const auto& e = state.ensemble;
    if (e.positions.size() != e.weights.size())
        throw InvalidArgument("vortexwave step: positions and weights differ in length");
    const double core_sq = e.core * e.core;
    auto rates = [&](std::span<const PlaneVec> x, PlaneVec z) {
        return coupled_rates(x, z, e.weights, state.strength, core_sq, threads);
    };

    const PlaneVec z0 = state.vortex;
    const Rates k1 = rates(e.positions, z0);
    const Rates k2 = rates(advance(e.positions, k1.blobs, 0.5 * dt), z0 + (0.5 * dt) * k1.vortex);
    const Rates k3 = rates(advance(e.positions, k2.blobs, 0.5 * dt), z0 + (0.5 * dt) * k2.vortex);
    const Rates k4 = rates(advance(e.positions, k3.blobs, dt), z0 + dt * k3.vortex);

    VortexWaveState next = state;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        next.ensemble.positions[i] =
            e.positions[i] + w * (k1.blobs[i] + 2.0 * k2.blobs[i] + 2.0 * k3.blobs[i] + k4.blobs[i]);
    next.vortex = z0 + w * (k1.vortex + 2.0 * k2.vortex + 2.0 * k3.vortex + k4.vortex);
    next.t = state.t + dt;
    return next;
}

VortexWaveRun run(const VortexWaveState& initial, double horizon, double dt, std::span<const double> snapshot_times,
                  int threads) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("vortexwave run: dt must be > 0");
    if (!(horizon >= 0.0)) throw InvalidArgument("vortexwave run: horizon must be >= 0");
    if (initial.t != 0.0) throw InvalidArgument("vortexwave run: initial state must be at t = 0");
    std::vector<double> snaps(snapshot_times.begin(), snapshot_times.end());
    std::sort(snaps.begin(), snaps.end());
    snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
    for (double s : snaps)
        if (s < 0.0 || s > horizon) throw InvalidArgument("vortexwave run: snapshot time outside [0, T]");

    // Step endpoints: the dt grid, every snapshot time and T; exact targets win over grid
    // points that fall within rounding distance of them.
    std::vector<std::pair<double, bool>> marks;
    for (long k = 1; static_cast<double>(k) * dt < horizon; ++k) marks.emplace_back(static_cast<double>(k) * dt, false);
    for (double s : snaps)
        if (s > 0.0) marks.emplace_back(s, true);
    if (horizon > 0.0) marks.emplace_back(horizon, true);
    std::sort(marks.begin(), marks.end());
    std::vector<double> breaks;
    const double merge = 1e-9 * dt;
    for (const auto& [t, exact] : marks) {
        if (!breaks.empty() && t - breaks.back() < merge) {
            if (exact) breaks.back() = t;
            continue;
        }
        breaks.push_back(t);
    }

    VortexWaveRun out;
    std::vector<double> times{0.0};
    std::vector<PlaneVec> path{initial.vortex};
    double max_speed = norm(induced_velocity(initial.ensemble, initial.vortex));
    double max_slope = 0.0;
    std::size_t next_snap = 0;
    auto capture = [&](const VortexWaveState& s) {
        while (next_snap < snaps.size() && snaps[next_snap] == s.t) {
            out.snapshot_times.push_back(s.t);
            out.snapshots.push_back(s.ensemble);
            ++next_snap;
        }
    };

    VortexWaveState state = initial;
    capture(state);
    for (double target : breaks) {
        const double h = target - state.t;
        VortexWaveState next = step(state, h, threads);
        next.t = target;
        max_speed = std::max(max_speed, norm(induced_velocity(next.ensemble, next.vortex)));
        max_slope = std::max(max_slope, norm(next.vortex - state.vortex) / h);
        times.push_back(target);
        path.push_back(next.vortex);
        state = std::move(next);
        capture(state);
    }
    out.path = PointVortexPath(std::move(times), std::move(path), 1.1 * std::max(max_speed, max_slope));
    return out;
}

double VorticityGrid::integral() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * spacing * spacing;
}

double VorticityGrid::l2_norm() const {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum * spacing * spacing);
}

VorticityGrid deposit_vorticity(const BlobEnsemble& ensemble, double grid_spacing, const Window& window) {
    if (!(grid_spacing > 0.0)) throw InvalidArgument("deposit_vorticity: grid spacing must be > 0");
    if (!(window.x_max > window.x_min && window.y_max > window.y_min))
        throw InvalidArgument("deposit_vorticity: empty window");
    VorticityGrid g;
    g.window = window;
    g.spacing = grid_spacing;
    g.nx = static_cast<std::size_t>(std::ceil((window.x_max - window.x_min) / grid_spacing));
    g.ny = static_cast<std::size_t>(std::ceil((window.y_max - window.y_min) / grid_spacing));
    g.values.assign(g.nx * g.ny, 0.0);
    const double inv_area = 1.0 / (grid_spacing * grid_spacing);
    for (std::size_t b = 0; b < ensemble.size(); ++b) {
        const PlaneVec p = ensemble.positions[b];
        const double fi = std::floor((p.x1 - window.x_min) / grid_spacing);
        const double fj = std::floor((p.x2 - window.y_min) / grid_spacing);
        if (fi < 0.0 || fj < 0.0 || fi >= static_cast<double>(g.nx) || fj >= static_cast<double>(g.ny)) {
            g.outside_weight += ensemble.weights[b];
            continue;
        }
        g.values[static_cast<std::size_t>(fj) * g.nx + static_cast<std::size_t>(fi)] += ensemble.weights[b] * inv_area;
    }
    return g;
}

}  // namespace vwflow
