#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vwflow/path.hpp"
#include "vwflow/plane_vec.hpp"

namespace vwflow {

/// Weighted regularized point vortices discretizing a diffuse vorticity.
/// Weights are circulations and never change under evolution.
struct BlobEnsemble {
    std::vector<PlaneVec> positions;
    std::vector<double> weights;
    double core = 0.0;  ///< blob regularization length; the kernel is y^perp / (|y|^2 + core^2)

    [[nodiscard]] std::size_t size() const { return positions.size(); }
    [[nodiscard]] double total_circulation() const;
};

struct Window {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    friend bool operator==(const Window&, const Window&) = default;
};

/// Blobs at the cell centers of a spacing-h lattice over `window`, weight omega0(x) h^2.
/// Cells where omega0 vanishes carry no blob.
BlobEnsemble make_blob_lattice(const std::function<double(PlaneVec)>& omega0, const Window& window,
                               double spacing, double core);

struct VortexWaveState {
    PlaneVec vortex;
    double strength = 1.0;
    BlobEnsemble ensemble;
    double t = 0.0;
};

/// v(x) = (1/2pi) sum_j w_j K_core(x - x_j).
PlaneVec induced_velocity(const BlobEnsemble& ensemble, PlaneVec x);

/// One RK4 step of the coupled system. Blobs move with v + (strength/2pi) K_core(. - z);
/// the vortex moves with v alone.
VortexWaveState step(const VortexWaveState& state, double dt, int threads = 1);

struct VortexWaveRun {
    PointVortexPath path = PointVortexPath::constant({0.0, 0.0}, 0.0);
    std::vector<double> snapshot_times;
    std::vector<BlobEnsemble> snapshots;
};

/// Steps from t = 0 to `horizon`, landing exactly on every snapshot time. The returned
/// path samples z at every step, with Lipschitz bound 1.1 x the largest observed speed.
VortexWaveRun run(const VortexWaveState& initial, double horizon, double dt,
                  std::span<const double> snapshot_times, int threads = 1);

/// Cell averages of the blob vorticity on a uniform grid over a window.
struct VorticityGrid {
    Window window;
    double spacing = 0.0;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> values;   ///< row-major, values[j * nx + i]
    double outside_weight = 0.0;  ///< circulation of blobs that fell outside the window

    [[nodiscard]] double value(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
    /// sum of value * h^2.
    [[nodiscard]] double integral() const;
    [[nodiscard]] double l2_norm() const;
};

/// Nearest-cell deposition: each blob adds w / h^2 to the cell containing it.
VorticityGrid deposit_vorticity(const BlobEnsemble& ensemble, double grid_spacing, const Window& window);

}  // namespace vwflow
