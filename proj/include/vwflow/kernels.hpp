#pragma once

#include <span>

#include "vwflow/path.hpp"
#include "vwflow/plane_vec.hpp"

namespace vwflow {

/// Index n >= 1 of the algebraic desingularization x^perp / (|x|^2 + 1/n^2).
class RegularizationLevel {
public:
    explicit RegularizationLevel(long n);

    [[nodiscard]] long n() const { return n_; }
    /// The core parameter 1/n^2.
    [[nodiscard]] double core_sq() const { return 1.0 / (static_cast<double>(n_) * static_cast<double>(n_)); }
    /// sup_y |K_n(y)| = n/2, attained on |y| = 1/n.
    [[nodiscard]] double kernel_bound() const { return 0.5 * static_cast<double>(n_); }

    friend bool operator==(RegularizationLevel, RegularizationLevel) = default;
    friend auto operator<=>(RegularizationLevel, RegularizationLevel) = default;

private:
    long n_;
};

/// Below this separation the singular kernel is treated as evaluated at its pole.
inline constexpr double kCoincidenceTolerance = 1e-30;

/// K(y) = y^perp / |y|^2. Throws DomainError at y = 0.
PlaneVec biot_savart_kernel(PlaneVec y);

/// K_n(y) = y^perp / (|y|^2 + 1/n^2); smooth, divergence free, |K_n| <= n/2.
PlaneVec regularized_kernel(PlaneVec y, RegularizationLevel level);

/// Same family with an explicit core: y^perp / (|y|^2 + core_sq).
inline PlaneVec algebraic_kernel(PlaneVec y, double core_sq) {
    const double s = 1.0 / (norm_sq(y) + core_sq);
    return {-y.x2 * s, y.x1 * s};
}

/// H(t, x) = K(x - z(t)).
PlaneVec singular_drift(double t, PlaneVec x, const PointVortexPath& path);

/// K_n(x - z(t)); bounded by n/2 everywhere, zero on the path.
PlaneVec regularized_drift(double t, PlaneVec x, const PointVortexPath& path, RegularizationLevel level);

/// sum_i d_i K(x - z_i(t)). Paths and strengths must have equal length.
PlaneVec multi_vortex_drift(double t, PlaneVec x, std::span<const PointVortexPath> paths,
                            std::span<const double> strengths);

}  // namespace vwflow
