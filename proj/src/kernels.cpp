#include "vwflow/kernels.hpp"

#include <string>

#include "vwflow/errors.hpp"

namespace vwflow {

RegularizationLevel::RegularizationLevel(long n) : n_(n) {
    if (n < 1) throw InvalidArgument("regularization level must be >= 1, got " + std::to_string(n));
}

PlaneVec biot_savart_kernel(PlaneVec y) {
    const double r_sq = norm_sq(y);
    if (!(r_sq >= kCoincidenceTolerance * kCoincidenceTolerance))
        throw DomainError("biot_savart_kernel: evaluation at the singularity");
    const double s = 1.0 / r_sq;
    return {-y.x2 * s, y.x1 * s};
}

PlaneVec regularized_kernel(PlaneVec y, RegularizationLevel level) {
    return algebraic_kernel(y, level.core_sq());
}

PlaneVec singular_drift(double t, PlaneVec x, const PointVortexPath& path) {
    return biot_savart_kernel(x - path.at(t));
}

PlaneVec regularized_drift(double t, PlaneVec x, const PointVortexPath& path, RegularizationLevel level) {
    return regularized_kernel(x - path.at(t), level);
}

PlaneVec multi_vortex_drift(double t, PlaneVec x, std::span<const PointVortexPath> paths,
                            std::span<const double> strengths) {
    if (paths.size() != strengths.size())
        throw InvalidArgument("multi_vortex_drift: paths and strengths differ in length");
    PlaneVec sum{};
    for (std::size_t i = 0; i < paths.size(); ++i) {
        // Coincidence is an error even for a zero-strength vortex.
        sum += strengths[i] * singular_drift(t, x, paths[i]);
    }
    return sum;
}

}  // namespace vwflow
