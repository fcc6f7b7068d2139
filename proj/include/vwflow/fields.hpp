#pragma once

#include <functional>
#include <optional>

#include "vwflow/kernels.hpp"
#include "vwflow/path.hpp"
#include "vwflow/plane_vec.hpp"

namespace vwflow {

using VelocityFn = std::function<PlaneVec(double t, PlaneVec x)>;
using ScalarFn = std::function<double(double t, PlaneVec x)>;

/// ||grad v||_{L^1(L^p)} together with its exponent p.
struct GradientNorm {
    double value = 0.0;
    double exponent = 0.0;
};

/// The smooth part v of the drift, with whatever norm bounds are known for it.
struct TimeVaryingField {
    VelocityFn velocity;
    ScalarFn divergence;                         ///< empty when unavailable
    std::optional<double> sup_norm;              ///< ||v||_{L^inf(L^inf)}
    std::optional<double> div_sup_integral;      ///< L0 = int_0^T ||div v(s)||_inf ds
    std::optional<GradientNorm> grad_lp_norm;
    /// Declared smooth: mollification is the identity for this field.
    bool already_smooth = false;

    [[nodiscard]] bool has_divergence() const { return static_cast<bool>(divergence); }

    static TimeVaryingField constant(PlaneVec value);
    static TimeVaryingField zero() { return constant({}); }
};

/// v_n = rho_n * v in space, with rho the standard exp(-1/(1-|x|^2)) bump.
///
/// The convolution is a 17x17 tensor midpoint rule over the support square of
/// rho_n with weights normalized to unit mass, so constants and linear fields
/// are reproduced up to rounding. Norm metadata carries over unchanged.
TimeVaryingField mollify(const TimeVaryingField& field, RegularizationLevel level);

/// b = v + K(. - z) (exact) or b_n = v_n + K_n(. - z) (finite level).
struct CompositeField {
    TimeVaryingField smooth;
    PointVortexPath path;
    std::optional<RegularizationLevel> level;  ///< nullopt: exact singular drift

    [[nodiscard]] bool is_exact() const { return !level.has_value(); }
    /// sup |b_n| <= ||v||_inf + n/2; empty for the exact field or unknown ||v||_inf.
    [[nodiscard]] std::optional<double> sup_bound() const;
    /// ||v||_inf + ||z'||_inf, the bound on d/dt |X - z|; empty if ||v||_inf is unknown.
    [[nodiscard]] std::optional<double> radial_speed_bound() const;
};

/// Builds b_n from an unmollified v: mollifies at finite levels, keeps v for the exact field.
CompositeField make_composite(const TimeVaryingField& v, PointVortexPath path,
                              std::optional<RegularizationLevel> level);

PlaneVec composite_velocity(const CompositeField& field, double t, PlaneVec x);

/// Same as composite_velocity with a path-segment hint for monotone time queries.
PlaneVec composite_velocity(const CompositeField& field, double t, PlaneVec x, std::size_t& segment);

/// div b_n = rho_n * div v; the vortex part is divergence free.
/// Throws UnsupportedOperation when the smooth part has no divergence contract.
double composite_divergence(const CompositeField& field, double t, PlaneVec x);

}  // namespace vwflow
