#include "vwflow/fields.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "vwflow/errors.hpp"

namespace vwflow {

namespace {

constexpr int kMollifierNodes = 17;

struct MollifierStencil {
    std::vector<PlaneVec> offsets;  // unit-scale nodes inside the unit disk
    std::vector<double> weights;    // sum to 1
};

const MollifierStencil& unit_stencil() {
    static const MollifierStencil stencil = [] {
        MollifierStencil s;
        double total = 0.0;
        for (int i = 0; i < kMollifierNodes; ++i) {
            for (int j = 0; j < kMollifierNodes; ++j) {
                const PlaneVec y{-1.0 + (2.0 * i + 1.0) / kMollifierNodes,
                                 -1.0 + (2.0 * j + 1.0) / kMollifierNodes};
                const double r_sq = norm_sq(y);
                if (r_sq >= 1.0) continue;
                const double w = std::exp(-1.0 / (1.0 - r_sq));
                s.offsets.push_back(y);
                s.weights.push_back(w);
                total += w;
            }
        }
        for (double& w : s.weights) w /= total;
        return s;
    }();
    return stencil;
}

}  // namespace

TimeVaryingField TimeVaryingField::constant(PlaneVec value) {
    TimeVaryingField f;
    f.velocity = [value](double, PlaneVec) { return value; };
    f.divergence = [](double, PlaneVec) { return 0.0; };
    f.sup_norm = norm(value);
    f.div_sup_integral = 0.0;
    f.grad_lp_norm = GradientNorm{0.0, INFINITY};
    f.already_smooth = true;
    return f;
}

TimeVaryingField mollify(const TimeVaryingField& field, RegularizationLevel level) {
    if (field.already_smooth) return field;

    const auto& stencil = unit_stencil();
    const double scale = 1.0 / static_cast<double>(level.n());
    std::vector<PlaneVec> offsets;
    offsets.reserve(stencil.offsets.size());
    for (PlaneVec y : stencil.offsets) offsets.push_back(scale * y);
    auto nodes = std::make_shared<const std::vector<PlaneVec>>(std::move(offsets));
    auto weights = std::make_shared<const std::vector<double>>(stencil.weights);

    TimeVaryingField out = field;
    out.velocity = [v = field.velocity, nodes, weights](double t, PlaneVec x) {
        PlaneVec sum{};
        for (std::size_t k = 0; k < nodes->size(); ++k) sum += (*weights)[k] * v(t, x - (*nodes)[k]);
        return sum;
    };
    if (field.divergence) {
        out.divergence = [d = field.divergence, nodes, weights](double t, PlaneVec x) {
            double sum = 0.0;
            for (std::size_t k = 0; k < nodes->size(); ++k) sum += (*weights)[k] * d(t, x - (*nodes)[k]);
            return sum;
        };
    }
    return out;
}

std::optional<double> CompositeField::sup_bound() const {
    if (!level || !smooth.sup_norm) return std::nullopt;
    return *smooth.sup_norm + level->kernel_bound();
}

std::optional<double> CompositeField::radial_speed_bound() const {
    if (!smooth.sup_norm) return std::nullopt;
    return *smooth.sup_norm + path.lipschitz_bound();
}

CompositeField make_composite(const TimeVaryingField& v, PointVortexPath path,
                              std::optional<RegularizationLevel> level) {
    if (level) return CompositeField{mollify(v, *level), std::move(path), level};
    return CompositeField{v, std::move(path), std::nullopt};
}

PlaneVec composite_velocity(const CompositeField& field, double t, PlaneVec x, std::size_t& segment) {
    const PlaneVec rel = x - field.path.at(t, segment);
    const PlaneVec drift = field.level ? regularized_kernel(rel, *field.level) : biot_savart_kernel(rel);
    return field.smooth.velocity(t, x) + drift;
}

PlaneVec composite_velocity(const CompositeField& field, double t, PlaneVec x) {
    std::size_t segment = 0;
    return composite_velocity(field, t, x, segment);
}

double composite_divergence(const CompositeField& field, double t, PlaneVec x) {
    if (!field.smooth.divergence)
        throw UnsupportedOperation("composite_divergence: smooth part has no divergence");
    return field.smooth.divergence(t, x);
}

}  // namespace vwflow
