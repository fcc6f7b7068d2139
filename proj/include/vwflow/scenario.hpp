#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vwflow/expression.hpp"
#include "vwflow/fields.hpp"
#include "vwflow/flow.hpp"
#include "vwflow/vortexwave.hpp"

namespace vwflow {

/// A well-formed scenario that violates one of its invariants.
class SemanticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SmoothFieldSpec {
    Expression v1 = Expression::constant(0.0);
    Expression v2 = Expression::constant(0.0);
    std::optional<Expression> divergence;    ///< defaults to the symbolic divergence of (v1, v2)
    std::optional<double> sup_norm;
    std::optional<double> div_sup_integral;  ///< L0
    bool already_smooth = false;

    friend bool operator==(const SmoothFieldSpec&, const SmoothFieldSpec&) = default;
};

enum class PathSource { expression, samples, from_vortexwave };

struct PathSpec {
    PathSource source = PathSource::expression;
    Expression z1 = Expression::constant(0.0);
    Expression z2 = Expression::constant(0.0);
    std::vector<std::array<double, 3>> samples;  ///< (t, x1, x2)
    std::optional<double> lipschitz_bound;
    std::size_t resolution = 1024;               ///< segments used to sample an expression path

    friend bool operator==(const PathSpec&, const PathSpec&) = default;
};

struct EnsembleSpec {
    PlaneVec center;
    double radius = 0.0;
    double spacing = 0.0;

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

struct VortexWaveSpec {
    Expression omega0 = Expression::constant(0.0);
    Window window;
    double blob_spacing = 0.0;
    double delta_blob = 0.0;
    PlaneVec vortex;
    double strength = 1.0;
    std::optional<double> dt;       ///< defaults to the scenario dt
    std::size_t snapshots = 2;      ///< equispaced, including 0 and T
    std::optional<double> deposit_spacing;

    friend bool operator==(const VortexWaveSpec&, const VortexWaveSpec&) = default;
};

struct DiagnosticsSpec {
    std::optional<double> density_spacing;
    std::size_t time_samples = 64;
    std::size_t space_divisions = 128;

    friend bool operator==(const DiagnosticsSpec&, const DiagnosticsSpec&) = default;
};

struct Scenario {
    std::string name;
    double horizon = 0.0;
    double dt = 0.0;
    std::size_t output_times = 129;
    std::vector<long> levels{16, 64, 256};
    long reference_level = 2048;
    SmoothFieldSpec field;
    PathSpec path;
    EnsembleSpec ensemble;
    std::optional<VortexWaveSpec> vortexwave;
    DiagnosticsSpec diagnostics;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the bracketed-section key = value format. Throws ParseError (with line and
/// column) on malformed text and SemanticError on violated invariants.
Scenario parse_scenario(std::string_view text);

/// Canonical text; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& scenario);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

TimeVaryingField build_smooth_field(const Scenario& scenario);
InitialEnsemble build_ensemble(const Scenario& scenario);
VortexWaveState build_vortexwave_state(const Scenario& scenario);
/// Vortex-wave snapshot times implied by the scenario.
std::vector<double> vortexwave_snapshot_times(const Scenario& scenario);
/// The vortex path; a from_vortexwave source runs the coupled simulation first.
PointVortexPath build_path(const Scenario& scenario, int threads = 1);

}  // namespace vwflow
