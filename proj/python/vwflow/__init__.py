"""Lagrangian flows of a smooth field perturbed by a point vortex."""

from ._core import (
    CommandResult,
    DomainError,
    InvalidArgument,
    ParseError,
    PlaneVec,
    PointVortexPath,
    RangeError,
    Scenario,
    SemanticError,
    UnsupportedOperation,
    biot_savart_kernel,
    cmd_collision,
    cmd_converge,
    cmd_flow,
    cmd_vortexwave,
    emit_scenario,
    induced_velocity,
    integrate,
    parse_scenario,
    pure_kernel_delta,
    regularized_drift,
    regularized_kernel,
    scenario_hash,
    singular_drift,
)


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


__all__ = [name for name in dir() if not name.startswith("_")]
