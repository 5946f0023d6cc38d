"""Numerical laboratory for a two-dimensional supersymmetric nonlinear sigma
model with gravitino couplings.

The package evaluates the five-term action functional for a map into an
embedded target together with its vector-spinor and gravitino partners on a
periodic grid, computes the extrinsic critical-point residuals with an
independent finite-difference oracle, verifies the model's exact discrete
symmetries, runs a projected gradient flow, and provides Morrey-norm and
Riesz-potential diagnostics.
"""

from .action import ActionBreakdown, total_action
from .errors import ConfigError, ConstraintError, SolverError
from .geometry import Grid, SphereTarget, ellipsoid_target
from .solver import FlowState, SolverConfig, solve

__version__ = "0.1.0"

__all__ = [
    "ActionBreakdown",
    "total_action",
    "Grid",
    "SphereTarget",
    "ellipsoid_target",
    "SolverConfig",
    "FlowState",
    "solve",
    "ConstraintError",
    "SolverError",
    "ConfigError",
    "__version__",
]
