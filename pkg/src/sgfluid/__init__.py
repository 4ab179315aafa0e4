"""Self-gravitating fluid patch with constant vorticity: boundary integral
operators, Riemann-frame time stepping and normal-form diagnostics."""

from .curves import ClosedCurve, Diffeo, conformal_map, solve_k
from .dynamics import FluidState, LagrangianJet, initial_state, lagrangian_jet, step
from .errors import (ConfigError, CurveError, DegenerateParametrization,
                     InvariantViolation, NonConvergence, PointOnBoundary,
                     SgfluidError, SingularSystem, TaylorSignViolation)
from .kernels import Workspace

__version__ = "0.1.0"
