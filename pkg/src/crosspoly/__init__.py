"""Non-Hermitian orthogonal polynomials on a cross: direct solver, strong asymptotics and checks."""

__version__ = "0.1.0"

from .asym import AsymptoticModel, build_model, d_exponent
from .classic import compose_cross, family_for, reference_poly
from .direct import (
    DirectSolution,
    compute_Rn,
    compute_rho_hat,
    direct_Qn,
    pade,
    quadrature_moments,
    solve_Qn,
)
from .errors import CrossPolyError, PrecisionError, ValidationError
from .geometry import CrossGeometry, WeightSpec, builtin_weight, load_weight, perturbed_weight, weight_from_dict
from .harness import pade_pole_tracker, run_comparison
from .identities import run_identities
from .surface import SurfacePoint, ThetaContext, compute_periods, eval_phi, theta
from .szego import compute_c_rho, eval_S

__all__ = [
    "AsymptoticModel",
    "CrossGeometry",
    "CrossPolyError",
    "DirectSolution",
    "PrecisionError",
    "SurfacePoint",
    "ThetaContext",
    "ValidationError",
    "WeightSpec",
    "build_model",
    "builtin_weight",
    "compose_cross",
    "compute_Rn",
    "compute_c_rho",
    "compute_periods",
    "compute_rho_hat",
    "d_exponent",
    "direct_Qn",
    "eval_S",
    "eval_phi",
    "family_for",
    "load_weight",
    "pade",
    "pade_pole_tracker",
    "perturbed_weight",
    "quadrature_moments",
    "reference_poly",
    "run_comparison",
    "run_identities",
    "solve_Qn",
    "theta",
    "weight_from_dict",
]
