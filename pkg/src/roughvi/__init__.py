"""Finite elements for a transmission problem across a rough interface with a
unilateral (Signorini) jump constraint, its homogenized limits, and epsilon
sweeps that check the convergence numerically.

The scikit-learn style wrappers live in :mod:`roughvi.estimators`.
"""
from .assembly import (InterfaceConductance, PeriodicCoefficient, PointLocator, Source,
                       apply_dirichlet, assemble_problem, l2_difference, l2_norms)
from .config import ScenarioConfig, canonical_config, load_config, parse_config
from .errors import (AssemblyError, ConditioningError, GeometryError, NonConvergenceError,
                     PointLookupError, RegimeError, RoughVIError, SolverError, ValidationError)
from .geometry import (DomainSpec, InterfaceProfile, build_cell_mesh, build_flat_mesh,
                       build_plain_mesh, build_rough_mesh)
from .harness import SweepReport, emit_report, run_sweep, verify_apriori
from .homogenize import (VANISHING, classify_regime, effective_conductance, homogenize,
                         homogenized_tensor, solve_cell)
from .limit_solver import LimitProblemSpec, solve_limit
from .vi_solver import DiscreteVISolution, solve_linear, solve_vi, solve_vi_activeset

__version__ = "0.1.0"

__all__ = [
    "AssemblyError", "ConditioningError", "DiscreteVISolution", "DomainSpec", "GeometryError",
    "InterfaceConductance", "InterfaceProfile", "LimitProblemSpec", "NonConvergenceError",
    "PeriodicCoefficient", "PointLocator", "PointLookupError", "RegimeError", "RoughVIError",
    "ScenarioConfig", "SolverError", "Source", "SweepReport", "VANISHING", "ValidationError",
    "apply_dirichlet", "assemble_problem", "build_cell_mesh", "build_flat_mesh",
    "build_plain_mesh", "build_rough_mesh", "canonical_config", "classify_regime",
    "effective_conductance", "emit_report", "homogenize", "homogenized_tensor",
    "l2_difference", "l2_norms", "load_config", "parse_config", "run_sweep", "solve_cell",
    "solve_limit", "solve_linear", "solve_vi", "solve_vi_activeset", "verify_apriori",
]
