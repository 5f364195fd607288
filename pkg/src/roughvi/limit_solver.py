"""Homogenized limit problems on the flat-interface geometry.

* regime A: Signorini interface with the effective conductance,
* regime B: Signorini interface without coupling,
* regime C: plain Dirichlet problem on the whole cylinder.

The same assembly and VI code as the oscillating problem is used, with the
constant tensor in place of the periodic coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import PeriodicCoefficient, Source, assemble_problem
from .errors import ValidationError
from .geometry import DomainSpec, build_flat_mesh, build_plain_mesh
from .homogenize import VANISHING
from .vi_solver import solve_linear, solve_vi, _make_solution, _reduced


@dataclass(frozen=True, eq=False)
class LimitProblemSpec:
    regime: str
    tensor: np.ndarray
    source: Source
    nx: int
    ny: int
    conductance: float | None = None
    L: object = 1
    ell: float = 1.0

    def __post_init__(self):
        if self.regime not in ("A", "B", "C"):
            raise ValidationError(f"unknown regime {self.regime!r}")
        object.__setattr__(self, "tensor", np.asarray(self.tensor, dtype=float).reshape(2, 2))
        if self.regime == "A":
            h = self.conductance
            if h is None or h == VANISHING or not np.isfinite(h) or h < 0:
                raise ValidationError("regime A needs a finite effective conductance >= 0")
        elif self.conductance not in (None, 0, 0.0, VANISHING):
            raise ValidationError(f"regime {self.regime} carries no conductance")

    @property
    def domain(self):
        return DomainSpec(L=self.L, ell=self.ell)

    @property
    def coefficient(self):
        return PeriodicCoefficient("constant", matrix=self.tensor)


def _solve_flat(spec, h, solver_opts):
    mesh = build_flat_mesh(spec.domain, spec.nx, spec.ny)
    problem = assemble_problem(mesh, spec.coefficient, float(h), spec.source)
    sol = solve_vi(problem, **solver_opts)
    sol.mesh = mesh
    return sol


def solve_limit_A(spec: LimitProblemSpec, **solver_opts):
    if spec.regime != "A":
        raise ValidationError("solve_limit_A needs a regime-A spec")
    return _solve_flat(spec, spec.conductance, solver_opts)


def solve_limit_B(spec: LimitProblemSpec, **solver_opts):
    if spec.regime != "B":
        raise ValidationError("solve_limit_B needs a regime-B spec")
    return _solve_flat(spec, 0.0, solver_opts)


def solve_limit_C(spec: LimitProblemSpec, **solver_opts):
    """Dirichlet problem on a single-component mesh; returns a solution without pairs."""
    if spec.regime != "C":
        raise ValidationError("solve_limit_C needs a regime-C spec")
    mesh = build_plain_mesh(spec.domain, spec.nx, spec.ny)
    problem = assemble_problem(mesh, spec.coefficient, 0.0, spec.source)
    red = _reduced(problem)
    u = solve_linear(red)
    sol = _make_solution(red, u[red.free])
    sol.mesh = mesh
    return sol


def solve_limit(spec: LimitProblemSpec, **solver_opts):
    return {"A": solve_limit_A, "B": solve_limit_B, "C": solve_limit_C}[spec.regime](
        spec, **solver_opts)
