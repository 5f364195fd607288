"""scikit-learn style wrappers around the solvers.

These are thin: ``fit`` runs a solve and stores the result in trailing
underscore attributes, ``predict``/``transform`` evaluate it.  There is no
training data in the statistical sense; ``X`` is a set of query points or
macroscopic gradients.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .assembly import InterfaceConductance, PeriodicCoefficient, Source, evaluate_cross_mesh
from .assembly import PointLocator, assemble_problem, l2_norms
from .geometry import DomainSpec, InterfaceProfile, build_cell_mesh, build_rough_mesh
from .homogenize import homogenize
from .limit_solver import LimitProblemSpec, solve_limit
from .vi_solver import solve_vi


class CellHomogenizer(TransformerMixin, BaseEstimator):
    """Homogenized tensor of a periodic coefficient.

    ``transform`` maps macroscopic gradients (rows of ``X``) to
    homogenized fluxes ``A0 @ x``.
    """

    def __init__(self, coefficient="identity", n=64):
        self.coefficient = coefficient
        self.n = n

    def _coefficient(self):
        if isinstance(self.coefficient, PeriodicCoefficient):
            return self.coefficient
        return PeriodicCoefficient(self.coefficient)

    def fit(self, X=None, y=None):
        data = homogenize(self._coefficient(), build_cell_mesh(self.n))
        self.tensor_ = data.tensor
        self.quadratic_min_ = data.quadratic_min
        self.norm_max_ = data.norm_max
        self.n_features_in_ = 2
        return self

    def transform(self, X):
        check_is_fitted(self, "tensor_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns, got {X.shape[1]}")
        return X @ self.tensor_.T


class _FieldPredictor(BaseEstimator):
    def predict(self, X):
        """Solution values at the points ``X`` (shape (m, 2)) of Q."""
        check_is_fitted(self, "values_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected 2 columns, got {X.shape[1]}")
        return evaluate_cross_mesh(self.mesh_, self.values_, X, self.locator_)

    def _store(self, sol):
        self.solution_ = sol
        self.mesh_ = sol.mesh
        self.values_ = sol.values
        self.locator_ = PointLocator(sol.mesh)
        self.norms_ = l2_norms(sol.mesh, sol.values)
        self.n_features_in_ = 2
        return self


class RoughInterfaceSolver(_FieldPredictor):
    """Solve the oscillating-interface problem at one period ``eps``."""

    def __init__(self, eps="1/8", k=1, gamma=0, L=1, ell=1.0, profile=None,
                 coefficient="identity", conductance=1.0, source="split-sign",
                 nx_per_period=16, ny=8, tol=1e-10):
        self.eps = eps
        self.k = k
        self.gamma = gamma
        self.L = L
        self.ell = ell
        self.profile = profile
        self.coefficient = coefficient
        self.conductance = conductance
        self.source = source
        self.nx_per_period = nx_per_period
        self.ny = ny
        self.tol = tol

    def fit(self, X=None, y=None):
        d = DomainSpec(self.L, self.ell, self.eps, self.k, self.gamma)
        prof = self.profile if self.profile is not None else InterfaceProfile.sine()
        coeff = (self.coefficient if isinstance(self.coefficient, PeriodicCoefficient)
                 else PeriodicCoefficient(self.coefficient))
        h = (self.conductance if isinstance(self.conductance, InterfaceConductance)
             else InterfaceConductance("constant", float(self.conductance)))
        src = self.source if isinstance(self.source, Source) else Source(self.source)
        mesh = build_rough_mesh(d, prof, self.nx_per_period, self.ny)
        problem = assemble_problem(mesh, coeff, h, src, d.eps, d.gamma)
        return self._store(solve_vi(problem, tol=self.tol))


class LimitProblemSolver(_FieldPredictor):
    """Solve one of the three flat-interface limit problems."""

    def __init__(self, regime="A", tensor=None, conductance=None, source="split-sign",
                 nx=64, ny=8, L=1, ell=1.0, tol=1e-10):
        self.regime = regime
        self.tensor = tensor
        self.conductance = conductance
        self.source = source
        self.nx = nx
        self.ny = ny
        self.L = L
        self.ell = ell
        self.tol = tol

    def fit(self, X=None, y=None):
        tensor = np.eye(2) if self.tensor is None else self.tensor
        src = self.source if isinstance(self.source, Source) else Source(self.source)
        spec = LimitProblemSpec(self.regime, tensor, src, self.nx, self.ny,
                                conductance=self.conductance, L=self.L, ell=self.ell)
        return self._store(solve_limit(spec, tol=self.tol))
