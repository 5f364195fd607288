"""Cell problems, the homogenized tensor and the effective interface conductance."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import InterfaceConductance, PeriodicCoefficient, _gradients
from .errors import ConditioningError, RegimeError, ValidationError
from .geometry import CellMesh, InterfaceProfile, as_fraction, eval_profile

VANISHING = "vanishing"
N_DIRECTIONS = 360
QUAD_POINTS = 4096


# ---------------------------------------------------------------------------
# regimes
# ---------------------------------------------------------------------------

def classify_regime(k, gamma) -> str:
    """Return ``"A"``, ``"B"`` or ``"C"`` for oscillation exponent ``k`` and ``gamma``.

    Comparisons are exact: both arguments are converted to fractions first,
    so the boundary line ``gamma = 1 - k`` is detected without rounding.
    """
    k, gamma = as_fraction(k), as_fraction(gamma)
    if k <= 0:
        raise ValidationError(f"oscillation exponent k = {k} must be positive")
    threshold = Fraction(0) if k >= 1 else 1 - k
    if gamma == threshold:
        return "A"
    return "B" if gamma > threshold else "C"


# ---------------------------------------------------------------------------
# cell problem
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CellCorrector:
    """Solution ``omega = lambda . y + phi`` of one cell problem.

    ``fluctuation`` holds the periodic part ``phi`` on the ``n * n`` periodic
    DOFs, with zero cell mean.
    """

    direction: np.ndarray
    fluctuation: np.ndarray
    mesh: CellMesh

    @property
    def values(self):
        """Nodal values of ``omega`` on the (non-identified) cell mesh."""
        return self.fluctuation[self.mesh.master] + self.mesh.nodes @ self.direction

    def fluctuation_nodal(self):
        return self.fluctuation[self.mesh.master]


def _periodic_projector(mesh: CellMesh):
    n_nodes = mesh.nodes.shape[0]
    return sp.csr_matrix((np.ones(n_nodes), (np.arange(n_nodes), mesh.master)),
                         shape=(n_nodes, mesh.n_dofs))


def _cell_mean(mesh, nodal):
    area = mesh.triangle_areas()
    return float(np.sum(area * nodal[mesh.triangles].mean(axis=1)) / np.sum(area))


def _cell_operators(coeff, mesh):
    G, area = _gradients(mesh.nodes, mesh.triangles)
    A = coeff(mesh.nodes[mesh.triangles].mean(axis=1))
    return G, area, A


def solve_cell(coeff: PeriodicCoefficient, direction, mesh: CellMesh) -> CellCorrector:
    """Periodic corrector for the macroscopic gradient ``direction``.

    Solves ``int A (lambda + grad phi) . grad v = 0`` over periodic ``v`` with
    one DOF pinned, then shifts ``phi`` to zero mean.
    """
    lam = np.asarray(direction, dtype=float).reshape(2)
    G, area, A = _cell_operators(coeff, mesh)
    local = area[:, None, None] * np.einsum("tia,tab,tjb->tij", G, A, G)
    tris = mesh.triangles
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n_nodes = mesh.nodes.shape[0]
    K = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    rhs_local = -area[:, None] * np.einsum("tia,tab,b->ti", G, A, lam)
    rhs = np.bincount(tris.ravel(), weights=rhs_local.ravel(), minlength=n_nodes)
    P = _periodic_projector(mesh)
    Kp = (P.T @ K @ P).tocsc()
    bp = P.T @ rhs
    phi = np.zeros(mesh.n_dofs)
    try:
        phi[1:] = spla.spsolve(Kp[1:, 1:], bp[1:])
    except RuntimeError as exc:
        raise ConditioningError(f"cell problem is singular: {exc}") from exc
    if not np.all(np.isfinite(phi)):
        raise ConditioningError("cell problem produced non-finite values")
    phi -= _cell_mean(mesh, phi[mesh.master])
    return CellCorrector(lam, phi, mesh)


# ---------------------------------------------------------------------------
# homogenized tensor
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class HomogenizedData:
    """Homogenized tensor with sampled bounds, plus conductance and regime."""

    tensor: np.ndarray
    quadratic_min: float
    quadratic_max: float
    norm_max: float
    correctors: tuple = field(default=(), repr=False)
    conductance: float | str | None = None
    regime: str | None = None

    def satisfies_bounds(self, alpha, beta, rtol=1e-10):
        """Check ``(A0 l, l) >= alpha`` and ``|A0 l| <= beta^2 / alpha`` on unit ``l``."""
        return (self.quadratic_min >= alpha * (1 - rtol)
                and self.norm_max <= beta ** 2 / alpha * (1 + rtol))

    def report(self):
        t = self.tensor
        lines = [
            f"tensor_11 = {t[0, 0]:.12g}",
            f"tensor_12 = {t[0, 1]:.12g}",
            f"tensor_21 = {t[1, 0]:.12g}",
            f"tensor_22 = {t[1, 1]:.12g}",
            f"quadratic_min = {self.quadratic_min:.12g}",
            f"quadratic_max = {self.quadratic_max:.12g}",
            f"norm_max = {self.norm_max:.12g}",
        ]
        if self.regime is not None:
            if self.conductance is None:
                lines.append("effective_conductance = none (no effective conductance in case C)")
            elif self.conductance == VANISHING:
                lines.append("effective_conductance = vanishing")
            else:
                lines.append(f"effective_conductance = {self.conductance:.12g}")
            lines.append(f"regime = {self.regime}")
        return "\n".join(lines) + "\n"


def tensor_bounds(tensor, n_directions=N_DIRECTIONS):
    theta = 2 * np.pi * np.arange(n_directions) / n_directions
    lam = np.column_stack([np.cos(theta), np.sin(theta)])
    flux = lam @ np.asarray(tensor).T
    quad = np.einsum("ij,ij->i", flux, lam)
    return float(quad.min()), float(quad.max()), float(np.linalg.norm(flux, axis=1).max())


def homogenized_tensor(coeff: PeriodicCoefficient, mesh: CellMesh) -> HomogenizedData:
    """``A0 e_j`` is the cell average of ``A grad omega_{e_j}``."""
    G, area, A = _cell_operators(coeff, mesh)
    tensor = np.zeros((2, 2))
    correctors = []
    for j in range(2):
        lam = np.eye(2)[j]
        corr = solve_cell(coeff, lam, mesh)
        phi = corr.fluctuation_nodal()
        grad = lam + np.einsum("ti,tia->ta", phi[mesh.triangles], G)
        tensor[:, j] = np.einsum("t,tab,tb->a", area, A, grad) / area.sum()
        correctors.append(corr)
    qmin, qmax, nmax = tensor_bounds(tensor)
    return HomogenizedData(tensor, qmin, qmax, nmax, tuple(correctors))


# ---------------------------------------------------------------------------
# effective conductance
# ---------------------------------------------------------------------------

def _breakpoints(profile, h, n):
    pts = [np.arange(n + 1) / n, profile.kinks(), [1.0]]
    if isinstance(h, InterfaceConductance) and h.preset == "user-samples":
        pts.append(h.sample_y)
    return np.unique(np.clip(np.concatenate(pts), 0.0, 1.0))


def cell_average(func, breakpoints, order=3):
    """Composite Gauss-Legendre average of ``func`` over [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = breakpoints[:-1], breakpoints[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * func(nodes)))


def effective_conductance(h, profile: InterfaceProfile, k, gamma, n_points=QUAD_POINTS):
    """Limit weight of the interface term, or :data:`VANISHING` in case B.

    ``h`` is an :class:`InterfaceConductance`.  The integrands are averaged
    over one period with breakpoints at every profile kink.
    """
    regime = classify_regime(k, gamma)
    if regime == "C":
        raise RegimeError("no effective conductance in case C")
    if regime == "B":
        return VANISHING
    k = as_fraction(k)
    if n_points < QUAD_POINTS:
        raise ValidationError(f"conductance quadrature needs >= {QUAD_POINTS} points")

    def integrand(y):
        hv = h(y)
        if k > 1:
            return hv
        slope = eval_profile(profile, y)[1]
        if k == 1:
            return hv * np.sqrt(1.0 + slope ** 2)
        return hv * np.abs(slope)

    return cell_average(integrand, _breakpoints(profile, h, n_points))


def homogenize(coeff, mesh, h=None, profile=None, k=None, gamma=None):
    """Tensor plus (if the exponents are given) regime and conductance."""
    data = homogenized_tensor(coeff, mesh)
    if k is not None and gamma is not None:
        data.regime = classify_regime(k, gamma)
        if data.regime != "C" and h is not None and profile is not None:
            data.conductance = effective_conductance(h, profile, k, gamma)
    return data
