"""P1 operators of the weak formulation on two-component meshes.

The bilinear form is split into the bulk stiffness
``a(u, v) = sum over components of int A(x/eps) grad u . grad v`` and the
interface coupling ``eps**gamma int h(x'/eps) [u][v] dsigma``.  The coupling
is lumped per interface pair (trapezoid rule on each polyline edge), so it only
connects the plus and minus copies of the same trace node.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import AssemblyError, PointLookupError, ValidationError
from .geometry import MINUS, PLUS, TwoComponentMesh

_VALIDATION_GRID = 65


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


# ---------------------------------------------------------------------------
# coefficient data
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PeriodicCoefficient:
    """Y-periodic 2x2 conductivity ``A(y)`` with ellipticity bounds.

    Presets
    -------
    identity
        ``A = I``.
    layered
        ``A = (mean + amp * sin(2 pi y1)) I``; defaults give ``2 + sin``.
    rotated-anisotropic
        ``R(t) diag(lam_min, lam_max) R(t)^T`` with
        ``t = angle + sway * sin(2 pi y1)``.
    constant
        a fixed matrix (used for the homogenized tensor).
    user-callable
        ``func(y) -> (..., 2, 2)``.
    table
        piecewise-constant matrices on a regular grid of Y,
        shape ``(n1, n2, 2, 2)``.

    ``scale`` multiplies every preset.  ``alpha`` and ``beta`` are the
    ellipticity constants; when not given they are measured on a sampling
    grid, when given they are checked against it.
    """

    preset: str = "identity"
    params: dict = field(default_factory=dict)
    func: Callable | None = field(default=None, repr=False)
    table: np.ndarray | None = field(default=None, repr=False)
    matrix: np.ndarray | None = None
    scale: float = 1.0
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.preset not in ("identity", "layered", "rotated-anisotropic",
                               "constant", "user-callable", "table"):
            raise ValidationError(f"unknown coefficient preset {self.preset!r}")
        if self.preset == "constant":
            if self.matrix is None:
                raise ValidationError("constant coefficient needs a matrix")
            object.__setattr__(self, "matrix", np.array(self.matrix, dtype=float).reshape(2, 2))
        if self.preset == "user-callable" and self.func is None:
            raise ValidationError("user-callable coefficient needs func")
        if self.preset == "table":
            tab = np.asarray(self.table, dtype=float)
            if tab.ndim != 4 or tab.shape[2:] != (2, 2):
                raise ValidationError("coefficient table must have shape (n1, n2, 2, 2)")
            object.__setattr__(self, "table", tab)
        if self.scale <= 0:
            raise ValidationError("coefficient scale must be positive")
        a_s, b_s = self.sampled_bounds()
        if a_s <= 0:
            raise ValidationError(f"coefficient is not uniformly elliptic (sampled alpha = {a_s:g})")
        tol = 1e-10 * max(1.0, b_s)
        if self.alpha is None:
            object.__setattr__(self, "alpha", a_s)
        elif not 0 < self.alpha <= a_s + tol:
            raise ValidationError(f"alpha = {self.alpha:g} exceeds the sampled minimum {a_s:g}")
        if self.beta is None:
            object.__setattr__(self, "beta", b_s)
        elif self.beta < b_s - tol:
            raise ValidationError(f"beta = {self.beta:g} is below the sampled maximum {b_s:g}")

    def __call__(self, y):
        """Evaluate at cell points ``y`` of shape ``(..., 2)``; reduced mod 1."""
        y = np.mod(np.asarray(y, dtype=float), 1.0)
        shape = y.shape[:-1]
        p = self.params
        if self.preset == "identity":
            A = np.broadcast_to(np.eye(2), shape + (2, 2)).copy()
        elif self.preset == "layered":
            a = p.get("mean", 2.0) + p.get("amp", 1.0) * np.sin(2 * np.pi * y[..., 0])
            A = a[..., None, None] * np.eye(2)
        elif self.preset == "rotated-anisotropic":
            t = p.get("angle", np.pi / 6) + p.get("sway", 0.5) * np.sin(2 * np.pi * y[..., 0])
            R = _rotation(t)
            D = np.diag([p.get("lam_min", 1.0), p.get("lam_max", 4.0)])
            A = R @ D @ np.swapaxes(R, -1, -2)
        elif self.preset == "constant":
            A = np.broadcast_to(self.matrix, shape + (2, 2)).copy()
        elif self.preset == "user-callable":
            A = np.asarray(self.func(y), dtype=float).reshape(shape + (2, 2))
        else:
            n1, n2 = self.table.shape[:2]
            i = np.minimum((y[..., 0] * n1).astype(int), n1 - 1)
            j = np.minimum((y[..., 1] * n2).astype(int), n2 - 1)
            A = self.table[i, j]
        return self.scale * A

    def sampled_bounds(self):
        """``(min_y lambda_min(sym A), max_y |A|_2)`` on a regular grid."""
        t = np.arange(_VALIDATION_GRID) / _VALIDATION_GRID
        Y = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
        A = self(Y)
        sym = 0.5 * (A + np.swapaxes(A, -1, -2))
        lo = float(np.min(np.linalg.eigvalsh(sym)))
        hi = float(np.max(np.linalg.norm(A, ord=2, axis=(-2, -1))))
        return lo, hi

    @property
    def is_symmetric(self):
        t = np.arange(_VALIDATION_GRID) / _VALIDATION_GRID
        Y = np.stack(np.meshgrid(t, t, indexing="ij"), -1).reshape(-1, 2)
        A = self(Y)
        return bool(np.allclose(A, np.swapaxes(A, -1, -2), rtol=0, atol=1e-13 * self.beta))

    def transpose(self):
        """Coefficient ``y -> A(y)^T``."""
        return PeriodicCoefficient("user-callable",
                                   func=lambda y: np.swapaxes(self(y), -1, -2))


@dataclass(frozen=True, eq=False)
class InterfaceConductance:
    """Y'-periodic interface conductance ``h``.

    Presets: ``constant`` (``value``), ``sine-positive``
    (``value * (1 + 0.5 sin 2 pi y)``), ``user-samples`` (piecewise linear
    table on [0, 1]) and ``zero`` (``h = 0``, the zero-flag variant).
    """

    preset: str = "constant"
    value: float = 1.0
    sample_y: np.ndarray | None = field(default=None, repr=False)
    sample_values: np.ndarray | None = field(default=None, repr=False)
    h0: float | None = None
    zero: bool = False

    def __post_init__(self):
        if self.preset == "zero":
            object.__setattr__(self, "zero", True)
        if self.preset not in ("constant", "sine-positive", "user-samples", "zero"):
            raise ValidationError(f"unknown conductance preset {self.preset!r}")
        if self.preset == "user-samples":
            ys = np.asarray(self.sample_y, dtype=float)
            vs = np.asarray(self.sample_values, dtype=float)
            if ys.ndim != 1 or ys.shape != vs.shape or ys.size < 2:
                raise ValidationError("conductance table needs matching 1-D arrays")
            object.__setattr__(self, "sample_y", ys)
            object.__setattr__(self, "sample_values", vs)
        if self.zero:
            object.__setattr__(self, "h0", 0.0)
            return
        t = np.arange(1024) / 1024
        hmin = float(np.min(self(t)))
        if self.h0 is None:
            object.__setattr__(self, "h0", hmin)
        if not self.h0 > 0:
            raise ValidationError(f"conductance lower bound h0 = {self.h0:g} must be positive")
        if hmin < self.h0 - 1e-12:
            raise ValidationError(f"conductance drops to {hmin:g} below h0 = {self.h0:g}")

    def __call__(self, y):
        y = np.mod(np.asarray(y, dtype=float), 1.0)
        if self.zero:
            return np.zeros_like(y)
        if self.preset == "constant":
            return np.full_like(y, self.value)
        if self.preset == "sine-positive":
            return self.value * (1.0 + 0.5 * np.sin(2 * np.pi * y))
        return np.interp(y, self.sample_y, self.sample_values)

    def scaled(self, t):
        if self.preset == "user-samples":
            return InterfaceConductance("user-samples", sample_y=self.sample_y,
                                        sample_values=t * self.sample_values,
                                        zero=self.zero)
        return InterfaceConductance(self.preset, self.value * t, zero=self.zero)


@dataclass(frozen=True)
class Source:
    """Right-hand side presets.

    ``constant``: ``f = c``.  ``split-sign``: ``+c`` on the lower component and
    ``-c`` on the upper one; with ``flip_x1`` set the sign is also reversed
    for ``x1 > flip_x1``.  ``bump``: ``c sin(pi x1 / L) cos(pi x2 / (2 ell))``.
    """

    preset: str = "split-sign"
    c: float = 1.0
    flip_x1: float | None = None

    def __post_init__(self):
        if self.preset not in ("constant", "split-sign", "bump", "zero"):
            raise ValidationError(f"unknown source preset {self.preset!r}")

    def scaled(self, t):
        return Source(self.preset, self.c * t, self.flip_x1)

    def evaluate(self, points, tags, L, ell):
        x, y = points[..., 0], points[..., 1]
        if self.preset == "zero":
            return np.zeros_like(x)
        if self.preset == "constant":
            return np.full_like(x, self.c)
        if self.preset == "bump":
            return self.c * np.sin(np.pi * x / L) * np.cos(0.5 * np.pi * y / ell)
        val = np.where(tags == MINUS, self.c, -self.c).astype(float)
        if self.flip_x1 is not None:
            val = np.where(x > self.flip_x1, -val, val)
        return val


# ---------------------------------------------------------------------------
# element kernels
# ---------------------------------------------------------------------------

def _gradients(nodes, triangles):
    """Barycentric gradients (T, 3, 2) and areas (T,)."""
    p = nodes[triangles]
    x, y = p[..., 0], p[..., 1]
    det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    area = 0.5 * det
    bad = np.flatnonzero(np.abs(area) < 1e-14)
    if bad.size:
        raise AssemblyError(f"degenerate triangle {int(bad[0])} (area {area[bad[0]]:.3e})")
    G = np.empty(triangles.shape + (2,))
    G[:, 0, 0] = y[:, 1] - y[:, 2]
    G[:, 1, 0] = y[:, 2] - y[:, 0]
    G[:, 2, 0] = y[:, 0] - y[:, 1]
    G[:, 0, 1] = x[:, 2] - x[:, 1]
    G[:, 1, 1] = x[:, 0] - x[:, 2]
    G[:, 2, 1] = x[:, 1] - x[:, 0]
    G /= det[:, None, None]
    return G, area


def _scatter(triangles, local, n):
    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def assemble_stiffness(mesh, coeff: PeriodicCoefficient, eps=1.0, mask=None):
    """Sparse P1 stiffness of ``int A(x/eps) grad u . grad v``.

    The coefficient is sampled at each triangle barycenter.  ``mask`` restricts
    the assembly to a subset of triangles.
    """
    tris = mesh.triangles if mask is None else mesh.triangles[mask]
    G, area = _gradients(mesh.nodes, tris)
    centers = mesh.nodes[tris].mean(axis=1)
    A = coeff(centers / float(eps))
    local = area[:, None, None] * np.einsum("tia,tab,tjb->tij", G, A, G)
    return _scatter(tris, local, mesh.nodes.shape[0])


def interface_pair_weights(mesh: TwoComponentMesh, h, eps=1.0, gamma=0):
    """Lumped coupling weight ``eps**gamma h(x'/eps) w_i`` at each pair."""
    if mesh.n_pairs == 0:
        return np.empty(0)
    w = mesh.pair_weights()
    if isinstance(h, InterfaceConductance):
        hv = h(mesh.pair_x / float(eps))
    else:
        hv = np.full(mesh.n_pairs, float(h))
    return float(eps) ** float(gamma) * hv * w


def assemble_interface_coupling(mesh: TwoComponentMesh, h, eps=1.0, gamma=0):
    """Sparse operator of ``eps**gamma int h [u][v] dsigma``.

    ``h`` is an :class:`InterfaceConductance` or a plain number (a constant
    conductance such as the effective one of the flat limit).
    """
    n = mesh.nodes.shape[0]
    c = interface_pair_weights(mesh, h, eps, gamma)
    if c.size == 0 or not np.any(c):
        return sp.csr_matrix((n, n))
    p, m = mesh.pairs[:, 0], mesh.pairs[:, 1]
    rows = np.concatenate([p, m, p, m])
    cols = np.concatenate([p, m, m, p])
    vals = np.concatenate([c, c, -c, -c])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def assemble_load(mesh, source: Source):
    """Load vector by the 3-point edge-midpoint rule on every triangle."""
    if not isinstance(source, Source):
        raise ValidationError(f"unknown source {source!r}")
    tris = mesh.triangles
    _, area = _gradients(mesh.nodes, tris)
    p = mesh.nodes[tris]
    mids = 0.5 * (p + p[:, [1, 2, 0]])          # m01, m12, m20
    tags = np.repeat(mesh.tags[:, None], 3, axis=1)
    fm = source.evaluate(mids, tags, mesh.L, mesh.ell)
    f01, f12, f20 = fm[:, 0], fm[:, 1], fm[:, 2]
    local = (area / 6.0)[:, None] * np.column_stack([f01 + f20, f01 + f12, f12 + f20])
    return np.bincount(tris.ravel(), weights=local.ravel(), minlength=mesh.nodes.shape[0])


def assemble_mass(mesh):
    G, area = _gradients(mesh.nodes, mesh.triangles)
    base = (np.ones((3, 3)) + np.eye(3)) / 12.0
    return _scatter(mesh.triangles, area[:, None, None] * base, mesh.nodes.shape[0])


# ---------------------------------------------------------------------------
# discrete problem
# ---------------------------------------------------------------------------

def _is_symmetric(M, rtol=1e-12):
    d = abs(M - M.T)
    scale = abs(M).max() if M.nnz else 0.0
    return (d.max() if d.nnz else 0.0) <= rtol * max(scale, 1e-300)


@dataclass(frozen=True, eq=False)
class DiscreteVIProblem:
    """Full-size operators plus the data needed to eliminate boundary DOFs."""

    stiffness: sp.csr_matrix
    coupling: sp.csr_matrix
    load: np.ndarray
    free: np.ndarray
    pairs: np.ndarray
    symmetric: bool
    mesh: TwoComponentMesh | None = None

    @property
    def n(self):
        return self.load.size


@dataclass(frozen=True, eq=False)
class ReducedProblem:
    """Problem restricted to free DOFs; ``pairs`` index the reduced vector."""

    stiffness: sp.csr_matrix
    coupling: sp.csr_matrix
    load: np.ndarray
    free: np.ndarray
    n_full: int
    pairs: np.ndarray
    pair_ids: np.ndarray
    symmetric: bool

    @property
    def n(self):
        return self.load.size

    @property
    def operator(self):
        return (self.stiffness + self.coupling).tocsr()

    def expand(self, x):
        out = np.zeros(self.n_full)
        out[self.free] = x
        return out


def build_problem(mesh, stiffness, coupling, load):
    free = np.flatnonzero(~mesh.boundary)
    K = stiffness.tocsr()
    B = coupling.tocsr()
    sym = _is_symmetric(K) and _is_symmetric(B)
    return DiscreteVIProblem(K, B, np.asarray(load, dtype=float), free,
                             np.asarray(mesh.pairs), sym, mesh)


def assemble_problem(mesh, coeff, h, source, eps=1.0, gamma=0):
    """Stiffness, coupling and load for one mesh, bundled with the Dirichlet data."""
    K = assemble_stiffness(mesh, coeff, eps)
    B = assemble_interface_coupling(mesh, h, eps, gamma)
    f = assemble_load(mesh, source)
    return build_problem(mesh, K, B, f)


def apply_dirichlet(problem: DiscreteVIProblem) -> ReducedProblem:
    """Drop boundary rows and columns (homogeneous Dirichlet data).

    Interface pairs with a pinned member are dropped from the constraint
    list: both their traces are zero.
    """
    free = problem.free
    n = problem.n
    full_to_free = np.full(n, -1, dtype=np.int64)
    full_to_free[free] = np.arange(free.size)
    K = problem.stiffness[free][:, free].tocsr()
    B = problem.coupling[free][:, free].tocsr()
    if problem.pairs.size:
        mapped = full_to_free[problem.pairs]
        keep = np.all(mapped >= 0, axis=1)
        pairs = mapped[keep]
        pair_ids = np.flatnonzero(keep)
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
        pair_ids = np.empty(0, dtype=np.int64)
    return ReducedProblem(K, B, problem.load[free].copy(), free, n, pairs, pair_ids,
                          problem.symmetric and _is_symmetric(K) and _is_symmetric(B))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Norms:
    l2: float
    h1_plus: float
    h1_minus: float
    jump: float

    @property
    def grad(self):
        """Broken H1 seminorm over both components."""
        return float(np.hypot(self.h1_plus, self.h1_minus))


def jump_values(mesh, u):
    u = np.asarray(u, dtype=float)
    if mesh.n_pairs == 0:
        return np.empty(0)
    return u[mesh.pairs[:, 0]] - u[mesh.pairs[:, 1]]


def l2_norms(mesh, u) -> Norms:
    """L2 norm on Q, H1 seminorm per component, and L2 norm of the jump.

    All integrals are exact for P1 fields (the jump norm uses the exact
    edge rule for a linear function squared).
    """
    u = np.asarray(u, dtype=float)
    l2 = float(np.sqrt(max(u @ (assemble_mass(mesh) @ u), 0.0)))
    ident = PeriodicCoefficient("identity")
    semi = []
    for tag in (PLUS, MINUS):
        mask = mesh.tags == tag
        if not np.any(mask):
            semi.append(0.0)
            continue
        Kt = assemble_stiffness(mesh, ident, 1.0, mask=mask)
        semi.append(float(np.sqrt(max(u @ (Kt @ u), 0.0))))
    jump = 0.0
    if mesh.n_pairs > 1:
        s = jump_values(mesh, u)
        a, b = s[:-1], s[1:]
        jump = float(np.sqrt(np.sum(mesh.edge_lengths / 3.0 * (a * a + a * b + b * b))))
    return Norms(l2, semi[0], semi[1], jump)


# ---------------------------------------------------------------------------
# cross-mesh evaluation
# ---------------------------------------------------------------------------

class PointLocator:
    """Uniform-bin point location on a triangle mesh.

    Points covered by several triangles (element edges, the interface) are
    resolved in favour of a plus-tagged triangle.
    """

    def __init__(self, mesh, tol=1e-10):
        self.mesh = mesh
        self.tol = tol
        nodes, tris = mesh.nodes, mesh.triangles
        p = nodes[tris]
        lo = p.min(axis=1)
        hi = p.max(axis=1)
        self.origin = nodes.min(axis=0)
        extent = nodes.max(axis=0) - self.origin
        size = np.maximum(np.median(hi - lo, axis=0), extent / 4096)
        self.nb = np.maximum(np.ceil(extent / size).astype(int), 1)
        self.size = extent / self.nb
        pad = 1e-9 * extent
        b0 = self._bin_index(lo - pad)
        b1 = self._bin_index(hi + pad)
        span = b1 - b0 + 1
        tri_ids, bins = [], []
        for dx in range(int(span[:, 0].max())):
            for dy in range(int(span[:, 1].max())):
                ok = (dx < span[:, 0]) & (dy < span[:, 1])
                t = np.flatnonzero(ok)
                tri_ids.append(t)
                bins.append((b0[t, 0] + dx) * self.nb[1] + (b0[t, 1] + dy))
        tri_ids = np.concatenate(tri_ids)
        bins = np.concatenate(bins)
        order = np.lexsort((tri_ids, bins))
        tri_ids, bins = tri_ids[order], bins[order]
        nbins = int(self.nb[0] * self.nb[1])
        counts = np.bincount(bins, minlength=nbins)
        width = int(counts.max())
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slot = np.arange(bins.size) - starts[bins]
        self.candidates = np.full((nbins, width), -1, dtype=np.int64)
        self.candidates[bins, slot] = tri_ids
        # affine maps to barycentric coordinates
        x, y = p[..., 0], p[..., 1]
        det = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
        self._p0 = p[:, 0]
        self._inv = np.empty((len(tris), 2, 2))
        self._inv[:, 0, 0] = (y[:, 2] - y[:, 0]) / det
        self._inv[:, 0, 1] = -(x[:, 2] - x[:, 0]) / det
        self._inv[:, 1, 0] = -(y[:, 1] - y[:, 0]) / det
        self._inv[:, 1, 1] = (x[:, 1] - x[:, 0]) / det

    def _bin_index(self, pts):
        idx = np.floor((pts - self.origin) / self.size).astype(int)
        return np.clip(idx, 0, self.nb - 1)

    def locate(self, points, chunk=20000):
        """Return (triangle ids, barycentric coordinates) of ``points``."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        tri_out = np.empty(len(points), dtype=np.int64)
        bary_out = np.empty((len(points), 3))
        for start in range(0, len(points), chunk):
            pts = points[start:start + chunk]
            b = self._bin_index(pts)
            cand = self.candidates[b[:, 0] * self.nb[1] + b[:, 1]]
            safe = np.where(cand >= 0, cand, 0)
            d = pts[:, None, :] - self._p0[safe]
            lam = np.einsum("pcij,pcj->pci", self._inv[safe], d)
            bary = np.concatenate([1.0 - lam.sum(-1, keepdims=True), lam], axis=-1)
            inside = (cand >= 0) & np.all(bary >= -self.tol, axis=-1)
            plus = self.mesh.tags[safe] == PLUS
            score = inside * (2 + plus)
            best = np.argmax(score, axis=1)
            rows = np.arange(len(pts))
            if not np.all(inside[rows, best]):
                bad = int(np.flatnonzero(~inside[rows, best])[0])
                raise PointLookupError(
                    f"point {pts[bad].tolist()} lies outside the mesh")
            tri_out[start:start + len(pts)] = cand[rows, best]
            bary_out[start:start + len(pts)] = bary[rows, best]
        return tri_out, bary_out


def evaluate_cross_mesh(mesh, values, points, locator: PointLocator | None = None):
    """Evaluate a P1 field of ``mesh`` at arbitrary points of Q."""
    loc = locator if locator is not None else PointLocator(mesh)
    tri, bary = loc.locate(points)
    values = np.asarray(values, dtype=float)
    return np.einsum("pi,pi->p", bary, values[mesh.triangles[tri]])


def midpoint_rule(mesh):
    """Edge midpoints (T, 3, 2) and weights (T,) of the 3-point rule."""
    p = mesh.nodes[mesh.triangles]
    mids = 0.5 * (p + p[:, [1, 2, 0]])
    return mids, mesh.triangle_areas() / 3.0


def l2_difference(mesh, u, other_mesh, other_u, locator=None):
    """``||u - other_u||_{L2(Q)}`` by the midpoint rule on ``mesh``."""
    mids, w = midpoint_rule(mesh)
    u = np.asarray(u, dtype=float)
    own = 0.5 * (u[mesh.triangles] + u[mesh.triangles[:, [1, 2, 0]]])
    ext = evaluate_cross_mesh(other_mesh, other_u, mids.reshape(-1, 2), locator).reshape(-1, 3)
    return float(np.sqrt(np.sum(w[:, None] * (own - ext) ** 2)))


# ---------------------------------------------------------------------------
# field dump
# ---------------------------------------------------------------------------

def write_field(values, path):
    values = np.asarray(values, dtype=float)
    Path(path).write_text("".join(f"{i} {v:.17g}\n" for i, v in enumerate(values)))


def read_field(path):
    rows = [r.split() for r in Path(path).read_text().splitlines() if r.strip()]
    ids = np.array([int(r[0]) for r in rows])
    if not np.array_equal(ids, np.arange(len(rows))):
        raise ValidationError(f"{path}: field ids are not 0..n-1 in order")
    return np.array([float(r[1]) for r in rows])
