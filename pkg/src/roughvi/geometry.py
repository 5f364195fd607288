"""Interface profiles and the three structured mesh families.

All meshes are P1 triangulations built on tensor grids:

* rough two-component meshes of ``Q = ]0, L[ x ]-l, l[`` whose lower and upper
  blocks follow the oscillating interface ``x2 = eps**k * g(x1 / eps)``,
* flat two-component meshes (interface on ``x2 = 0``),
* periodic meshes of the unit cell ``Y = ]0, 1[^2``.

Interface nodes are duplicated: the lower block owns the minus traces and the
upper block the plus traces, so a field on the mesh can jump across the
interface.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import GeometryError, ValidationError

PLUS = 1
MINUS = -1


def as_fraction(value) -> Fraction:
    """Exact rational from an int, a ``"p/q"`` string, a Fraction or a float.

    Floats go through their shortest repr so that ``0.3`` becomes ``3/10``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValidationError(f"non-finite rational input {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse {value!r} as a rational") from exc
    raise ValidationError(f"cannot interpret {value!r} as a rational")


# ---------------------------------------------------------------------------
# interface profile
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InterfaceProfile:
    """Positive, 1-periodic, Lipschitz profile ``g`` on the surface cell.

    Use the constructors :meth:`sine`, :meth:`sawtooth` and
    :meth:`from_samples` rather than the raw initializer.
    """

    preset: str
    amplitude: float = 0.0
    mean: float = 1.0
    sample_y: np.ndarray | None = field(default=None, repr=False)
    sample_values: np.ndarray | None = field(default=None, repr=False)
    lipschitz: float = 0.0

    @classmethod
    def sine(cls, amplitude=0.5, mean=1.0):
        """``g(y) = mean + amplitude * sin(2 pi y)``."""
        prof = cls("sine", float(amplitude), float(mean),
                   lipschitz=2.0 * np.pi * abs(float(amplitude)))
        prof._check()
        return prof

    @classmethod
    def sawtooth(cls, amplitude=0.5, mean=1.0):
        """Triangle wave with two teeth per period.

        ``g(0) = mean - amplitude``, peaks ``mean + amplitude`` at 1/4 and 3/4;
        slopes are ``+-8 * amplitude`` with kinks at multiples of 1/4.
        """
        prof = cls("sawtooth", float(amplitude), float(mean),
                   lipschitz=8.0 * abs(float(amplitude)))
        prof._check()
        return prof

    @classmethod
    def from_samples(cls, y, values):
        """Piecewise-linear profile through ``(y_i, values_i)`` on [0, 1]."""
        y = np.asarray(y, dtype=float)
        v = np.asarray(values, dtype=float)
        if y.ndim != 1 or y.shape != v.shape or y.size < 2:
            raise ValidationError("sample table needs matching 1-D arrays of length >= 2")
        if abs(y[0]) > 1e-14 or abs(y[-1] - 1.0) > 1e-14:
            raise ValidationError("sample abscissae must start at 0 and end at 1")
        if np.any(np.diff(y) <= 0):
            raise ValidationError("sample abscissae must be strictly increasing")
        bad = np.flatnonzero(v <= 0)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(
                f"profile sample {i} (y'={y[i]:g}) has non-positive value {v[i]:g}")
        if abs(v[0] - v[-1]) > 1e-12 * max(1.0, abs(v[0])):
            raise ValidationError("profile samples are not periodic: g(0) != g(1)")
        slopes = np.diff(v) / np.diff(y)
        y.setflags(write=False)
        v.setflags(write=False)
        return cls("user-samples", 0.0, float(np.mean(v)), y, v,
                   lipschitz=float(np.max(np.abs(slopes))))

    def _check(self):
        if self.mean - abs(self.amplitude) <= 0:
            raise ValidationError(
                f"{self.preset} profile is not positive: min g = "
                f"{self.mean - abs(self.amplitude):g}")

    @property
    def max_value(self):
        if self.preset == "user-samples":
            return float(np.max(self.sample_values))
        return self.mean + abs(self.amplitude)

    @property
    def min_value(self):
        if self.preset == "user-samples":
            return float(np.min(self.sample_values))
        return self.mean - abs(self.amplitude)

    def kinks(self):
        """Abscissae in [0, 1) where the slope jumps."""
        if self.preset == "sawtooth" and self.amplitude != 0:
            return np.array([0.0, 0.25, 0.5, 0.75])
        if self.preset == "user-samples":
            y, v = self.sample_y, self.sample_values
            s = np.diff(v) / np.diff(y)
            jumps = np.abs(np.diff(np.concatenate([s, s[:1]]))) > 1e-12 * (1 + np.abs(s).max())
            # jumps[i] is the kink at the right end of interval i
            pts = np.concatenate([y[1:-1], [0.0]])[jumps]
            return np.sort(pts)
        return np.empty(0)

    def __call__(self, y):
        return eval_profile(self, y)


def eval_profile(profile: InterfaceProfile, y):
    """Return ``(g(y), g'(y))`` with periodic wraparound.

    At kinks the right-sided slope is returned.
    """
    y = np.asarray(y, dtype=float)
    t = np.mod(y, 1.0)
    if profile.preset == "sine":
        a, m = profile.amplitude, profile.mean
        val = m + a * np.sin(2 * np.pi * t)
        slope = 2 * np.pi * a * np.cos(2 * np.pi * t)
    elif profile.preset == "sawtooth":
        a, m = profile.amplitude, profile.mean
        u = np.mod(2 * t, 1.0)
        val = m + a * (1.0 - 4.0 * np.abs(u - 0.5))
        slope = np.where(u < 0.5, 8.0 * a, -8.0 * a)
    elif profile.preset == "user-samples":
        ys, vs = profile.sample_y, profile.sample_values
        val = np.interp(t, ys, vs)
        seg = np.clip(np.searchsorted(ys, t, side="right") - 1, 0, ys.size - 2)
        slope = (vs[seg + 1] - vs[seg]) / (ys[seg + 1] - ys[seg])
    else:
        raise ValidationError(f"unknown profile preset {profile.preset!r}")
    if val.ndim == 0:
        return float(val), float(slope)
    return val, slope


# ---------------------------------------------------------------------------
# domain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """Cylinder ``]0, L[ x ]-ell, ell[`` with scale eps and exponents k, gamma.

    ``L``, ``eps``, ``k`` and ``gamma`` are stored as exact rationals.
    """

    L: Fraction = Fraction(1)
    ell: float = 1.0
    eps: Fraction = Fraction(1, 4)
    k: Fraction = Fraction(1)
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("L", "eps", "k", "gamma"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        object.__setattr__(self, "ell", float(self.ell))
        if self.L <= 0 or self.ell <= 0:
            raise ValidationError("L and ell must be positive")
        if self.eps <= 0:
            raise ValidationError("eps must be positive")
        if self.k <= 0:
            raise ValidationError("oscillation exponent k must be positive")

    @property
    def periods(self) -> int:
        """Number of whole periods of length eps in ]0, L[."""
        q = self.L / self.eps
        if q.denominator != 1:
            raise ValidationError(
                f"eps = {self.eps} does not divide L = {self.L} into whole periods")
        return int(q)

    @property
    def amplitude_scale(self) -> float:
        return float(self.eps) ** float(self.k)


# ---------------------------------------------------------------------------
# two-component meshes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TwoComponentMesh:
    """P1 mesh of Q split by an interface polyline with duplicated trace nodes.

    ``pairs[i] = (plus, minus)`` node ids at abscissa ``pair_x[i]``; pairs are
    sorted by abscissa.  ``edge_lengths[i]`` is the polyline length between
    pairs ``i`` and ``i + 1``.  A mesh without pairs is a single-component
    mesh of Q (used for the Dirichlet limit problem).
    """

    nodes: np.ndarray
    triangles: np.ndarray
    tags: np.ndarray
    pairs: np.ndarray
    pair_x: np.ndarray
    edge_lengths: np.ndarray
    boundary: np.ndarray
    L: float
    ell: float
    nx: int
    ny: int
    kind: str = "rough"

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_pairs(self):
        return self.pairs.shape[0]

    def triangle_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @property
    def area_plus(self):
        return float(np.sum(self.triangle_areas()[self.tags == PLUS]))

    @property
    def area_minus(self):
        return float(np.sum(self.triangle_areas()[self.tags == MINUS]))

    @property
    def interface_length(self):
        return float(np.sum(self.edge_lengths))

    def pair_weights(self):
        """Trapezoid weights of the interface polyline at each pair."""
        w = np.zeros(self.n_pairs)
        if self.n_pairs > 1:
            w[:-1] += 0.5 * self.edge_lengths
            w[1:] += 0.5 * self.edge_lengths
        return w

    def interface_heights(self):
        if self.n_pairs == 0:
            return np.empty(0)
        return self.nodes[self.pairs[:, 0], 1]

    def max_edge_length(self):
        p = self.nodes[self.triangles]
        e = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
        return float(np.max(np.linalg.norm(e, axis=2)))


def _grid_triangles(nrows, ncols, offset, row_stride):
    """Triangles of a (nrows x ncols) block of quads, mirror-symmetric in x.

    Left half uses the ``/`` diagonal, right half ``\\``; both CCW.
    """
    tris = []
    for r in range(nrows):
        for c in range(ncols):
            a = offset + r * row_stride + c
            b, cc, d = a + 1, a + row_stride, a + row_stride + 1
            if 2 * c < ncols:
                tris.append((a, b, d))
                tris.append((a, d, cc))
            else:
                tris.append((a, b, cc))
                tris.append((b, d, cc))
    return np.array(tris, dtype=np.int64).reshape(-1, 3)


def _two_component(L, ell, xs, heights, ny, kind):
    nx = xs.size - 1
    ncol = nx + 1
    s = np.linspace(0.0, 1.0, ny + 1)
    # lower block: rows 0..ny from -ell up to the interface
    y_minus = -ell + np.outer(s, heights + ell)
    # upper block: rows 0..ny from the interface up to +ell
    y_plus = heights[None, :] + np.outer(s, ell - heights)
    # both traces of a pair must sit on bitwise-identical coordinates
    y_minus[-1] = heights
    y_plus[0] = heights
    X = np.tile(xs, ny + 1)
    nodes = np.concatenate([
        np.column_stack([X, y_minus.ravel()]),
        np.column_stack([X, y_plus.ravel()]),
    ])
    block = (ny + 1) * ncol
    tri_m = _grid_triangles(ny, nx, 0, ncol)
    tri_p = _grid_triangles(ny, nx, block, ncol)
    triangles = np.concatenate([tri_m, tri_p])
    tags = np.concatenate([np.full(len(tri_m), MINUS, dtype=np.int8),
                           np.full(len(tri_p), PLUS, dtype=np.int8)])
    minus_ids = ny * ncol + np.arange(ncol)
    plus_ids = block + np.arange(ncol)
    pairs = np.column_stack([plus_ids, minus_ids])
    edge = np.hypot(np.diff(xs), np.diff(heights))

    boundary = np.zeros(2 * block, dtype=bool)
    col = np.tile(np.arange(ncol), 2 * (ny + 1))
    boundary[(col == 0) | (col == nx)] = True
    boundary[:ncol] = True                 # x2 = -ell
    boundary[2 * block - ncol:] = True     # x2 = +ell

    for arr in (nodes, triangles, tags, pairs, xs, edge, boundary):
        arr.setflags(write=False)
    mesh = TwoComponentMesh(nodes, triangles, tags, pairs, xs, edge, boundary,
                            float(L), float(ell), nx, ny, kind)
    areas = mesh.triangle_areas()
    if np.any(areas <= 0):
        raise GeometryError("mesh generation produced inverted triangles")
    return mesh


def _x_grid(L, nx):
    return np.linspace(0.0, float(L), nx + 1)


def build_rough_mesh(domain: DomainSpec, profile: InterfaceProfile,
                     nx_per_period: int = 16, ny: int = 8) -> TwoComponentMesh:
    """Terrain-following mesh of Q split by the oscillating interface."""
    nx_per_period, ny = int(nx_per_period), int(ny)
    if nx_per_period < 8:
        raise ValidationError("nx_per_period must be >= 8 to resolve each oscillation")
    if ny < 4:
        raise ValidationError("ny must be >= 4 per component")
    periods = domain.periods
    scale = domain.amplitude_scale
    if scale * profile.max_value >= domain.ell:
        raise GeometryError(
            f"interface leaves Q: eps^k max g = {scale * profile.max_value:g} >= ell = {domain.ell:g}")
    kinks = profile.kinks()
    if kinks.size:
        pos = kinks * nx_per_period
        if np.any(np.abs(pos - np.round(pos)) > 1e-9):
            raise GeometryError(
                f"nx_per_period = {nx_per_period} does not place nodes on the profile kinks {kinks.tolist()}")
    nx = periods * nx_per_period
    # cell coordinate from integer indices keeps x'/eps exact at nodes
    j = np.arange(nx + 1)
    ycell = (j % nx_per_period) / nx_per_period
    xs = j * (float(domain.L) / nx)
    g, _ = eval_profile(profile, ycell)
    return _two_component(domain.L, domain.ell, xs, scale * g, ny, "rough")


def build_flat_mesh(domain: DomainSpec, nx: int, ny: int) -> TwoComponentMesh:
    """Two-component mesh with the interface on ``x2 = 0``."""
    nx, ny = int(nx), int(ny)
    if nx < 2 or ny < 2:
        raise ValidationError("flat mesh needs nx, ny >= 2")
    xs = _x_grid(domain.L, nx)
    return _two_component(domain.L, domain.ell, xs, np.zeros(nx + 1), ny, "flat")


def build_plain_mesh(domain: DomainSpec, nx: int, ny: int) -> TwoComponentMesh:
    """Single-component mesh of Q (no duplicated nodes), ``2 * ny`` rows.

    Triangles below ``x2 = 0`` are tagged minus, above plus; there are no
    interface pairs.
    """
    nx, ny = int(nx), int(ny)
    if nx < 2 or ny < 2:
        raise ValidationError("plain mesh needs nx, ny >= 2")
    xs = _x_grid(domain.L, nx)
    ys = np.linspace(-domain.ell, domain.ell, 2 * ny + 1)
    ncol = nx + 1
    X, Yg = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Yg.ravel()])
    triangles = _grid_triangles(2 * ny, nx, 0, ncol)
    rows = np.repeat(np.arange(2 * ny), 2 * nx)
    tags = np.where(rows < ny, MINUS, PLUS).astype(np.int8)
    col = np.tile(np.arange(ncol), 2 * ny + 1)
    row = np.repeat(np.arange(2 * ny + 1), ncol)
    boundary = (col == 0) | (col == nx) | (row == 0) | (row == 2 * ny)
    empty_pairs = np.empty((0, 2), dtype=np.int64)
    arrays = (nodes, triangles, tags, empty_pairs, boundary)
    for arr in arrays:
        arr.setflags(write=False)
    return TwoComponentMesh(nodes, triangles, tags, empty_pairs, np.empty(0), np.empty(0),
                            boundary, float(domain.L), float(domain.ell), nx, ny, "plain")


# ---------------------------------------------------------------------------
# periodic cell mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CellMesh:
    """Structured ``n x n`` triangulation of the unit cell with periodic maps.

    ``pairs_lr[j] = (left, right)`` for rows ``j < n`` and
    ``pairs_bt[i] = (bottom, top)`` for columns ``i < n``.  ``master`` maps
    every node (the top-right corner included) to one of ``n * n`` periodic
    degrees of freedom.
    """

    n: int
    nodes: np.ndarray
    triangles: np.ndarray
    pairs_lr: np.ndarray
    pairs_bt: np.ndarray
    master: np.ndarray
    quadrature: str = "barycenter"

    @property
    def n_dofs(self):
        return self.n * self.n

    def triangle_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def periodize(self, values):
        """Average a nodal field over identified nodes and copy it back."""
        values = np.asarray(values, dtype=float)
        acc = np.bincount(self.master, weights=values, minlength=self.n_dofs)
        cnt = np.bincount(self.master, minlength=self.n_dofs)
        return (acc / cnt)[self.master]


def build_cell_mesh(n: int) -> CellMesh:
    n = int(n)
    if n < 4:
        raise ValidationError("cell mesh needs n >= 4")
    t = np.linspace(0.0, 1.0, n + 1)
    X, Yg = np.meshgrid(t, t)
    nodes = np.column_stack([X.ravel(), Yg.ravel()])
    triangles = _grid_triangles(n, n, 0, n + 1)
    idx = np.arange((n + 1) ** 2)
    col, row = idx % (n + 1), idx // (n + 1)
    master = (row % n) * n + (col % n)
    j = np.arange(n)
    pairs_lr = np.column_stack([j * (n + 1), j * (n + 1) + n])
    pairs_bt = np.column_stack([j, n * (n + 1) + j])
    for arr in (nodes, triangles, pairs_lr, pairs_bt, master):
        arr.setflags(write=False)
    return CellMesh(n, nodes, triangles, pairs_lr, pairs_bt, master)


# ---------------------------------------------------------------------------
# text dump
# ---------------------------------------------------------------------------

def write_mesh(mesh: TwoComponentMesh, path):
    """Write the plain-text mesh dump (header, nodes, triangles, pairs)."""
    lines = [f"{mesh.n_nodes} {len(mesh.triangles)} {mesh.n_pairs}"]
    lines += [f"{i} {x:.17g} {y:.17g}" for i, (x, y) in enumerate(mesh.nodes)]
    lines += [f"{i} {a} {b} {c} {'+' if t == PLUS else '-'}"
              for i, ((a, b, c), t) in enumerate(zip(mesh.triangles, mesh.tags))]
    lines += [f"{i} {p} {m} {x:.17g}"
              for i, ((p, m), x) in enumerate(zip(mesh.pairs, mesh.pair_x))]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh_dump(path):
    """Parse a mesh dump into plain arrays: nodes, triangles, tags, pairs, pair_x."""
    rows = Path(path).read_text().split("\n")
    nn, nt, npairs = (int(v) for v in rows[0].split())
    body = rows[1:]
    nodes = np.array([[float(v) for v in r.split()[1:3]] for r in body[:nn]]).reshape(-1, 2)
    tri_rows = [r.split() for r in body[nn:nn + nt]]
    triangles = np.array([[int(v) for v in r[1:4]] for r in tri_rows], dtype=np.int64).reshape(-1, 3)
    tags = np.array([PLUS if r[4] == "+" else MINUS for r in tri_rows], dtype=np.int8)
    pair_rows = [r.split() for r in body[nn + nt:nn + nt + npairs]]
    pairs = np.array([[int(r[1]), int(r[2])] for r in pair_rows], dtype=np.int64).reshape(-1, 2)
    pair_x = np.array([float(r[3]) for r in pair_rows])
    return nodes, triangles, tags, pairs, pair_x
