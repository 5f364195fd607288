"""Solvers for the discrete Signorini-type variational inequality.

The constraint ``[u] >= 0`` couples the two trace DOFs of each interface
pair.  In (mean, jump) coordinates it becomes a simple bound ``s_i >= 0``,
which projected SOR handles by clamping.  All non-jump coordinates enter the
problem quadratically without constraints, so they are eliminated exactly
(Schur complement) and the relaxation runs on the jump coordinates only.

The active-set oracle works in the original nodal coordinates and merges the
two traces of every pinned pair; it shares no code with the relaxation path.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from numba import njit

from .assembly import DiscreteVIProblem, ReducedProblem, apply_dirichlet, write_field
from .errors import ConditioningError, NonConvergenceError, SolverError, ValidationError

DENSE_LIMIT = 2000


def _reduced(problem):
    if isinstance(problem, ReducedProblem):
        return problem
    if isinstance(problem, DiscreteVIProblem):
        return apply_dirichlet(problem)
    raise ValidationError(f"expected a discrete problem, got {type(problem).__name__}")


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JumpCoordinateMap:
    """``(u+, u-) <-> (m, s)`` with ``m = (u+ + u-)/2`` and ``s = u+ - u-``.

    The mean is stored in the plus slot and the jump in the minus slot of the
    free-DOF vector, so no permutation is needed.
    """

    n: int
    plus: np.ndarray
    minus: np.ndarray

    @classmethod
    def from_problem(cls, problem: ReducedProblem):
        return cls(problem.n, problem.pairs[:, 0].copy(), problem.pairs[:, 1].copy())

    @property
    def jump_index(self):
        return self.minus

    def matrix(self):
        """Sparse ``T`` with ``u = T z``."""
        n, p, m = self.n, self.plus, self.minus
        other = np.setdiff1d(np.arange(n), np.concatenate([p, m]))
        rows = np.concatenate([other, p, p, m, m])
        cols = np.concatenate([other, p, m, p, m])
        k = p.size
        vals = np.concatenate([np.ones(other.size), np.ones(k), np.full(k, 0.5),
                               np.ones(k), np.full(k, -0.5)])
        return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def to_jump(self, u):
        z = np.array(u, dtype=float, copy=True)
        up, um = z[self.plus].copy(), z[self.minus].copy()
        z[self.plus] = 0.5 * (up + um)
        z[self.minus] = up - um
        return z

    def from_jump(self, z):
        u = np.array(z, dtype=float, copy=True)
        mean, jump = u[self.plus].copy(), u[self.minus].copy()
        u[self.plus] = mean + 0.5 * jump
        u[self.minus] = mean - 0.5 * jump
        return u


# ---------------------------------------------------------------------------
# solution container
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class DiscreteVISolution:
    """Nodal values on the full mesh plus per-pair complementarity data.

    ``pair_ids`` index the mesh's interface pairs that carry a constraint
    (pairs pinned by the boundary condition are omitted).
    """

    values: np.ndarray
    pair_ids: np.ndarray
    jumps: np.ndarray
    multipliers: np.ndarray
    iterations: int = 0
    residual: float = 0.0
    energy_history: np.ndarray | None = field(default=None, repr=False)
    active_tol: float = 1e-12
    mesh: object = field(default=None, repr=False)

    @property
    def active(self):
        return (self.jumps <= self.active_tol) & (self.multipliers > self.active_tol)

    @property
    def inactive(self):
        return ~self.active

    @property
    def active_fraction(self):
        return float(np.mean(self.active)) if self.jumps.size else 0.0

    def complementarity(self):
        """``(max negative jump, max negative multiplier, max |jump * multiplier|)``."""
        if self.jumps.size == 0:
            return 0.0, 0.0, 0.0
        return (float(max(0.0, -self.jumps.min())),
                float(max(0.0, -self.multipliers.min())),
                float(np.max(np.abs(self.jumps * self.multipliers))))

    def min_residual(self):
        """Natural residual ``max |min(jump, multiplier)|``."""
        if self.jumps.size == 0:
            return 0.0
        return float(np.max(np.abs(np.minimum(self.jumps, self.multipliers))))


def _pair_data(problem: ReducedProblem, u_free):
    r = problem.operator @ u_free - problem.load
    p, m = problem.pairs[:, 0], problem.pairs[:, 1]
    jumps = u_free[p] - u_free[m]
    mult = 0.5 * (r[p] - r[m])
    return jumps, mult


def _make_solution(problem, u_free, mesh=None, **kw):
    jumps, mult = _pair_data(problem, u_free)
    return DiscreteVISolution(problem.expand(u_free), problem.pair_ids.copy(), jumps, mult,
                              mesh=mesh, **kw)


# ---------------------------------------------------------------------------
# linear solves
# ---------------------------------------------------------------------------

def _linear(A, b, method="auto", rtol=1e-10, maxiter=None, symmetric=True):
    n = b.size
    if n == 0:
        return np.empty(0)
    if method == "dense" or (method == "auto" and n < DENSE_LIMIT):
        return np.linalg.solve(A.toarray(), b)
    if method == "direct" or not symmetric:
        return spla.spsolve(A.tocsc(), b)
    history = []
    d = A.diagonal()
    precond = spla.LinearOperator(A.shape, matvec=lambda x: x / d)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros(n)

    def record(xk):
        history.append(float(np.linalg.norm(b - A @ xk) / bnorm))

    x, info = spla.cg(A, b, rtol=rtol, atol=0.0, M=precond,
                      maxiter=maxiter or 20 * n, callback=record)
    if info != 0:
        raise SolverError(f"conjugate gradients stalled after {len(history)} iterations",
                          residual=history[-1] if history else None, history=history)
    return x


def solve_linear(problem, method="auto", rtol=1e-10):
    """Unconstrained solve of ``(K + B) u = f`` on the free DOFs.

    ``method`` is ``"auto"`` (dense below 2000 DOFs, preconditioned CG
    otherwise), ``"dense"``, ``"cg"`` or ``"direct"``.
    """
    red = _reduced(problem)
    u = _linear(red.operator, red.load, method, rtol, symmetric=red.symmetric)
    return red.expand(u)


# ---------------------------------------------------------------------------
# projected SOR
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _psor_kernel(S, c, s, omega, tol, max_iter, energy):
    m = s.size
    Ss = S @ s
    for it in range(max_iter):
        delta = 0.0
        for i in range(m):
            r = c[i] - Ss[i]
            new = s[i] + omega * r / S[i, i]
            if new < 0.0:
                new = 0.0
            d = new - s[i]
            if d != 0.0:
                for j in range(m):
                    Ss[j] += S[j, i] * d
                s[i] = new
                if abs(d) > delta:
                    delta = abs(d)
        # fresh product limits drift of the running update
        Ss = S @ s
        nat = 0.0
        for i in range(m):
            g = Ss[i] - c[i]
            v = abs(min(s[i], g))
            if v > nat:
                nat = v
        e = 0.0
        for i in range(m):
            e += s[i] * (0.5 * Ss[i] - c[i])
        energy[it] = e
        if delta <= tol and nat <= tol:
            return it + 1, delta, nat
    return -max_iter, delta, nat


def solve_vi(problem, tol=1e-10, max_iter=100000, relaxation=1.5, x0=None):
    """Projected SOR for ``u`` with ``[u] >= 0`` at every free interface pair.

    Stops when the largest relaxation increment and the natural residual
    ``|min(s, grad)|`` both fall below ``tol``.  ``x0`` (full nodal vector)
    seeds the jump coordinates after clamping them to be feasible.
    """
    red = _reduced(problem)
    mesh = getattr(problem, "mesh", None)
    if not red.symmetric:
        raise ValidationError(
            "projected relaxation requires a symmetric operator; use solve_vi_activeset")
    if not 0 < relaxation < 2:
        raise ValidationError("relaxation factor must lie in (0, 2)")
    if red.pairs.shape[0] == 0:
        u = _linear(red.operator, red.load)
        return _make_solution(red, u, mesh, iterations=0, residual=0.0)

    cmap = JumpCoordinateMap.from_problem(red)
    T = cmap.matrix()
    M = (T.T @ red.operator @ T).tocsr()
    b = T.T @ red.load
    J = cmap.jump_index
    R = np.setdiff1d(np.arange(red.n), J)
    M_RR = M[R][:, R].tocsc()
    M_RJ = M[R][:, J].toarray()
    M_JJ = M[J][:, J].toarray()
    lu = spla.splu(M_RR) if R.size else None
    if lu is not None:
        X = lu.solve(np.column_stack([M_RJ, b[R]]))
        S = M_JJ - M_RJ.T @ X[:, :-1]
        c = b[J] - M_RJ.T @ X[:, -1]
    else:
        S, c = M_JJ, b[J].copy()
    S = 0.5 * (S + S.T)

    s = np.zeros(J.size)
    if x0 is not None:
        z0 = cmap.to_jump(np.asarray(x0, dtype=float)[red.free])
        s = np.maximum(z0[J], 0.0)
    energy = np.zeros(max_iter)
    iters, delta, nat = _psor_kernel(S, c, s, float(relaxation), float(tol), int(max_iter), energy)
    if iters < 0:
        raise NonConvergenceError(
            f"projected SOR did not converge in {max_iter} sweeps "
            f"(increment {delta:.3e}, natural residual {nat:.3e})", residual=max(delta, nat))
    z = np.zeros(red.n)
    z[J] = s
    if lu is not None:
        z[R] = lu.solve(b[R] - M_RJ @ s)
    u = cmap.from_jump(z)
    return _make_solution(red, u, mesh, iterations=iters, residual=delta,
                          energy_history=energy[:iters].copy())


# ---------------------------------------------------------------------------
# exhaustive active-set oracle
# ---------------------------------------------------------------------------

def _merge_matrix(n, pairs, subset):
    """Columns of the nodal space with the two traces of ``subset`` tied."""
    target = np.arange(n)
    target[pairs[subset, 1]] = pairs[subset, 0]
    keep = np.setdiff1d(np.arange(n), pairs[subset, 1])
    col = np.full(n, -1)
    col[keep] = np.arange(keep.size)
    return sp.csr_matrix((np.ones(n), (np.arange(n), col[target])), shape=(n, keep.size))


def solve_vi_activeset(problem, budget=16, tol=1e-10):
    """Exact solve by enumerating every set of pinned pairs.

    For each subset (smallest first) the traces of the pinned pairs are tied
    and the linear system solved; the first subset whose solution has
    nonnegative jumps off the subset and nonnegative multipliers on it is
    returned.  Works for nonsymmetric operators.
    """
    red = _reduced(problem)
    m = red.pairs.shape[0]
    if m > budget:
        raise ValidationError(f"{m} interface pairs exceed the enumeration budget {budget}")
    A = red.operator
    f = red.load
    scale = max(1.0, float(np.abs(f).max(initial=0.0)))
    tried = 0
    for size in range(m + 1):
        for subset in itertools.combinations(range(m), size):
            subset = np.array(subset, dtype=np.int64)
            P = _merge_matrix(red.n, red.pairs, subset)
            Ar = (P.T @ A @ P).tocsr()
            y = _linear(Ar, P.T @ f, symmetric=red.symmetric)
            u = P @ y
            jumps, mult = _pair_data(red, u)
            off = np.ones(m, dtype=bool)
            off[subset] = False
            tried += 1
            if np.all(jumps[off] >= -tol * scale) and np.all(mult[subset] >= -tol * scale):
                jumps[subset] = 0.0
                return DiscreteVISolution(red.expand(u), red.pair_ids.copy(), jumps, mult,
                                          iterations=tried, mesh=getattr(problem, "mesh", None))
    raise ConditioningError(f"no active set among {tried} candidates satisfies optimality")


# ---------------------------------------------------------------------------
# dumps
# ---------------------------------------------------------------------------

def write_pair_status(solution: DiscreteVISolution, path):
    active = solution.active
    lines = ["pair jump multiplier active"]
    lines += [f"{i} {j:.17g} {m:.17g} {int(a)}"
              for i, j, m, a in zip(solution.pair_ids, solution.jumps, solution.multipliers, active)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_pair_status(path):
    rows = [r.split() for r in Path(path).read_text().splitlines()[1:] if r.strip()]
    ids = np.array([int(r[0]) for r in rows], dtype=np.int64)
    jumps = np.array([float(r[1]) for r in rows])
    mult = np.array([float(r[2]) for r in rows])
    active = np.array([r[3] == "1" for r in rows])
    return ids, jumps, mult, active


def write_solution(solution: DiscreteVISolution, field_path, pairs_path):
    write_field(solution.values, field_path)
    write_pair_status(solution, pairs_path)
