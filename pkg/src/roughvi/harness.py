"""Epsilon sweeps: solve the oscillating problem on a ladder of periods,
compare against the matching limit problem, and emit tables and charts."""
from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .assembly import (Norms, PointLocator, assemble_problem, l2_difference, l2_norms)
from .config import ScenarioConfig
from .errors import RoughVIError, SolverError, ValidationError
from .geometry import build_cell_mesh, build_rough_mesh
from .homogenize import VANISHING, classify_regime, effective_conductance, homogenized_tensor
from .limit_solver import LimitProblemSpec, solve_limit
from .vi_solver import solve_vi

log = logging.getLogger(__name__)

CSV_COLUMNS = ["scenario", "regime", "eps", "dofs", "grad_norm", "jump_norm",
               "scaled_jump_norm", "l2_error", "active_fraction", "iters"]
MIN_ROWS = 3


class SweepError(SolverError):
    """Too few epsilon rows survived to judge a trend."""


@dataclass(frozen=True)
class SweepRow:
    eps: Fraction
    dofs: int = 0
    grad_norm: float = math.nan
    jump_norm: float = math.nan
    scaled_jump_norm: float = math.nan
    l2_error: float = math.nan
    l2_error_reverse: float = math.nan
    active_fraction: float = math.nan
    iters: int = 0
    interface_energy: float = math.nan
    energy_residual: float = math.nan
    energy_scale: float = 1.0
    complementarity: float = math.nan
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


@dataclass
class SweepReport:
    scenario: str
    regime: str
    limit_regime: str
    rows: list
    limit_norms: Norms | None = None
    tensor: np.ndarray | None = None
    conductance: float | str | None = None
    zero_conductance: bool = False
    solutions: dict = field(default_factory=dict, repr=False)

    @property
    def ok_rows(self):
        return [r for r in self.rows if r.ok]

    @property
    def failures(self):
        return [r for r in self.rows if not r.ok]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.ok_rows], dtype=float)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def limit_setup(cfg: ScenarioConfig, limit_regime=None, tensor=None):
    """Regime of the data, regime of the limit to solve, tensor and conductance."""
    regime = classify_regime(cfg.k, cfg.gamma)
    limit = limit_regime or cfg.limit_regime or regime
    if tensor is None:
        tensor = homogenized_tensor(cfg.coefficient(), build_cell_mesh(cfg.cell_n)).tensor
    h_eff = None
    if limit == "A":
        if cfg.conductance_zero:
            h_eff = 0.0
        elif regime == "A":
            h_eff = effective_conductance(cfg.conductance(), cfg.profile(), cfg.k, cfg.gamma)
        else:
            raise ValidationError(f"sweep.limit: regime-{regime} data have no finite conductance")
    elif regime == "A" and not cfg.conductance_zero:
        # kept for the report even when a different limit is forced
        h_eff = effective_conductance(cfg.conductance(), cfg.profile(), cfg.k, cfg.gamma)
    elif regime == "B":
        h_eff = VANISHING
    return regime, limit, tensor, h_eff


def solve_eps(cfg: ScenarioConfig, eps):
    """One oscillating-problem solve; returns (mesh, problem, solution)."""
    d = cfg.domain(eps)
    mesh = build_rough_mesh(d, cfg.profile(), cfg.nx_per_period, cfg.ny)
    h = 0.0 if cfg.conductance_zero else cfg.conductance()
    problem = assemble_problem(mesh, cfg.coefficient(), h, cfg.source(), d.eps, d.gamma)
    sol = solve_vi(problem, tol=cfg.tol, max_iter=cfg.max_iter, relaxation=cfg.relaxation)
    return mesh, problem, sol


def energy_terms(problem, u):
    """``(u.Ku, u.Bu, f.u)`` on the full nodal vector."""
    return (float(u @ (problem.stiffness @ u)), float(u @ (problem.coupling @ u)),
            float(problem.load @ u))


def _row(cfg, eps, limit_mesh, limit_u, locator):
    mesh, problem, sol = solve_eps(cfg, eps)
    u = sol.values
    norms = l2_norms(mesh, u)
    kk, bb, fu = energy_terms(problem, u)
    err = l2_difference(mesh, u, limit_mesh, limit_u, locator)
    rev = l2_difference(limit_mesh, limit_u, mesh, u, PointLocator(mesh))
    scale = float(eps) ** (float(cfg.gamma) / 2)
    row = SweepRow(eps=eps, dofs=mesh.n_nodes, grad_norm=norms.grad, jump_norm=norms.jump,
                   scaled_jump_norm=scale * norms.jump, l2_error=err, l2_error_reverse=rev,
                   active_fraction=sol.active_fraction, iters=sol.iterations,
                   interface_energy=bb, energy_residual=abs(kk + bb - fu),
                   energy_scale=1.0 + abs(fu), complementarity=max(sol.complementarity()))
    return row, sol


def run_sweep(cfg: ScenarioConfig, threads=1, limit_regime=None, keep_solutions=False):
    """Solve every epsilon of ``cfg`` and the matching limit problem once.

    A failing row is recorded with its cause; fewer than three surviving rows
    raise :class:`SweepError`.  Rows are independent and run on ``threads``
    worker threads; the report lists them by decreasing epsilon regardless.
    """
    cfg.validate()
    eps_list = sorted(set(cfg.eps_list), reverse=True)
    if len(eps_list) < MIN_ROWS:
        raise ValidationError(f"sweep.eps: sweep needs >= {MIN_ROWS} distinct values")
    regime, limit, tensor, h_eff = limit_setup(cfg, limit_regime)
    nx = cfg.flat_nx or cfg.finest_nx()
    spec = LimitProblemSpec(limit, tensor, cfg.source(), nx, cfg.ny,
                            conductance=h_eff if limit == "A" else None, L=cfg.L, ell=cfg.ell)
    lim = solve_limit(spec, tol=cfg.tol, max_iter=cfg.max_iter, relaxation=cfg.relaxation)
    locator = PointLocator(lim.mesh)

    def work(eps):
        try:
            return _row(cfg, eps, lim.mesh, lim.values, locator)
        except (RoughVIError, np.linalg.LinAlgError) as exc:
            log.warning("eps = %s failed: %s", eps, exc)
            return SweepRow(eps=eps, error=f"{type(exc).__name__}: {exc}"), None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, eps_list))
    else:
        results = [work(e) for e in eps_list]
    rows = [r for r, _ in results]
    report = SweepReport(cfg.name, regime, limit, rows, l2_norms(lim.mesh, lim.values),
                         tensor, h_eff, cfg.conductance_zero)
    if keep_solutions:
        report.solutions = {r.eps: s for r, s in results if s is not None}
        report.solutions["limit"] = lim
    if len(report.ok_rows) < MIN_ROWS:
        causes = "; ".join(f"eps={r.eps}: {r.error}" for r in report.failures)
        raise SweepError(f"only {len(report.ok_rows)} of {len(rows)} rows succeeded ({causes})")
    return report


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _bounded(name, values, ratio):
    values = np.asarray(values, dtype=float)
    top, mid = float(values.max()), float(np.median(values))
    if top == 0.0:
        return Check(name, True, "all values zero")
    passed = mid > 0 and top / mid <= ratio
    q = top / mid if mid > 0 else math.inf
    return Check(name, bool(passed), f"max/median = {q:.4g} (limit {ratio:g})")


def _halves(name, values):
    values = np.asarray(values, dtype=float)
    if np.all(values == 0.0):
        return Check(name, True, "all values zero")
    first, last = float(values[0]), float(values[-1])
    passed = bool(np.all(values > 0) and last <= 0.5 * first)
    return Check(name, passed, f"first = {first:.4e}, last = {last:.4e}, last/first = "
                               f"{last / first if first else math.inf:.4g} (limit 0.5)")


def verify_apriori(report: SweepReport, max_over_median=3.0, tol=1e-8):
    """Named diagnostics for a sweep; never raises."""
    rows = report.ok_rows
    if len(rows) < MIN_ROWS:
        return [Check("rows", False, f"{len(rows)} successful rows, need {MIN_ROWS}")]
    checks = [_bounded("gradient-bounded", report.column("grad_norm"), max_over_median)]
    if report.zero_conductance:
        checks.append(Check("scaled-jump-bounded", True, "skipped: zero conductance"))
    else:
        checks.append(_bounded("scaled-jump-bounded", report.column("scaled_jump_norm"),
                               max_over_median))
    checks.append(_halves("error-trend", report.column("l2_error")))
    if report.regime == "C":
        checks.append(_halves("jump-decay", report.column("jump_norm")))
    if report.regime == "B":
        e = report.column("interface_energy")
        dec = bool(np.all(np.diff(e) < 0)) or bool(np.all(e == 0))
        checks.append(Check("interface-energy-decreasing", dec,
                            "values " + ", ".join(f"{v:.3e}" for v in e)))
    fwd, rev = report.column("l2_error"), report.column("l2_error_reverse")
    big = np.maximum(fwd, rev)
    small = np.minimum(fwd, rev)
    ratio = np.where(big > 1e-12, big / np.maximum(small, 1e-300), 1.0)
    checks.append(Check("cross-mesh-consistency", bool(np.all(ratio <= 2.0)),
                        f"max ratio = {ratio.max():.4g} (limit 2)"))
    comp = report.column("complementarity")
    checks.append(Check("complementarity", bool(np.all(comp <= tol)),
                        f"max = {comp.max():.3e} (limit {tol:g})"))
    rel = report.column("energy_residual") / report.column("energy_scale")
    checks.append(Check("energy-identity", bool(np.all(rel <= tol)),
                        f"max relative = {rel.max():.3e} (limit {tol:g})"))
    return checks


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def csv_text(report: SweepReport):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.ok_rows:
        w.writerow([report.scenario, report.regime, repr(float(r.eps)), r.dofs,
                    repr(r.grad_norm), repr(r.jump_norm), repr(r.scaled_jump_norm),
                    repr(r.l2_error), repr(r.active_fraction), r.iters])
    return buf.getvalue()


def _chart(report, column, ylabel, path):
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    with matplotlib.rc_context({"svg.hashsalt": "roughvi", "svg.fonttype": "none"}):
        fig = Figure(figsize=(5, 3.5))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot()
        x = report.column("eps")
        y = report.column(column)
        keep = (x > 0) & (y > 0)
        if np.any(keep):
            ax.loglog(x[keep], y[keep], "o-", color="tab:blue")
        ax.set_xlabel("eps")
        ax.set_ylabel(ylabel)
        ax.set_title(f"{report.scenario} (regime {report.regime})")
        ax.grid(True, which="both", alpha=0.3)
        fig.savefig(path, format="svg", metadata={"Date": None})


def emit_report(report: SweepReport, out_dir, checks=None):
    """Write ``sweep.csv``, ``error.svg``, ``jump.svg`` (and ``checks.txt``)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "sweep.csv", "error_svg": out / "error.svg",
             "jump_svg": out / "jump.svg"}
    paths["csv"].write_text(csv_text(report))
    _chart(report, "l2_error", "L2 error against the limit", paths["error_svg"])
    _chart(report, "jump_norm", "L2 norm of the jump", paths["jump_svg"])
    if checks is not None:
        paths["checks"] = out / "checks.txt"
        paths["checks"].write_text("".join(c.line() + "\n" for c in checks))
    return paths
