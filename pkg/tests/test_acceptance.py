"""Acceptance suite: one recorded PASS/FAIL line per criterion.

Expected values come from oracles computed here, independently of the
package (closed-form integrals, the exhaustive active-set solver, the case
lists written out by hand).
"""
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from scipy import integrate, special

from roughvi.assembly import InterfaceConductance, PeriodicCoefficient, Source, assemble_problem
from roughvi.config import canonical_config, load_config
from roughvi.geometry import DomainSpec, InterfaceProfile, build_cell_mesh, build_flat_mesh
from roughvi.geometry import build_rough_mesh
from roughvi.harness import energy_terms, run_sweep, verify_apriori
from roughvi.homogenize import classify_regime, effective_conductance, homogenized_tensor
from roughvi.vi_solver import solve_vi, solve_vi_activeset

_SWEEPS = {}


def sweep(case):
    if case not in _SWEEPS:
        t0 = time.perf_counter()
        report = run_sweep(load_config(canonical_config(case)), threads=4)
        _SWEEPS[case] = (report, verify_apriori(report), time.perf_counter() - t0)
    return _SWEEPS[case]


def check_named(checks, name):
    return next(c for c in checks if c.name == name)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def harmonic_mean_oracle():
    """1 / mean(1 / (2 + sin 2 pi y)); closed form sqrt(2^2 - 1)."""
    inv, _ = integrate.quad(lambda y: 1.0 / (2.0 + np.sin(2 * np.pi * y)), 0.0, 1.0,
                            epsabs=1e-14, epsrel=1e-14)
    return 1.0 / inv


def arc_length_oracle():
    """Mean of sqrt(1 + (pi cos 2 pi y)^2) through the complete elliptic integral."""
    m = np.pi ** 2 / (1 + np.pi ** 2)
    return 2.0 / np.pi * np.sqrt(1 + np.pi ** 2) * special.ellipe(m)


def regime_by_cases(k, gamma):
    """The three case lists, transcribed literally."""
    hits = []
    if (k >= 1 and gamma == 0) or (0 < k < 1 and gamma == 1 - k):
        hits.append("A")
    if (k >= 1 and gamma > 0) or (0 < k < 1 and gamma > 1 - k):
        hits.append("B")
    if (k >= 1 and gamma < 0) or (0 < k < 1 and gamma < 1 - k):
        hits.append("C")
    return hits


def small_problems():
    """Every small shipped-builder mesh (at most 12 constrained pairs) with varied data."""
    sine, saw = InterfaceProfile.sine(), InterfaceProfile.sawtooth()
    meshes = []
    for prof, nxp in product((sine, saw), (8, 12)):
        d = DomainSpec(L="1/4", ell=1, eps="1/4", k=1, gamma=0)
        meshes.append(("rough", d, build_rough_mesh(d, prof, nxp, 4)))
    for nx in (4, 8, 12):
        d = DomainSpec(L=1, ell=1)
        meshes.append(("flat", d, build_flat_mesh(d, nx, 4)))
    sources = [Source("split-sign"), Source("split-sign", 1.0, flip_x1=0.125),
               Source("bump", 3.0), Source("constant", -1.0)]
    ident = PeriodicCoefficient()
    for (kind, d, mesh), src in product(meshes, sources):
        yield mesh, ident, InterfaceConductance(), src, d
    mesh_kind, d, mesh = meshes[0]
    for coeff, h in product([PeriodicCoefficient("layered"),
                             PeriodicCoefficient("rotated-anisotropic")],
                            [InterfaceConductance("sine-positive", 2.0),
                             InterfaceConductance("zero")]):
        yield mesh, coeff, h, Source("split-sign", 1.0, flip_x1=0.125), d


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def test_c01_identity_tensor(acceptance):
    t0 = time.perf_counter()
    data = homogenized_tensor(PeriodicCoefficient("identity"), build_cell_mesh(64))
    elapsed = time.perf_counter() - t0
    err = float(np.abs(data.tensor - np.eye(2)).max())
    ok = err <= 1e-8 and elapsed < 5.0
    acceptance(1, "identity tensor", ok, f"max error {err:.2e}, {elapsed:.2f} s")
    assert ok


def test_c02_layered_tensor(acceptance):
    oracle = harmonic_mean_oracle()
    assert oracle == pytest.approx(np.sqrt(3.0), abs=1e-12)
    coeff = PeriodicCoefficient("layered")
    tensors = {n: homogenized_tensor(coeff, build_cell_mesh(n)).tensor for n in (16, 32, 64)}
    target = np.diag([oracle, 2.0])
    errs = [float(np.abs(tensors[n] - target).max()) for n in (16, 32, 64)]
    steps = [float(np.abs(tensors[32] - tensors[16]).max()),
             float(np.abs(tensors[64] - tensors[32]).max())]
    t = tensors[64]
    ok = (abs(t[0, 0] - oracle) <= 2e-3 and abs(t[1, 1] - 2.0) <= 2e-3
          and max(abs(t[0, 1]), abs(t[1, 0])) <= 1e-8
          and errs[0] > errs[1] > errs[2] and steps[0] > steps[1])
    acceptance(2, "layered tensor", ok,
               f"A11 = {t[0, 0]:.6f} vs {oracle:.6f}, errors {errs[0]:.1e} > {errs[1]:.1e} > {errs[2]:.1e}")
    assert ok


def test_c03_coercivity(acceptance):
    details, ok = [], True
    for preset in ("identity", "layered"):
        coeff = PeriodicCoefficient(preset)
        data = homogenized_tensor(coeff, build_cell_mesh(64))
        # independent re-sampling over 360 directions
        th = np.deg2rad(np.arange(360))
        lam = np.column_stack([np.cos(th), np.sin(th)])
        flux = lam @ data.tensor.T
        quad = np.einsum("ij,ij->i", flux, lam)
        good = (quad.min() >= coeff.alpha - 1e-12
                and np.linalg.norm(flux, axis=1).max() <= coeff.beta ** 2 / coeff.alpha + 1e-12
                and data.satisfies_bounds(coeff.alpha, coeff.beta))
        ok &= bool(good)
        details.append(f"{preset}: min {quad.min():.4f} >= {coeff.alpha:.4f}")
    acceptance(3, "coercivity certificate", ok, "; ".join(details))
    assert ok


def test_c04_effective_conductance(acceptance):
    h = InterfaceConductance()
    sine = InterfaceProfile.sine()
    v_flat = effective_conductance(h, sine, 2, 0)
    v_steep = effective_conductance(h, sine, Fraction(1, 2), Fraction(1, 2))
    v_arc = effective_conductance(h, sine, 1, 0)
    oracle = arc_length_oracle()
    ok = (abs(v_flat - 1.0) <= 1e-12 and abs(v_steep - 2.0) <= 1e-6
          and abs(v_arc - oracle) <= 1e-3)
    acceptance(4, "effective conductance", ok,
               f"{v_flat:.9f}, {v_steep:.9f}, {v_arc:.6f} vs oracle {oracle:.6f}")
    assert ok


def test_c05_vi_oracle_equivalence(acceptance):
    worst_diff = worst_comp = worst_scale = 0.0
    count = 0
    t = 3.7
    for mesh, coeff, h, src, d in small_problems():
        problem = assemble_problem(mesh, coeff, h, src, d.eps, d.gamma)
        pairs = np.sum(np.all(~mesh.boundary[mesh.pairs], axis=1))
        assert pairs <= 12
        psor = solve_vi(problem)
        exact = solve_vi_activeset(problem, budget=12)
        worst_diff = max(worst_diff, float(np.abs(psor.values - exact.values).max()))
        worst_comp = max(worst_comp, *psor.complementarity())
        scaled_coeff = PeriodicCoefficient(coeff.preset, coeff.params, scale=t)
        scaled = assemble_problem(mesh, scaled_coeff, h.scaled(t), src.scaled(t), d.eps, d.gamma)
        worst_scale = max(worst_scale,
                          float(np.abs(solve_vi(scaled).values - psor.values).max()))
        count += 1
    ok = worst_diff <= 1e-9 and worst_comp <= 1e-8 and worst_scale <= 1e-10
    acceptance(5, "VI oracle equivalence", ok,
               f"{count} problems, max diff {worst_diff:.1e}, complementarity {worst_comp:.1e}, "
               f"scaling {worst_scale:.1e}")
    assert ok


def test_c06_energy_identity(acceptance):
    worst = 0.0
    for mesh, coeff, h, src, d in small_problems():
        problem = assemble_problem(mesh, coeff, h, src, d.eps, d.gamma)
        kk, bb, fu = energy_terms(problem, solve_vi(problem).values)
        worst = max(worst, abs(kk + bb - fu) / (1 + abs(fu)))
    for case in ("A", "B", "C"):
        report = sweep(case)[0]
        rel = report.column("energy_residual") / report.column("energy_scale")
        worst = max(worst, float(rel.max()))
    ok = worst <= 1e-8
    acceptance(6, "energy identity", ok, f"max relative residual {worst:.1e}")
    assert ok


def test_c07_case_a_experiment(acceptance):
    report, checks, elapsed = sweep("A")
    err = check_named(checks, "error-trend")
    grad = check_named(checks, "gradient-bounded")
    ok = err.passed and grad.passed and elapsed < 600 and all(c.passed for c in checks)
    acceptance(7, "case-A convergence", ok, f"{err.detail}; {grad.detail}; {elapsed:.1f} s")
    assert ok


def test_c08_case_b_experiment(acceptance):
    report, checks, elapsed = sweep("B")
    energy = check_named(checks, "interface-energy-decreasing")
    err = check_named(checks, "error-trend")
    ok = energy.passed and err.passed and report.limit_regime == "B"
    acceptance(8, "case-B experiment", ok, f"{err.detail}; energy {energy.detail}")
    assert ok


def test_c09_case_c_experiment(acceptance):
    report, checks, elapsed = sweep("C")
    jump = check_named(checks, "jump-decay")
    err = check_named(checks, "error-trend")
    scaled = check_named(checks, "scaled-jump-bounded")
    ok = jump.passed and err.passed and scaled.passed and report.limit_regime == "C"
    acceptance(9, "case-C experiment", ok, f"jump {jump.detail}; error {err.detail}")
    assert ok


def test_c10_regime_partition(acceptance):
    ks = [Fraction(n, 8) for n in range(1, 33)]
    gammas = [Fraction(n, 8) for n in range(-24, 25)]
    mismatches = 0
    for k, g in product(ks, gammas):
        hits = regime_by_cases(k, g)
        mismatches += len(hits) != 1 or classify_regime(k, g) != hits[0]
    boundary = all(classify_regime(k, 1 - k) == "A" for k in ks if k < 1)
    # decimal input on the boundary must still land exactly on it
    boundary &= classify_regime(0.3, 0.7) == "A" and classify_regime("1/3", "2/3") == "A"
    ok = mismatches == 0 and boundary
    acceptance(10, "regime classifier", ok,
               f"{len(ks) * len(gammas)} grid points, {mismatches} mismatches")
    assert ok


def test_c11_negative_control(acceptance):
    cfg = load_config(canonical_config("negative"))
    report = run_sweep(cfg, threads=4)
    err = check_named(verify_apriori(report), "error-trend")
    ok = report.regime == "A" and report.limit_regime == "B" and not err.passed
    acceptance(11, "negative control", ok, f"trend check correctly fails: {err.detail}")
    assert ok
