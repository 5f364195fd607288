"""Command-line entry point ``roughvi``.

Exit codes: 0 success, 1 a check failed (``sweep``/``verify``),
2 invalid input, 3 solver failure, 4 file i/o problem.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .assembly import apply_dirichlet, assemble_problem, read_field
from .config import load_config, parse_config
from .errors import RoughVIError, ValidationError
from .geometry import as_fraction, build_cell_mesh, build_rough_mesh, read_mesh_dump, write_mesh
from .harness import emit_report, energy_terms, run_sweep, solve_eps, verify_apriori
from .homogenize import VANISHING, homogenize
from .vi_solver import _pair_data, read_pair_status, write_solution

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4
ENV_OUT = "ROUGHVI_OUT_DIR"
CHECK_TOL = 1e-8


def _out_dir(args, cfg):
    """--out beats the environment, which beats the config file."""
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get(ENV_OUT):
        return Path(os.environ[ENV_OUT])
    return Path(cfg.out_dir)


def _emit(lines, path=None):
    text = "".join(line + "\n" for line in lines)
    sys.stdout.write(text)
    if path is not None:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cell(args):
    cfg = load_config(args.config)
    data = homogenize(cfg.coefficient(), build_cell_mesh(cfg.cell_n),
                      None if cfg.conductance_zero else cfg.conductance(),
                      cfg.profile(), cfg.k, cfg.gamma)
    if cfg.conductance_zero:
        data.conductance = {"A": 0.0, "B": VANISHING}.get(data.regime)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    text = data.report()
    sys.stdout.write(text)
    (out / "cell.txt").write_text(text)
    return EXIT_OK


def cmd_solve_eps(args):
    cfg = load_config(args.config)
    eps = as_fraction(args.eps) if args.eps else cfg.eps_list[0]
    cfg = cfg.with_overrides(eps_list=(eps,)).validate()
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    mesh, problem, sol = solve_eps(cfg, eps)
    write_mesh(mesh, out / "mesh.txt")
    write_solution(sol, out / "field.txt", out / "pairs.txt")
    (out / "scenario.cfg").write_text(cfg.to_text())
    kk, bb, fu = energy_terms(problem, sol.values)
    coupling = "empty" if problem.coupling.nnz == 0 else f"{problem.coupling.nnz} entries"
    _emit([
        f"eps = {eps}",
        f"nodes = {mesh.n_nodes}",
        f"pairs = {sol.jumps.size}",
        f"coupling = {coupling}",
        f"iterations = {sol.iterations}",
        f"active_fraction = {sol.active_fraction:.6g}",
        f"complementarity = {max(sol.complementarity()):.3e}",
        f"energy_residual = {abs(kk + bb - fu):.3e}",
    ], out / "meta.txt")
    return EXIT_OK


def cmd_sweep(args):
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    report = run_sweep(cfg, threads=args.threads)
    checks = verify_apriori(report, cfg.max_over_median)
    paths = emit_report(report, out, checks)
    lines = [f"scenario = {report.scenario}", f"regime = {report.regime}",
             f"limit = {report.limit_regime}"]
    lines += [f"eps = {r.eps}: failed ({r.error})" for r in report.failures]
    lines += [c.line() for c in checks]
    lines.append(f"wrote {paths['csv']}")
    _emit(lines)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK


def _meta_eps(path):
    for line in Path(path).read_text().splitlines():
        key, _, value = line.partition("=")
        if key.strip() == "eps":
            return as_fraction(value.strip())
    raise ValidationError(f"{path}: no eps entry")


def verify_dump(dump_dir, tol=CHECK_TOL):
    """Re-derive pair data from a ``solve-eps`` dump; returns named checks."""
    dump = Path(dump_dir)
    try:
        cfg = parse_config((dump / "scenario.cfg").read_text())
        eps = _meta_eps(dump / "meta.txt")
        nodes, triangles, _, pairs, _ = read_mesh_dump(dump / "mesh.txt")
        u = read_field(dump / "field.txt")
        ids, jumps_tab, mult_tab, active_tab = read_pair_status(dump / "pairs.txt")
    except (ValueError, IndexError) as exc:
        raise OSError(f"unreadable dump in {dump}: {exc}") from exc

    d = cfg.domain(eps)
    mesh = build_rough_mesh(d, cfg.profile(), cfg.nx_per_period, cfg.ny)
    h = 0.0 if cfg.conductance_zero else cfg.conductance()
    problem = assemble_problem(mesh, cfg.coefficient(), h, cfg.source(), d.eps, d.gamma)
    red = apply_dirichlet(problem)
    checks = []
    same_mesh = (nodes.shape == mesh.nodes.shape and np.array_equal(triangles, mesh.triangles)
                 and np.array_equal(pairs, mesh.pairs)
                 and float(np.abs(nodes - mesh.nodes).max(initial=0.0)) <= 1e-12)
    checks.append(("mesh", same_mesh, "dump matches the rebuilt mesh"))
    if not same_mesh or u.size != mesh.n_nodes or not np.array_equal(ids, red.pair_ids):
        checks.append(("layout", False, "field or pair table does not fit the mesh"))
        return checks
    jumps, mult = _pair_data(red, u[red.free])
    scale = 1.0 + float(np.abs(mult).max(initial=0.0))
    dj = float(np.abs(jumps - jumps_tab).max(initial=0.0))
    dm = float(np.abs(mult - mult_tab).max(initial=0.0))
    checks.append(("jumps", dj <= tol, f"max table deviation {dj:.3e}"))
    checks.append(("multipliers", dm <= tol * scale, f"max table deviation {dm:.3e}"))
    neg_j = float(max(0.0, -jumps.min(initial=0.0)))
    neg_m = float(max(0.0, -mult.min(initial=0.0)))
    prod = float(np.abs(jumps * mult).max(initial=0.0))
    checks.append(("complementarity", max(neg_j, neg_m, prod) <= tol,
                   f"({neg_j:.3e}, {neg_m:.3e}, {prod:.3e})"))
    kk, bb, fu = energy_terms(problem, u)
    res = abs(kk + bb - fu)
    checks.append(("energy-identity", res <= tol * (1 + abs(fu)), f"residual {res:.3e}"))
    active = (jumps <= 1e-12) & (mult > 1e-12)
    checks.append(("active-flags", bool(np.array_equal(active, active_tab)),
                   f"{int(active.sum())} active pairs"))
    return checks


def cmd_verify(args):
    checks = verify_dump(args.dump)
    _emit([f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in checks])
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_CHECK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="roughvi", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out=True):
        sp.add_argument("--config", required=True, help="scenario file")
        if out:
            sp.add_argument("--out", help=f"output directory (overrides ${ENV_OUT})")

    sp = sub.add_parser("cell", help="homogenized tensor, conductance and regime")
    common(sp)
    sp.set_defaults(func=cmd_cell)
    sp = sub.add_parser("solve-eps", help="one oscillating-interface solve with dumps")
    common(sp)
    sp.add_argument("--eps", help="period as a rational, e.g. 1/8 (default: first in the sweep)")
    sp.set_defaults(func=cmd_solve_eps)
    sp = sub.add_parser("sweep", help="epsilon sweep against the limit problem")
    common(sp)
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    sp = sub.add_parser("verify", help="re-check a solve-eps dump")
    sp.add_argument("dump", help="directory written by solve-eps")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RoughVIError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
