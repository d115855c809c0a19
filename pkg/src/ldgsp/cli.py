"""Command-line study harness: sweeps over N, dt, eps with table presets.

Examples
--------
Reproduce the k=1 spatial-convergence table up to N=64::

    ldgsp-study --table 2 --k 1 --n-max 64 --out table2.csv --md table2.md

Robustness sweep over the perturbation parameter::

    ldgsp-study --table 6 --n 64 --eps-sweep 1e-4:1e-11

Single run::

    ldgsp-study --dim 1 --mesh bs --k 1 --n 32 --eps 1e-6
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import (
    StudyRecord,
    attach_rates,
    l2_error,
    records_to_csv,
    render_markdown,
    single_run_1d,
    single_run_2d,
)
from .ldg_1d import assemble_B_1d
from .mesh import MESH_KINDS, MeshSpec, build_mesh_1d
from .space import fe_space_1d
from .timestep import DGTimeConfig, SolverError, run_dg_time_1d

TABLE_DT = (0.5, 0.25, 0.125, 0.0625)


def _parse_n_sweep(text: str) -> list[int]:
    lo, hi = (int(s) for s in text.split(":"))
    out, n = [], lo
    while n <= hi:
        out.append(n)
        n *= 2
    return out


def _parse_eps_sweep(text: str) -> list[float]:
    a, b = (float(s) for s in text.split(":"))
    hi, lo = (a, b) if a >= b else (b, a)
    out = []
    e = hi
    while e >= lo * (1.0 - 1e-12):
        out.append(e)
        e /= 10.0
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ldgsp-study",
        description="LDG convergence studies on layer-adapted meshes",
    )
    p.add_argument("--dim", type=int, choices=(1, 2), default=2)
    p.add_argument("--mesh", choices=MESH_KINDS + ("all",), default="all")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-sweep", type=str, default=None, metavar="A:B")
    p.add_argument("--n-max", type=int, default=None, help="cap for table-preset N sweeps")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--eps-sweep", type=str, default=None, metavar="A:B")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--dt", type=str, default="auto")
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--sigma", type=str, default="auto")
    p.add_argument("--problem", choices=("paper2d", "paper1d", "poly"), default=None)
    p.add_argument("--time-scheme", choices=("theta", "dgr"), default="theta")
    p.add_argument("--r", type=int, default=0, help="temporal degree for --time-scheme dgr")
    p.add_argument("--table", type=int, choices=(2, 3, 4, 5, 6), default=None)
    p.add_argument("--out", type=str, default=None, metavar="PATH.csv")
    p.add_argument("--md", type=str, default=None, metavar="PATH.md")
    p.add_argument("--quiet", action="store_true")
    return p


def _meshes(args) -> list[str]:
    return list(MESH_KINDS) if args.mesh == "all" else [args.mesh]


def _sigma(args, k: int) -> float:
    return float(k + 2) if args.sigma == "auto" else float(args.sigma)


def _dt(args, k: int, N: int) -> float | None:
    if args.dt == "auto":
        return None  # single_run picks N^-1 (k<=1) or N^-1.5
    return float(args.dt)


def _run_problem(args, eps):
    from . import problems

    name = args.problem
    if name is None:
        name = "paper2d" if args.dim == 2 else "paper1d"
    if args.dim == 2:
        if name == "paper1d":
            raise SystemExit("--problem paper1d requires --dim 1")
        return problems.PROBLEMS_2D[name](eps)
    if name == "paper2d":
        raise SystemExit("--problem paper2d requires --dim 2")
    return problems.PROBLEMS_1D[name](eps)


def _table_records(args) -> tuple[list[StudyRecord], str, str]:
    eps = args.eps if args.eps is not None else 1e-8
    meshes = _meshes(args)
    records: list[StudyRecord] = []
    if args.table in (2, 3):
        ks = [args.k] if args.k is not None else [1, 2]
        n_max = args.n_max if args.n_max is not None else 128
        for k in ks:
            n_vals = [n for n in (4, 8, 16, 32, 64, 128) if n <= n_max]
            for mesh in meshes:
                for N in n_vals:
                    records.append(
                        single_run_2d(mesh, k, N, eps, theta=args.theta,
                                      dt=_dt(args, k, N), T=args.t_final,
                                      sigma=None if args.sigma == "auto" else float(args.sigma))
                    )
        attach_rates(records)
        value = "l2" if args.table == 2 else "energy"
        return records, value, "N"
    if args.table in (4, 5):
        k = args.k if args.k is not None else 3
        N = args.n if args.n is not None else 128
        for mesh in meshes:
            for dt in TABLE_DT:
                records.append(
                    single_run_2d(mesh, k, N, eps, theta=args.theta, dt=dt,
                                  T=args.t_final,
                                  sigma=None if args.sigma == "auto" else float(args.sigma))
                )
        attach_rates(records)
        value = "l2" if args.table == 4 else "energy"
        return records, value, "dt"
    # table 6
    k = args.k if args.k is not None else 1
    N = args.n if args.n is not None else 128
    eps_vals = _parse_eps_sweep(args.eps_sweep) if args.eps_sweep else [10.0**-e for e in range(4, 12)]
    for mesh in meshes:
        for e in eps_vals:
            records.append(
                single_run_2d(mesh, k, N, e, theta=args.theta, dt=_dt(args, k, N),
                              T=args.t_final,
                              sigma=None if args.sigma == "auto" else float(args.sigma))
            )
    return records, "l2", "eps"


def _free_records(args) -> tuple[list[StudyRecord], str, str]:
    eps_vals = (
        _parse_eps_sweep(args.eps_sweep)
        if args.eps_sweep
        else [args.eps if args.eps is not None else 1e-8]
    )
    n_vals = _parse_n_sweep(args.n_sweep) if args.n_sweep else [args.n if args.n else 32]
    k = args.k if args.k is not None else 1
    records: list[StudyRecord] = []
    for mesh in _meshes(args):
        for eps in eps_vals:
            problem = _run_problem(args, eps)
            for N in n_vals:
                sigma = _sigma(args, k)
                if args.dim == 2:
                    records.append(
                        single_run_2d(mesh, k, N, eps, theta=args.theta,
                                      dt=_dt(args, k, N), T=args.t_final,
                                      sigma=sigma, problem=problem)
                    )
                elif args.time_scheme == "dgr":
                    records.append(_dg_run(args, mesh, k, N, eps, sigma, problem))
                else:
                    records.append(
                        single_run_1d(mesh, k, N, eps, theta=args.theta,
                                      dt=_dt(args, k, N), T=args.t_final,
                                      sigma=sigma, problem=problem)
                    )
    attach_rates(records)
    sweep = "N" if len(n_vals) > 1 else ("eps" if len(eps_vals) > 1 else "N")
    return records, "l2", sweep


def _dg_run(args, mesh, k, N, eps, sigma, problem) -> StudyRecord:
    spec = MeshSpec(kind=mesh, N=N, eps=eps, sigma=sigma)
    space = fe_space_1d(build_mesh_1d(spec), k)
    system = assemble_B_1d(problem, space)
    dt = 1.0 / N if args.dt == "auto" else float(args.dt)
    M = max(1, round(args.t_final / dt))
    cfg = DGTimeConfig(r=args.r, dt=args.t_final / M, M=M)
    result = run_dg_time_1d(system, cfg)
    l2 = l2_error(result.U_final, problem.exact.u, t=args.t_final)
    return StudyRecord(mesh=mesh, k=k, N=N, eps=eps, theta=float("nan"),
                       dt=cfg.dt, l2_error=l2, energy_error=float("nan"))


def run_study(args) -> list[StudyRecord]:
    """Execute the requested sweep and write any requested output files."""
    if args.table is not None:
        records, value, sweep = _table_records(args)
    else:
        records, value, sweep = _free_records(args)
    csv_text = records_to_csv(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    if args.md:
        with open(args.md, "w") as fh:
            title = f"table {args.table}" if args.table else "study"
            fh.write(render_markdown(records, value=value, sweep=sweep, title=title))
    if not args.quiet:
        sys.stdout.write(csv_text)
    return records


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run_study(args)
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
