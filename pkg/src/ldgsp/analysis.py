"""Error norms, convergence rates, study records and table output."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Optional

import math
import numpy as np

from . import _kernels as K
from .ldg_1d import ProblemDef1D, energy_norm_1d, ExactSolution1D, assemble_B_1d
from .ldg_2d import ProblemDef2D, energy_norm_2d, ExactSolution2D, assemble_B_2d
from .mesh import MeshSpec, build_mesh_1d, tensor_mesh
from .space import FESpace1D, FESpace2D, ScalarField, fe_space_1d, fe_space_2d
from .timestep import ThetaConfig, make_theta_config, run_theta


# ------------------------------------------------------------------ errors


def l2_error(field: ScalarField, exact, t: float = 0.0) -> float:
    """||exact(., t) - field|| by element-wise quadrature."""
    space = field.space
    w = space.basis.quad.weights
    if isinstance(space, FESpace1D):
        diff = np.asarray(exact(space.xq, t), dtype=float) - field.values_at_quad()
        return float(np.sqrt(K.wsq_cells_1d(np.ascontiguousarray(diff), w, space.jac)))
    diff = space.eval_on_cells(exact, t=t) - field.values_at_quad()
    return float(np.sqrt(K.wsq_cells_2d(np.ascontiguousarray(diff), w, space.jac)))


def _combined_exact_2d(exact: ExactSolution2D, theta: float, t_new: float, t_old: float) -> ExactSolution2D:
    """Exact bundle for the theta-combination theta*w(t_new) + (1-theta)*w(t_old)."""

    def mix(fn):
        return lambda x, y, t: theta * fn(x, y, t_new) + (1.0 - theta) * fn(x, y, t_old)

    return ExactSolution2D(
        u=mix(exact.u), u_x=mix(exact.u_x), u_y=mix(exact.u_y),
        u_t=mix(exact.u_t), p=mix(exact.p), q=mix(exact.q),
    )


def _combined_exact_1d(exact: ExactSolution1D, theta: float, t_new: float, t_old: float) -> ExactSolution1D:
    def mix(fn):
        return lambda x, t: theta * fn(x, t_new) + (1.0 - theta) * fn(x, t_old)

    return ExactSolution1D(u=mix(exact.u), u_x=mix(exact.u_x), u_t=mix(exact.u_t), q=mix(exact.q))


class EnergyErrorAccumulator:
    """Observer for run_theta: accumulates dt * sum_m |||(w - W)^{m,theta}|||.

    In 2D the exact-solution samples of each time level are cached and
    reused for the next step's theta-combination, so every level is
    evaluated exactly once.
    """

    def __init__(self, problem, space, cfg: ThetaConfig):
        self.problem = problem
        self.space = space
        self.cfg = cfg
        self.total = 0.0
        self.per_step: list[float] = []
        if isinstance(space, FESpace1D):
            self._ws = None
        else:
            from .ldg_2d import EnergyNormWorkspace2D, ExactArrays2D

            self._ws = EnergyNormWorkspace2D(problem, space)
            self._arrays_cls = ExactArrays2D
            self._prev = ExactArrays2D.sample(space, problem.exact, 0.0)

    def __call__(self, m, t_m, V, U):
        theta, dt = self.cfg.theta, self.cfg.dt
        if self._ws is None:
            ex = _combined_exact_1d(self.problem.exact, theta, t_m, t_m - dt)
            e = energy_norm_1d(self.problem, self.space, V, exact=ex)
        else:
            cur = self._arrays_cls.sample(self.space, self.problem.exact, t_m)
            ex = cur.combine(self._prev, theta)
            self._prev = cur
            e = float(np.sqrt(self._ws.norm_sq(V, ex)))
        self.per_step.append(e)
        self.total += dt * e

    @property
    def value(self) -> float:
        return self.total


def energy_error_accumulated(result, problem, space, cfg: ThetaConfig) -> float:
    """Accumulated energy error from a stored trajectory (result.combined)."""
    if result.combined is None:
        raise ValueError("run_theta must be called with keep_combined=True")
    total = 0.0
    for m, V in enumerate(result.combined, start=1):
        t_m = m * cfg.dt
        if isinstance(space, FESpace1D):
            ex = _combined_exact_1d(problem.exact, cfg.theta, t_m, t_m - cfg.dt)
            total += cfg.dt * energy_norm_1d(problem, space, V, exact=ex)
        else:
            ex = _combined_exact_2d(problem.exact, cfg.theta, t_m, t_m - cfg.dt)
            total += cfg.dt * energy_norm_2d(problem, space, V, exact=ex)
    return total


# ------------------------------------------------------------------- rates


def rate_r2(e_N: float, e_2N: float) -> float:
    """log2 ratio of successive errors."""
    if e_N <= 0 or e_2N <= 0:
        raise ValueError("errors must be positive")
    return (math.log(e_N) - math.log(e_2N)) / math.log(2.0)


def rate_rS(e_N: float, e_2N: float, N: int) -> float:
    """Rate against the Shishkin scale: divisor log(2 ln N / ln 2N)."""
    if e_N <= 0 or e_2N <= 0:
        raise ValueError("errors must be positive")
    p_S = 2.0 * math.log(N) / math.log(2.0 * N)
    return (math.log(e_N) - math.log(e_2N)) / math.log(p_S)


# ----------------------------------------------------------------- studies


@dataclass
class StudyRecord:
    mesh: str
    k: int
    N: int
    eps: float
    theta: float
    dt: float
    l2_error: float
    energy_error: float
    l2_rate: Optional[float] = None
    energy_rate: Optional[float] = None


def single_run_2d(
    kind: str,
    k: int,
    N: int,
    eps: float,
    theta: float = 0.5,
    dt: float | None = None,
    T: float = 1.0,
    sigma: float | None = None,
    problem: ProblemDef2D | None = None,
    with_energy: bool = True,
) -> StudyRecord:
    """One full space-time solve; returns final L2 and accumulated energy errors."""
    from .problems import paper2d_problem

    if problem is None:
        problem = paper2d_problem(eps)
    if sigma is None:
        sigma = k + 2
    if dt is None:
        dt = 1.0 / N if k <= 1 else float(N) ** (-1.5)
    spec = MeshSpec(kind=kind, N=N, eps=eps, sigma=sigma)
    space = fe_space_2d(tensor_mesh(spec), k)
    system = assemble_B_2d(problem, space)
    cfg = make_theta_config(theta, T=T, dt=dt)
    acc = EnergyErrorAccumulator(problem, space, cfg) if with_energy else None
    result = run_theta(system, cfg, observer=acc)
    l2 = l2_error(result.U_final, problem.exact.u, t=T)
    en = acc.value if with_energy else float("nan")
    return StudyRecord(
        mesh=kind, k=k, N=N, eps=eps, theta=theta, dt=cfg.dt, l2_error=l2, energy_error=en
    )


def single_run_1d(
    kind: str,
    k: int,
    N: int,
    eps: float,
    theta: float = 0.5,
    dt: float | None = None,
    T: float = 1.0,
    sigma: float | None = None,
    problem: ProblemDef1D | None = None,
    with_energy: bool = True,
) -> StudyRecord:
    from .problems import paper1d_problem

    if problem is None:
        problem = paper1d_problem(eps)
    if sigma is None:
        sigma = k + 2
    if dt is None:
        dt = 1.0 / N if k <= 1 else float(N) ** (-1.5)
    spec = MeshSpec(kind=kind, N=N, eps=eps, sigma=sigma)
    space = fe_space_1d(build_mesh_1d(spec), k)
    system = assemble_B_1d(problem, space)
    cfg = make_theta_config(theta, T=T, dt=dt)
    acc = EnergyErrorAccumulator(problem, space, cfg) if with_energy else None
    result = run_theta(system, cfg, observer=acc)
    l2 = l2_error(result.U_final, problem.exact.u, t=T)
    en = acc.value if with_energy else float("nan")
    return StudyRecord(
        mesh=kind, k=k, N=N, eps=eps, theta=theta, dt=cfg.dt, l2_error=l2, energy_error=en
    )


def attach_rates(records: list[StudyRecord], scale: str = "auto") -> None:
    """Fill l2_rate/energy_rate within (mesh, k)-groups of an N- or dt-sweep.

    scale "auto" uses the Shishkin log scale for the energy rate on the
    s-mesh in N-sweeps and plain r2 everywhere else; dt-sweeps (constant
    N) always use r2 with the dt ratio.
    """
    groups: dict = {}
    for r in records:
        groups.setdefault((r.mesh, r.k, r.eps), []).append(r)
    for (mesh, _, _), grp in groups.items():
        for prev, cur in zip(grp, grp[1:]):
            if cur.N != prev.N:  # N-sweep
                cur.l2_rate = rate_r2(prev.l2_error, cur.l2_error)
                if math.isfinite(prev.energy_error) and math.isfinite(cur.energy_error):
                    if mesh == "s" and scale in ("auto", "rS"):
                        cur.energy_rate = rate_rS(prev.energy_error, cur.energy_error, prev.N)
                    else:
                        cur.energy_rate = rate_r2(prev.energy_error, cur.energy_error)
            elif cur.dt != prev.dt:  # dt-sweep
                ratio = prev.dt / cur.dt
                cur.l2_rate = (math.log(prev.l2_error) - math.log(cur.l2_error)) / math.log(ratio)
                if math.isfinite(prev.energy_error) and math.isfinite(cur.energy_error):
                    cur.energy_rate = (
                        math.log(prev.energy_error) - math.log(cur.energy_error)
                    ) / math.log(ratio)


# ------------------------------------------------------------------ output

CSV_HEADER = "mesh,k,N,eps,theta,dt,l2_error,l2_rate,energy_error,energy_rate"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return ""
    return f"{x:.5e}"


def records_to_csv(records: list[StudyRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in records:
        buf.write(
            f"{r.mesh},{r.k},{r.N},{_fmt(r.eps)},{_fmt(r.theta)},{_fmt(r.dt)},"
            f"{_fmt(r.l2_error)},{_fmt(r.l2_rate)},{_fmt(r.energy_error)},{_fmt(r.energy_rate)}\n"
        )
    return buf.getvalue()


def write_csv(records: list[StudyRecord], path) -> None:
    with open(path, "w") as fh:
        fh.write(records_to_csv(records))


_MESH_TITLE = {"s": "S-mesh", "bs": "BS-mesh", "btype": "B-type mesh"}


def render_markdown(
    records: list[StudyRecord],
    value: str = "l2",
    sweep: str = "N",
    title: str = "",
) -> str:
    """Markdown table with one row per sweep value, mesh kinds side by side."""
    err_attr = "l2_error" if value == "l2" else "energy_error"
    rate_attr = "l2_rate" if value == "l2" else "energy_rate"
    meshes = []
    for r in records:
        if r.mesh not in meshes:
            meshes.append(r.mesh)
    sweep_vals = []
    for r in records:
        key = getattr(r, sweep)
        if key not in sweep_vals:
            sweep_vals.append(key)
    by_key = {(r.mesh, getattr(r, sweep)): r for r in records}
    lines = []
    if title:
        lines.append(f"### {title}")
        lines.append("")
    head = [sweep] + sum(([f"{_MESH_TITLE.get(m, m)} error", "rate"] for m in meshes), [])
    lines.append("| " + " | ".join(head) + " |")
    lines.append("|" + "---|" * len(head))
    for sv in sweep_vals:
        row = [f"{sv:g}" if isinstance(sv, float) else str(sv)]
        for m in meshes:
            r = by_key.get((m, sv))
            if r is None:
                row += ["", ""]
            else:
                e = getattr(r, err_attr)
                rt = getattr(r, rate_attr)
                row.append(f"{e:.2e}" if e is not None and math.isfinite(e) else "")
                row.append(f"{rt:.2f}" if rt is not None else "-")
        lines.append("| " + " | ".join(row) + " |")
    lines.append("")
    return "\n".join(lines)
