"""Implicit theta-scheme (1D/2D) and DG-in-time (1D).

The theta step solves for the theta-combined triple V^m = theta*W^m +
(1-theta)*W^{m-1} directly:

    [mass/(theta*dt) + B] V^m = f^{m,theta} + mass*U^{m-1}/(theta*dt)

and recovers U^m = U^{m-1} + (V_u^m - U^{m-1})/theta.  Only the
u-history enters, so the auxiliary fields never need initial values, and
the step matrix is factorized once and reused for all steps.  V^m is
exactly the quantity the accumulated energy error is measured on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .linalg import AssembledSystem, SingularMatrixError, factorize
from .ldg_1d import FieldPair, rhs_vector_1d
from .ldg_2d import FieldTriple, rhs_vector_2d
from .projection import l2_project
from .quadrature import gauss_legendre, legendre_values
from .space import FESpace1D, ScalarField


class SolverError(RuntimeError):
    """Fatal solver failure, annotated with the run parameters."""


@dataclass(frozen=True)
class ThetaConfig:
    theta: float
    dt: float
    M: int
    T: float

    def __post_init__(self):
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [1/2, 1]")
        if self.M < 1 or self.dt <= 0 or self.T <= 0:
            raise ValueError("need M >= 1, dt > 0, T > 0")
        if abs(self.M * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError("M * dt must equal T")


def make_theta_config(theta: float, T: float = 1.0, dt: float | None = None, M: int | None = None) -> ThetaConfig:
    """Build a config from a target step size (rounded to divide T) or a step count."""
    if M is None:
        if dt is None:
            raise ValueError("give dt or M")
        M = max(1, round(T / dt))
    return ThetaConfig(theta=theta, dt=T / M, M=M, T=T)


@dataclass
class ThetaResult:
    U_final: ScalarField
    times: np.ndarray
    combined: Optional[list] = None   # per-step theta-combined triples/pairs


def _triple_from(system: AssembledSystem, vec: np.ndarray):
    if system.n_fields == 3:
        return FieldTriple.from_vector(system.space, vec)
    return FieldPair.from_vector(system.space, vec)


def run_theta(
    system: AssembledSystem,
    cfg: ThetaConfig,
    observer: Optional[Callable] = None,
    keep_combined: bool = False,
    refactor_each_step: bool = False,
    checkpoint_every: int = 0,
    checkpoint_dir=None,
) -> ThetaResult:
    """March the fully discrete scheme from t=0 to t=T.

    observer(m, t_m, V_m, U_m) is called after every step with the
    theta-combined triple V_m and the new u-field U_m.
    """
    problem, space = system.problem, system.space
    theta, dt, M = cfg.theta, cfg.dt, cfg.M
    D = system.dof_field
    rhs_of = rhs_vector_2d if system.n_fields == 3 else rhs_vector_1d

    U = l2_project(problem.u0, space).coeffs
    mass_u = system.mass_diag[:D]
    try:
        fact = system.step_factorization(theta, dt)
    except SingularMatrixError as exc:
        raise SolverError(f"step factorization failed ({_run_info(system, cfg)})") from exc

    F_prev = rhs_of(problem, space, 0.0)
    combined = [] if keep_combined else None
    times = dt * np.arange(1, M + 1)
    for m in range(1, M + 1):
        t_m = m * dt
        F_m = rhs_of(problem, space, t_m)
        rhs = theta * F_m + (1.0 - theta) * F_prev
        rhs[:D] += mass_u * U / (theta * dt)
        if refactor_each_step:
            fact = factorize(system.step_matrix(theta, dt))
        V = fact.solve(rhs)
        if not np.all(np.isfinite(V)):
            raise SolverError(f"non-finite solution at step {m} ({_run_info(system, cfg)})")
        U = U + (V[:D] - U) / theta
        if observer is not None or keep_combined:
            Vf = _triple_from(system, V)
            if keep_combined:
                combined.append(Vf)
            if observer is not None:
                observer(m, t_m, Vf, ScalarField(space, U.copy()))
        if checkpoint_every and m % checkpoint_every == 0 and checkpoint_dir is not None:
            ScalarField(space, U.copy()).dump(f"{checkpoint_dir}/u_step{m:06d}.txt")
        F_prev = F_m
    return ThetaResult(U_final=ScalarField(space, U), times=times, combined=combined)


def _run_info(system: AssembledSystem, cfg) -> str:
    sp_ = system.space
    n = getattr(sp_, "Nx", None) or sp_.n_cells
    return f"N={n}, k={sp_.k}, eps={system.problem.eps}, dt={cfg.dt}"


# ------------------------------------------------------------- DG in time


@dataclass(frozen=True)
class DGTimeConfig:
    r: int
    dt: float
    M: int

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("temporal degree r must be >= 0")
        if self.M < 1 or self.dt <= 0:
            raise ValueError("need M >= 1, dt > 0")

    @property
    def T(self) -> float:
        return self.M * self.dt


def _dgt_time_matrix(r: int) -> np.ndarray:
    """T[b,a] = int L_a' L_b ds + L_a(-1) L_b(-1) on the reference slab [-1,1]."""
    T = np.zeros((r + 1, r + 1))
    for b in range(r + 1):
        for a in range(r + 1):
            if a > b and (a + b) % 2 == 1:
                T[b, a] = 2.0
            T[b, a] += (-1.0) ** (a + b)
    return T


@dataclass
class DGTimeResult:
    U_final: ScalarField
    times: np.ndarray
    slab_modes: Optional[list] = None   # per-slab list of (r+1) FieldPairs


def run_dg_time_1d(
    system: AssembledSystem,
    cfg: DGTimeConfig,
    keep_modes: bool = False,
) -> DGTimeResult:
    """Space-time DG march for the 1D problem; one slab system per step.

    The slab matrix couples the r+1 temporal modes of (u, q); it is
    time-independent, so a single factorization is reused for all slabs.
    Time integrals of the data use an (r+1)-point Gauss-Legendre rule per
    slab (exact for integrands of temporal degree 2r+1).
    """
    if system.n_fields != 2:
        raise ValueError("DG-in-time is implemented for the 1D problem")
    problem, space = system.problem, system.space
    r, dt, M = cfg.r, cfg.dt, cfg.M
    D = system.dof_field
    nsys = 2 * D

    Tmat = sp.csr_matrix(_dgt_time_matrix(r))
    mt = sp.diags(0.5 * dt * 2.0 / (2 * np.arange(r + 1) + 1))
    A = (sp.kron(Tmat, sp.diags(system.mass_diag)) + sp.kron(mt, system.B)).tocsc()
    try:
        fact = factorize(A)
    except SingularMatrixError as exc:
        raise SolverError(f"slab factorization failed ({_run_info(system, cfg)})") from exc

    qt = gauss_legendre(r + 1)
    Lt = legendre_values(r, qt.nodes)          # (r+1, r+1) temporal basis at quad
    sign_left = np.where(np.arange(r + 1) % 2 == 0, 1.0, -1.0)

    U = l2_project(problem.u0, space).coeffs
    slab_modes = [] if keep_modes else None
    times = dt * np.arange(1, M + 1)
    for m in range(1, M + 1):
        t0 = (m - 1) * dt
        rhs = np.zeros((r + 1) * nsys)
        for g in range(qt.n):
            t_g = t0 + 0.5 * dt * (1.0 + qt.nodes[g])
            F = rhs_vector_1d(problem, space, t_g)
            for b in range(r + 1):
                rhs[b * nsys : (b + 1) * nsys] += 0.5 * dt * qt.weights[g] * Lt[b, g] * F
        lift = system.mass_diag.copy()
        lift[:D] *= U
        for b in range(r + 1):
            rhs[b * nsys : (b + 1) * nsys] += sign_left[b] * lift
        X = fact.solve(rhs)
        if not np.all(np.isfinite(X)):
            raise SolverError(f"non-finite slab solution at step {m} ({_run_info(system, cfg)})")
        modes = [X[a * nsys : (a + 1) * nsys] for a in range(r + 1)]
        U = sum(mv[:D] for mv in modes)       # L_a(+1) = 1 for all a
        if keep_modes:
            slab_modes.append([FieldPair.from_vector(space, mv) for mv in modes])
    return DGTimeResult(U_final=ScalarField(space, np.asarray(U)), times=times, slab_modes=slab_modes)
