"""1D LDG discretization for u_t - eps u_xx + a u_x + b u = f.

Mirror of the 2D operator restricted to one dimension, acting on the
pair (u, q) = (u, eps u_x).  Interface terms are point values, so the
energy norm jump sums need no edge quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .linalg import AssembledSystem, COOBuilder
from .space import FESpace1D, ScalarField, traces_1d, zero_field


class ConfigurationError1D(ValueError):
    """Problem coefficients violate the assumed lower bounds."""


@dataclass(frozen=True)
class ExactSolution1D:
    u: Callable
    u_x: Callable
    u_t: Callable
    q: Callable


@dataclass
class ProblemDef1D:
    eps: float
    a: Callable
    b: Callable
    f: Callable
    u0: Callable
    alpha: float
    beta: float
    a_x: Callable = None
    exact: Optional[ExactSolution1D] = None

    def __post_init__(self):
        if self.a_x is None:
            self.a_x = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    def validate(self, n_sample: int = 256) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ConfigurationError1D("alpha, beta must be positive")
        s = (np.arange(n_sample) + 0.5) / n_sample
        tol = 1e-12
        if np.min(self.a(s)) < self.alpha - tol:
            raise ConfigurationError1D("a drops below alpha on the sample grid")
        if np.min(self.b(s) - 0.5 * self.a_x(s)) < self.beta - tol:
            raise ConfigurationError1D("b - a_x/2 drops below beta on the sample grid")


@dataclass
class FieldPair:
    u: ScalarField
    q: ScalarField

    def __post_init__(self):
        if self.u.space is not self.q.space:
            raise ValueError("u and q must share one space")

    @property
    def space(self):
        return self.u.space

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u.coeffs, self.q.coeffs])

    @classmethod
    def from_vector(cls, space, vec: np.ndarray) -> "FieldPair":
        d = space.ndof
        return cls(u=ScalarField(space, vec[:d].copy()), q=ScalarField(space, vec[d:].copy()))

    @classmethod
    def zero(cls, space) -> "FieldPair":
        return cls(zero_field(space), zero_field(space))


def u_mass_diag_1d(space: FESpace1D) -> np.ndarray:
    loc = 2.0 / (2 * np.arange(space.k + 1) + 1)
    return (space.jac[:, None] * loc[None, :]).ravel()


def _point_block(builder, row_off, col_off, row_elems, col_elems, coef, Tt, Tr, n_loc):
    vals = coef[:, None, None] * (Tt[None, :, None] * Tr[None, None, :])
    rows = row_off + (row_elems[:, None, None] * n_loc + np.arange(n_loc)[None, :, None])
    cols = col_off + (col_elems[:, None, None] * n_loc + np.arange(n_loc)[None, None, :])
    builder.add_block(
        np.broadcast_to(rows, vals.shape), np.broadcast_to(cols, vals.shape), vals
    )


def assemble_B_1d(problem: ProblemDef1D, space: FESpace1D) -> AssembledSystem:
    """Assemble the stationary 1D LDG operator on (u, q)."""
    problem.validate()
    eps = problem.eps
    N = space.n_cells
    n_loc = space.n_loc
    D = space.ndof
    P, Dv = space.basis.val, space.basis.der
    w = space.basis.quad.weights
    off_u, off_q = 0, D
    builder = COOBuilder(2 * D, 2 * D)

    c0 = problem.b(space.xq) - problem.a_x(space.xq)      # (N, nq)
    a_c = problem.a(space.xq)

    jacw = space.jac[:, None] * w[None, :]
    # <c0 u, v>
    vals = np.einsum("eg,ag,bg->eab", jacw * c0, P, P, optimize=True)
    e = np.arange(N)
    rows = e[:, None, None] * n_loc + np.arange(n_loc)[None, :, None]
    cols = e[:, None, None] * n_loc + np.arange(n_loc)[None, None, :]
    builder.add_block(np.broadcast_to(off_u + rows, vals.shape), np.broadcast_to(off_u + cols, vals.shape), vals)
    # -<a u, v_x>  (test derivative picks up 2/h; jac*(2/h) = 1)
    vals = np.einsum("eg,ag,bg->eab", w[None, :] * a_c, Dv, P, optimize=True)
    builder.add_block(np.broadcast_to(off_u + rows, vals.shape), np.broadcast_to(off_u + cols, vals.shape), -vals)
    # +<q, v_x> and +<u, r_x> share the same local matrix
    gx = np.einsum("g,ag,bg->ab", w, Dv, P, optimize=True)
    gx_all = np.broadcast_to(gx[None, :, :], (N, n_loc, n_loc))
    builder.add_block(np.broadcast_to(off_u + rows, gx_all.shape), np.broadcast_to(off_q + cols, gx_all.shape), gx_all)
    builder.add_block(np.broadcast_to(off_q + rows, gx_all.shape), np.broadcast_to(off_u + cols, gx_all.shape), gx_all)
    # eps^{-1} <q, r>
    md = u_mass_diag_1d(space)
    idx = np.arange(D)
    builder.add_block(off_q + idx, off_q + idx, md / eps)

    # interface terms
    TR = np.ones(n_loc)
    TL = np.where(np.arange(n_loc) % 2 == 0, 1.0, -1.0)
    xp = space.mesh.points
    a_n = problem.a(xp)

    n_int = np.arange(1, N)
    le, re = n_int - 1, n_int
    _point_block(builder, off_u, off_u, le, le, a_n[n_int], TR, TR, n_loc)
    _point_block(builder, off_u, off_u, re, le, -a_n[n_int], TL, TR, n_loc)
    one = np.ones(N - 1)
    _point_block(builder, off_u, off_q, le, re, -one, TR, TL, n_loc)
    _point_block(builder, off_u, off_q, re, re, one, TL, TL, n_loc)
    _point_block(builder, off_q, off_u, le, le, -one, TR, TR, n_loc)
    _point_block(builder, off_q, off_u, re, le, one, TL, TR, n_loc)

    c0_arr = np.array([0])
    _point_block(builder, off_u, off_q, c0_arr, c0_arr, np.ones(1), TL, TL, n_loc)
    cN = np.array([N - 1])
    lam = eps / space.h[-1]
    _point_block(builder, off_u, off_u, cN, cN, np.array([a_n[-1] + lam]), TR, TR, n_loc)
    _point_block(builder, off_u, off_q, cN, cN, -np.ones(1), TR, TR, n_loc)

    B = builder.to_csr()
    B.eliminate_zeros()
    mass = np.zeros(2 * D)
    mass[:D] = md
    return AssembledSystem(B=B, mass_diag=mass, n_fields=2, dof_field=D, space=space, problem=problem)


def rhs_vector_1d(problem: ProblemDef1D, space: FESpace1D, t: float) -> np.ndarray:
    F = problem.f(space.xq, t)
    load = K.load_cells_1d(np.ascontiguousarray(F), space.basis.val, space.basis.quad.weights, space.jac)
    out = np.zeros(2 * space.ndof)
    out[: space.ndof] = load.reshape(-1)
    return out


def energy_norm_1d(
    problem: ProblemDef1D,
    space: FESpace1D,
    w: FieldPair,
    exact: Optional[ExactSolution1D] = None,
    t: float = 0.0,
) -> float:
    """Energy norm of a pair, or of the error against an exact bundle."""
    eps = problem.eps
    wq = space.basis.quad.weights
    u_vals = w.u.values_at_quad()
    q_vals = w.q.values_at_quad()
    if exact is not None:
        u_vals = exact.u(space.xq, t) - u_vals
        q_vals = exact.q(space.xq, t) - q_vals
    total = K.wsq_cells_1d(np.ascontiguousarray(q_vals), wq, space.jac) / eps
    react = problem.b(space.xq) - 0.5 * problem.a_x(space.xq)
    total += K.wsq_cells_1d(np.ascontiguousarray(np.sqrt(react) * u_vals), wq, space.jac)

    N = space.n_cells
    Rtr = traces_1d(w.u, "right")
    Ltr = traces_1d(w.u, "left")
    xp = space.mesh.points
    uex = exact.u(xp, t) if exact is not None else np.zeros(N + 1)
    uex = np.broadcast_to(np.asarray(uex, dtype=float), (N + 1,))
    err_plus = uex[:-1] - Ltr
    err_minus = uex[1:] - Rtr
    J = np.empty(N + 1)
    J[0] = err_plus[0]
    J[N] = -err_minus[N - 1]
    J[1:N] = err_plus[1:] - err_minus[: N - 1]
    a_n = problem.a(xp)
    total += float(np.sum(0.5 * a_n * J**2))
    total += float(eps / space.h[-1] * J[N] ** 2)
    return float(np.sqrt(total))
