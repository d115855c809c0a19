"""2D LDG discretization: operator assembly, fluxes, loads, energy norm.

The convection-diffusion operator u_t - eps*Lap(u) + a.grad(u) + b u is
rewritten as a first-order system in (u, p, q) = (u, eps u_x, eps u_y).
The stationary part acts on a stacked vector [u; p; q] and is assembled
element-by-element with upwind/downwind flux coupling:

  * p-hat, q-hat: downwind trace (from the right/top), except at the
    outflow boundary where p-hat = p^- - (eps/h) u^-;
  * u-hat (diffusive): upwind trace, zero at both boundaries per
    direction;
  * u-tilde (convective): upwind trace, zero at the inflow boundary.

The induced energy norm is evaluated independently of the assembled
matrix (same quadrature, separate code path) so the quadratic-form
identity z^T B z = |||z|||^2 can be used as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as K
from .linalg import AssembledSystem, COOBuilder
from .space import FESpace2D, ScalarField, xtraces_2d, ytraces_2d, zero_field


class ConfigurationError(ValueError):
    """Problem coefficients violate the assumed lower bounds."""


@dataclass(frozen=True)
class ExactSolution2D:
    """Exact solution bundle; p and q are the scaled derivatives eps*u_x, eps*u_y."""

    u: Callable
    u_x: Callable
    u_y: Callable
    u_t: Callable
    p: Callable
    q: Callable


@dataclass
class ProblemDef2D:
    """Coefficients, data and reported lower bounds of the 2D problem."""

    eps: float
    a1: Callable
    a2: Callable
    b: Callable
    f: Callable
    u0: Callable
    alpha1: float
    alpha2: float
    beta: float
    a1_x: Callable = None
    a2_y: Callable = None
    exact: Optional[ExactSolution2D] = None

    def __post_init__(self):
        zero = lambda x, y: np.zeros_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))
        if self.a1_x is None:
            self.a1_x = zero
        if self.a2_y is None:
            self.a2_y = zero

    def validate(self, n_sample: int = 64) -> None:
        """Sample the coefficient bounds a1>=alpha1, a2>=alpha2, b-div(a)/2>=beta."""
        if not (self.alpha1 > 0 and self.alpha2 > 0 and self.beta > 0):
            raise ConfigurationError("alpha1, alpha2, beta must be positive")
        s = (np.arange(n_sample) + 0.5) / n_sample
        X, Y = np.meshgrid(s, s, indexing="ij")
        tol = 1e-12
        if np.min(self.a1(X, Y)) < self.alpha1 - tol:
            raise ConfigurationError("a1 drops below alpha1 on the sample grid")
        if np.min(self.a2(X, Y)) < self.alpha2 - tol:
            raise ConfigurationError("a2 drops below alpha2 on the sample grid")
        react = self.b(X, Y) - 0.5 * (self.a1_x(X, Y) + self.a2_y(X, Y))
        if np.min(react) < self.beta - tol:
            raise ConfigurationError("b - div(a)/2 drops below beta on the sample grid")


@dataclass
class FieldTriple:
    u: ScalarField
    p: ScalarField
    q: ScalarField

    def __post_init__(self):
        if not (self.u.space is self.p.space is self.q.space):
            raise ValueError("u, p, q must share one space")

    @property
    def space(self):
        return self.u.space

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u.coeffs, self.p.coeffs, self.q.coeffs])

    @classmethod
    def from_vector(cls, space, vec: np.ndarray) -> "FieldTriple":
        d = space.ndof
        return cls(
            u=ScalarField(space, vec[:d].copy()),
            p=ScalarField(space, vec[d : 2 * d].copy()),
            q=ScalarField(space, vec[2 * d :].copy()),
        )

    @classmethod
    def zero(cls, space) -> "FieldTriple":
        return cls(zero_field(space), zero_field(space), zero_field(space))


# -------------------------------------------------------------- local tables


def _local_tables(space: FESpace2D):
    """Per-local-dof tensor tables PHI, DX, DY and the edge trace tables."""
    k1 = space.k + 1
    P, D = space.basis.val, space.basis.der
    m = np.tile(np.arange(k1), k1)        # local a -> x-mode
    n = np.repeat(np.arange(k1), k1)      # local a -> y-mode
    PHI = P[m][:, :, None] * P[n][:, None, :]
    DX = D[m][:, :, None] * P[n][:, None, :]
    DY = P[m][:, :, None] * D[n][:, None, :]
    sgn_m = np.where(m % 2 == 0, 1.0, -1.0)
    sgn_n = np.where(n % 2 == 0, 1.0, -1.0)
    TR = P[n]                       # trace at xi=+1, over y-quad
    TL = sgn_m[:, None] * P[n]      # trace at xi=-1
    TT = P[m]                       # trace at eta=+1, over x-quad
    TB = sgn_n[:, None] * P[m]      # trace at eta=-1
    return PHI, DX, DY, TR, TL, TT, TB, m, n


def u_mass_diag(space: FESpace2D) -> np.ndarray:
    """Diagonal of the u-block mass matrix in the modal basis."""
    k1 = space.k + 1
    m = np.tile(np.arange(k1), k1)
    n = np.repeat(np.arange(k1), k1)
    loc = (2.0 / (2 * m + 1)) * (2.0 / (2 * n + 1))
    return (space.jac[:, None] * loc[None, :]).ravel()


def _volume_block(builder, row_off, col_off, W, Test, Trial, n_loc):
    vals = np.einsum("egh,agh,bgh->eab", W, Test, Trial, optimize=True)
    E = W.shape[0]
    e = np.arange(E)
    rows = row_off + (e[:, None, None] * n_loc + np.arange(n_loc)[None, :, None])
    cols = col_off + (e[:, None, None] * n_loc + np.arange(n_loc)[None, None, :])
    rows = np.broadcast_to(rows, vals.shape)
    cols = np.broadcast_to(cols, vals.shape)
    builder.add_block(rows, cols, vals)


def _edge_block(builder, row_off, col_off, row_elems, col_elems, W, Ttest, Ttrial, n_loc):
    vals = np.einsum("lh,ah,bh->lab", W, Ttest, Ttrial, optimize=True)
    rows = row_off + (row_elems[:, None, None] * n_loc + np.arange(n_loc)[None, :, None])
    cols = col_off + (col_elems[:, None, None] * n_loc + np.arange(n_loc)[None, None, :])
    rows = np.broadcast_to(rows, vals.shape)
    cols = np.broadcast_to(cols, vals.shape)
    builder.add_block(rows, cols, vals)


def assemble_B_2d(problem: ProblemDef2D, space: FESpace2D) -> AssembledSystem:
    """Assemble the stationary LDG operator on (u, p, q) plus the u-mass diagonal."""
    problem.validate()
    eps = problem.eps
    Nx, Ny = space.Nx, space.Ny
    n_loc = space.n_loc
    D = space.ndof
    w = space.basis.quad.weights
    nq = space.basis.quad.n
    PHI, DX, DY, TR, TL, TT, TB, m_of, n_of = _local_tables(space)
    off_u, off_p, off_q = 0, D, 2 * D

    builder = COOBuilder(3 * D, 3 * D)
    w2 = np.outer(w, w)

    # coefficient values at cell quadrature points
    c0 = space.eval_on_cells(lambda x, y: problem.b(x, y) - problem.a1_x(x, y) - problem.a2_y(x, y))
    a1c = space.eval_on_cells(problem.a1)
    a2c = space.eval_on_cells(problem.a2)

    jac = space.jac[:, None, None] * w2[None, :, :]
    hx_cell = np.tile(space.hx, Ny)
    hy_cell = np.repeat(space.hy, Nx)
    wx = (0.5 * hy_cell)[:, None, None] * w2[None, :, :]   # jac * (2/hx)
    wy = (0.5 * hx_cell)[:, None, None] * w2[None, :, :]   # jac * (2/hy)

    # volume terms
    _volume_block(builder, off_u, off_u, jac * c0, PHI, PHI, n_loc)
    _volume_block(builder, off_u, off_u, -wx * a1c, DX, PHI, n_loc)
    _volume_block(builder, off_u, off_u, -wy * a2c, DY, PHI, n_loc)
    gx = np.einsum("egh,agh,bgh->eab", wx, DX, PHI, optimize=True)
    gy = np.einsum("egh,agh,bgh->eab", wy, DY, PHI, optimize=True)
    e_all = np.arange(space.n_cells)
    rows_a = e_all[:, None, None] * n_loc + np.arange(n_loc)[None, :, None]
    cols_b = e_all[:, None, None] * n_loc + np.arange(n_loc)[None, None, :]
    for r_off, c_off, vals in ((off_u, off_p, gx), (off_p, off_u, gx), (off_u, off_q, gy), (off_q, off_u, gy)):
        builder.add_block(
            np.broadcast_to(r_off + rows_a, vals.shape),
            np.broadcast_to(c_off + cols_b, vals.shape),
            vals,
        )

    # auxiliary-field mass terms eps^{-1}<p,s>, eps^{-1}<q,r>
    md = u_mass_diag(space)
    idx = np.arange(D)
    builder.add_block(off_p + idx, off_p + idx, md / eps)
    builder.add_block(off_q + idx, off_q + idx, md / eps)

    # ---------------- vertical edges (x-direction fluxes) ----------------
    xe = space.mesh.mesh_x.points
    yq = space.yq
    II, JJ = np.meshgrid(np.arange(1, Nx), np.arange(Ny), indexing="ij")
    II, JJ = II.ravel(), JJ.ravel()
    le = JJ * Nx + (II - 1)
    re = JJ * Nx + II
    a1_e = problem.a1(xe[II][:, None], yq[JJ])                  # (L, nq)
    wline = (0.5 * space.hy[JJ])[:, None] * w[None, :]
    _edge_block(builder, off_u, off_u, le, le, wline * a1_e, TR, TR, n_loc)
    _edge_block(builder, off_u, off_u, re, le, -wline * a1_e, TL, TR, n_loc)
    _edge_block(builder, off_u, off_p, le, re, -wline, TR, TL, n_loc)
    _edge_block(builder, off_u, off_p, re, re, wline, TL, TL, n_loc)
    _edge_block(builder, off_p, off_u, le, le, -wline, TR, TR, n_loc)
    _edge_block(builder, off_p, off_u, re, le, wline, TL, TR, n_loc)

    jj = np.arange(Ny)
    wl0 = (0.5 * space.hy)[:, None] * w[None, :]
    cells0 = jj * Nx  # i = 0 column
    _edge_block(builder, off_u, off_p, cells0, cells0, wl0, TL, TL, n_loc)

    cellsN = jj * Nx + (Nx - 1)
    a1_N = problem.a1(xe[-1], yq)                                # (Ny, nq)
    lam_x = eps / space.hx[-1]
    _edge_block(builder, off_u, off_u, cellsN, cellsN, wl0 * (a1_N + lam_x), TR, TR, n_loc)
    _edge_block(builder, off_u, off_p, cellsN, cellsN, -wl0, TR, TR, n_loc)

    # ---------------- horizontal edges (y-direction fluxes) ----------------
    ye = space.mesh.mesh_y.points
    xq = space.xq
    JJ2, II2 = np.meshgrid(np.arange(1, Ny), np.arange(Nx), indexing="ij")
    JJ2, II2 = JJ2.ravel(), II2.ravel()
    be = (JJ2 - 1) * Nx + II2
    te = JJ2 * Nx + II2
    a2_e = problem.a2(xq[II2], ye[JJ2][:, None])
    wline2 = (0.5 * space.hx[II2])[:, None] * w[None, :]
    _edge_block(builder, off_u, off_u, be, be, wline2 * a2_e, TT, TT, n_loc)
    _edge_block(builder, off_u, off_u, te, be, -wline2 * a2_e, TB, TT, n_loc)
    _edge_block(builder, off_u, off_q, be, te, -wline2, TT, TB, n_loc)
    _edge_block(builder, off_u, off_q, te, te, wline2, TB, TB, n_loc)
    _edge_block(builder, off_q, off_u, be, be, -wline2, TT, TT, n_loc)
    _edge_block(builder, off_q, off_u, te, be, wline2, TB, TT, n_loc)

    ii = np.arange(Nx)
    wb0 = (0.5 * space.hx)[:, None] * w[None, :]
    cellsB = ii  # j = 0 row
    _edge_block(builder, off_u, off_q, cellsB, cellsB, wb0, TB, TB, n_loc)

    cellsT = (Ny - 1) * Nx + ii
    a2_N = problem.a2(xq, ye[-1])
    lam_y = eps / space.hy[-1]
    _edge_block(builder, off_u, off_u, cellsT, cellsT, wb0 * (a2_N + lam_y), TT, TT, n_loc)
    _edge_block(builder, off_u, off_q, cellsT, cellsT, -wb0, TT, TT, n_loc)

    B = builder.to_csr()
    B.eliminate_zeros()
    mass = np.zeros(3 * D)
    mass[:D] = md
    return AssembledSystem(B=B, mass_diag=mass, n_fields=3, dof_field=D, space=space, problem=problem)


def rhs_vector_2d(problem: ProblemDef2D, space: FESpace2D, t: float) -> np.ndarray:
    """Load vector <f(., t), v> on the u-test block; p/q blocks zero."""
    F = space.eval_on_cells(problem.f, t=t)
    load = K.load_cells_2d(F, space.basis.val, space.basis.val, space.basis.quad.weights, space.jac)
    out = np.zeros(3 * space.ndof)
    out[: space.ndof] = load.reshape(-1)
    return out


# ------------------------------------------------------------- energy norm


@dataclass
class ExactArrays2D:
    """Exact-solution samples at one time level: cell values and edge traces."""

    u_cells: np.ndarray      # (E, nq, nq)
    p_cells: np.ndarray
    q_cells: np.ndarray
    u_vedges: np.ndarray     # (Nx+1, Ny, nq)
    u_hedges: np.ndarray     # (Ny+1, Nx, nq)

    @classmethod
    def sample(cls, space: FESpace2D, exact: ExactSolution2D, t: float) -> "ExactArrays2D":
        Nx, Ny, nq = space.Nx, space.Ny, space.basis.quad.n
        xe = space.mesh.mesh_x.points
        ye = space.mesh.mesh_y.points
        uv = np.broadcast_to(
            np.asarray(exact.u(xe[:, None, None], space.yq[None, :, :], t), dtype=float),
            (Nx + 1, Ny, nq),
        )
        uh = np.broadcast_to(
            np.asarray(exact.u(space.xq[None, :, :], ye[:, None, None], t), dtype=float),
            (Ny + 1, Nx, nq),
        )
        return cls(
            u_cells=space.eval_on_cells(exact.u, t=t),
            p_cells=space.eval_on_cells(exact.p, t=t),
            q_cells=space.eval_on_cells(exact.q, t=t),
            u_vedges=np.array(uv),
            u_hedges=np.array(uh),
        )

    @classmethod
    def zero(cls, space: FESpace2D) -> "ExactArrays2D":
        Nx, Ny, nq = space.Nx, space.Ny, space.basis.quad.n
        z = np.zeros((space.n_cells, nq, nq))
        return cls(
            u_cells=z,
            p_cells=z,
            q_cells=z,
            u_vedges=np.zeros((Nx + 1, Ny, nq)),
            u_hedges=np.zeros((Ny + 1, Nx, nq)),
        )

    def combine(self, other: "ExactArrays2D", theta: float) -> "ExactArrays2D":
        """theta*self + (1-theta)*other, the theta-combined exact level."""
        c = 1.0 - theta
        return ExactArrays2D(
            u_cells=theta * self.u_cells + c * other.u_cells,
            p_cells=theta * self.p_cells + c * other.p_cells,
            q_cells=theta * self.q_cells + c * other.q_cells,
            u_vedges=theta * self.u_vedges + c * other.u_vedges,
            u_hedges=theta * self.u_hedges + c * other.u_hedges,
        )


class EnergyNormWorkspace2D:
    """Precomputed coefficient tables for repeated energy-norm evaluations."""

    def __init__(self, problem: ProblemDef2D, space: FESpace2D):
        self.problem = problem
        self.space = space
        self.eps = problem.eps
        Nx, Ny, nq = space.Nx, space.Ny, space.basis.quad.n
        self.sqrt_react = np.sqrt(
            space.eval_on_cells(
                lambda x, y: problem.b(x, y) - 0.5 * problem.a1_x(x, y) - 0.5 * problem.a2_y(x, y)
            )
        )
        xe = space.mesh.mesh_x.points
        ye = space.mesh.mesh_y.points
        a1_e = np.broadcast_to(
            np.asarray(problem.a1(xe[:, None, None], space.yq[None, :, :]), dtype=float),
            (Nx + 1, Ny, nq),
        )
        a2_e = np.broadcast_to(
            np.asarray(problem.a2(space.xq[None, :, :], ye[:, None, None]), dtype=float),
            (Ny + 1, Nx, nq),
        )
        self.sqrt_half_a1 = np.sqrt(0.5 * a1_e)
        self.sqrt_half_a2 = np.sqrt(0.5 * a2_e)
        self.jac_vline = np.broadcast_to(0.5 * space.hy[None, :], (Nx + 1, Ny)).ravel()
        self.jac_hline = np.broadcast_to(0.5 * space.hx[None, :], (Ny + 1, Nx)).ravel()
        self.sqrt_lam_x = np.sqrt(self.eps / space.hx[-1])
        self.sqrt_lam_y = np.sqrt(self.eps / space.hy[-1])

    def norm_sq(self, w: FieldTriple, ex: ExactArrays2D) -> float:
        space = self.space
        Nx, Ny, nq = space.Nx, space.Ny, space.basis.quad.n
        wq = space.basis.quad.weights
        u_err = ex.u_cells - w.u.values_at_quad()
        p_err = ex.p_cells - w.p.values_at_quad()
        q_err = ex.q_cells - w.q.values_at_quad()
        total = (
            K.wsq_cells_2d(np.ascontiguousarray(p_err), wq, space.jac)
            + K.wsq_cells_2d(np.ascontiguousarray(q_err), wq, space.jac)
        ) / self.eps
        total += K.wsq_cells_2d(np.ascontiguousarray(self.sqrt_react * u_err), wq, space.jac)

        Rtr = np.moveaxis(xtraces_2d(w.u, "right").reshape(Ny, Nx, nq), 1, 0)
        Ltr = np.moveaxis(xtraces_2d(w.u, "left").reshape(Ny, Nx, nq), 1, 0)
        err_plus = ex.u_vedges[:-1] - Ltr
        err_minus = ex.u_vedges[1:] - Rtr
        J = np.empty((Nx + 1, Ny, nq))
        J[0] = err_plus[0]
        J[Nx] = -err_minus[Nx - 1]
        J[1:Nx] = err_plus[1:] - err_minus[: Nx - 1]
        V = (self.sqrt_half_a1 * J).reshape(-1, nq)
        total += K.wsq_lines(np.ascontiguousarray(V), wq, self.jac_vline)
        Vout = (self.sqrt_lam_x * J[Nx]).reshape(-1, nq)
        total += K.wsq_lines(np.ascontiguousarray(Vout), wq, 0.5 * space.hy)

        Ttr = ytraces_2d(w.u, "top").reshape(Ny, Nx, nq)
        Btr = ytraces_2d(w.u, "bottom").reshape(Ny, Nx, nq)
        err_plus = ex.u_hedges[:-1] - Btr
        err_minus = ex.u_hedges[1:] - Ttr
        J = np.empty((Ny + 1, Nx, nq))
        J[0] = err_plus[0]
        J[Ny] = -err_minus[Ny - 1]
        J[1:Ny] = err_plus[1:] - err_minus[: Ny - 1]
        V = (self.sqrt_half_a2 * J).reshape(-1, nq)
        total += K.wsq_lines(np.ascontiguousarray(V), wq, self.jac_hline)
        Vout = (self.sqrt_lam_y * J[Ny]).reshape(-1, nq)
        total += K.wsq_lines(np.ascontiguousarray(Vout), wq, 0.5 * space.hx)
        return float(total)


def energy_norm_2d(
    problem: ProblemDef2D,
    space: FESpace2D,
    w: FieldTriple,
    exact: Optional[ExactSolution2D] = None,
    t: float = 0.0,
) -> float:
    """Energy norm of a discrete triple, or of the error against an exact bundle.

    |||w|||^2 = eps^{-1}||p||^2 + eps^{-1}||q||^2 + ||(b - a1_x/2 - a2_y/2)^{1/2} u||^2
                + sum of a/2-weighted squared u-jumps over all edges
                + (eps/h)-weighted squared outflow traces.

    With an exact bundle the same expression is evaluated for the error
    triple; the exact solution is continuous, so only its single-valued
    traces enter the jump terms.
    """
    ws = EnergyNormWorkspace2D(problem, space)
    ex = ExactArrays2D.sample(space, exact, t) if exact is not None else ExactArrays2D.zero(space)
    return float(np.sqrt(ws.norm_sq(w, ex)))
