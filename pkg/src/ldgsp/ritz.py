"""Ritz projection: the B-orthogonal projection of an exact triple.

F(w) solves B(F(w); z) = B(w; z) for all discrete test triples z, with
the right side evaluated by quadrature from point values of the exact
solution.  The exact solution is continuous with zero boundary values,
so its traces are single-valued and the flux definitions collapse to
plain point evaluation.
"""

from __future__ import annotations

import numpy as np

from .ldg_2d import FieldTriple, ProblemDef2D, _local_tables
from .linalg import AssembledSystem
from .space import FESpace2D


def bilinear_rhs_exact(
    problem: ProblemDef2D,
    space: FESpace2D,
    u_ex,
    p_ex,
    q_ex,
    t: float = 0.0,
) -> np.ndarray:
    """Vector of B(w; z) over all test basis functions z, for exact w = (u, p, q)."""
    eps = problem.eps
    Nx, Ny = space.Nx, space.Ny
    n_loc = space.n_loc
    D = space.ndof
    w = space.basis.quad.weights
    nq = space.basis.quad.n
    PHI, DX, DY, TR, TL, TT, TB, _, _ = _local_tables(space)
    w2 = np.outer(w, w)

    uc = space.eval_on_cells(lambda x, y: u_ex(x, y, t))
    pc = space.eval_on_cells(lambda x, y: p_ex(x, y, t))
    qc = space.eval_on_cells(lambda x, y: q_ex(x, y, t))
    a1c = space.eval_on_cells(problem.a1)
    a2c = space.eval_on_cells(problem.a2)
    c0 = space.eval_on_cells(lambda x, y: problem.b(x, y) - problem.a1_x(x, y) - problem.a2_y(x, y))

    jac = space.jac[:, None, None] * w2[None, :, :]
    hx_cell = np.tile(space.hx, Ny)
    hy_cell = np.repeat(space.hy, Nx)
    wx = (0.5 * hy_cell)[:, None, None] * w2[None, :, :]
    wy = (0.5 * hx_cell)[:, None, None] * w2[None, :, :]

    # volume parts of the v-rows, s-rows, r-rows
    Lv = np.einsum("egh,agh->ea", jac * c0 * uc, PHI, optimize=True)
    Lv += np.einsum("egh,agh->ea", wx * (pc - a1c * uc), DX, optimize=True)
    Lv += np.einsum("egh,agh->ea", wy * (qc - a2c * uc), DY, optimize=True)
    Ls = np.einsum("egh,agh->ea", jac * pc / eps, PHI, optimize=True)
    Ls += np.einsum("egh,agh->ea", wx * uc, DX, optimize=True)
    Lr = np.einsum("egh,agh->ea", jac * qc / eps, PHI, optimize=True)
    Lr += np.einsum("egh,agh->ea", wy * uc, DY, optimize=True)

    # vertical edge values (x-nodes nu = 0..Nx), per cell row j, y-quad h
    xe = space.mesh.mesh_x.points
    yq = space.yq
    shp = (Nx + 1, Ny, nq)
    uev = np.broadcast_to(np.asarray(u_ex(xe[:, None, None], yq[None, :, :], t), dtype=float), shp)
    pev = np.broadcast_to(np.asarray(p_ex(xe[:, None, None], yq[None, :, :], t), dtype=float), shp)
    a1v = np.broadcast_to(np.asarray(problem.a1(xe[:, None, None], yq[None, :, :]), dtype=float), shp)
    lam_x = eps / space.hx[-1]
    phat = pev.copy()
    phat[Nx] = pev[Nx] - lam_x * uev[Nx]
    utilde = uev.copy()
    utilde[0] = 0.0
    uhat = uev.copy()
    uhat[0] = 0.0
    uhat[Nx] = 0.0

    wliney = (0.5 * space.hy)[None, :, None] * w[None, None, :]      # (1, Ny, nq)
    coefR = (a1v[1:] * utilde[1:] - phat[1:]) * wliney                # cell (i,j): right node i+1
    coefL = (a1v[:-1] * utilde[:-1] - phat[:-1]) * wliney             # left node i
    add_vR = np.einsum("ijh,ah->ija", coefR, TR, optimize=True)
    add_vL = np.einsum("ijh,ah->ija", coefL, TL, optimize=True)
    # s-row edges: -<u_hat, s->  at right node, +<u_hat, s+> at left node
    add_sR = np.einsum("ijh,ah->ija", uhat[1:] * wliney, TR, optimize=True)
    add_sL = np.einsum("ijh,ah->ija", uhat[:-1] * wliney, TL, optimize=True)

    # map (i, j) -> flat cell e = j*Nx + i
    for i in range(Nx):
        cells = np.arange(Ny) * Nx + i
        Lv[cells] += add_vR[i] - add_vL[i]
        Ls[cells] += -add_sR[i] + add_sL[i]

    # horizontal edge values (y-nodes nu = 0..Ny), per cell column i, x-quad g
    ye = space.mesh.mesh_y.points
    xq = space.xq
    shp = (Ny + 1, Nx, nq)
    ueh = np.broadcast_to(np.asarray(u_ex(xq[None, :, :], ye[:, None, None], t), dtype=float), shp)
    qeh = np.broadcast_to(np.asarray(q_ex(xq[None, :, :], ye[:, None, None], t), dtype=float), shp)
    a2v = np.broadcast_to(np.asarray(problem.a2(xq[None, :, :], ye[:, None, None]), dtype=float), shp)
    lam_y = eps / space.hy[-1]
    qhat = qeh.copy()
    qhat[Ny] = qeh[Ny] - lam_y * ueh[Ny]
    utildeh = ueh.copy()
    utildeh[0] = 0.0
    uhath = ueh.copy()
    uhath[0] = 0.0
    uhath[Ny] = 0.0

    wlinex = (0.5 * space.hx)[None, :, None] * w[None, None, :]
    coefT = (a2v[1:] * utildeh[1:] - qhat[1:]) * wlinex
    coefB = (a2v[:-1] * utildeh[:-1] - qhat[:-1]) * wlinex
    add_vT = np.einsum("jig,ag->jia", coefT, TT, optimize=True)
    add_vB = np.einsum("jig,ag->jia", coefB, TB, optimize=True)
    add_rT = np.einsum("jig,ag->jia", uhath[1:] * wlinex, TT, optimize=True)
    add_rB = np.einsum("jig,ag->jia", uhath[:-1] * wlinex, TB, optimize=True)

    for j in range(Ny):
        cells = j * Nx + np.arange(Nx)
        Lv[cells] += add_vT[j] - add_vB[j]
        Lr[cells] += -add_rT[j] + add_rB[j]

    out = np.empty(3 * D)
    out[:D] = Lv.reshape(-1)
    out[D : 2 * D] = Ls.reshape(-1)
    out[2 * D :] = Lr.reshape(-1)
    return out


def ritz_project(
    system: AssembledSystem,
    u_ex,
    p_ex,
    q_ex,
    t: float = 0.0,
) -> FieldTriple:
    """Solve B(F(w); z) = B(w; z) for the discrete Ritz projection F(w)."""
    rhs = bilinear_rhs_exact(system.problem, system.space, u_ex, p_ex, q_ex, t)
    vec = system.stationary_factorization().solve(rhs)
    return FieldTriple.from_vector(system.space, vec)


def galerkin_residual(
    system: AssembledSystem,
    proj: FieldTriple,
    u_ex,
    p_ex,
    q_ex,
    t: float = 0.0,
) -> np.ndarray:
    """Residual vector r with B(w - F(w); z) = z . r for every discrete z."""
    rhs = bilinear_rhs_exact(system.problem, system.space, u_ex, p_ex, q_ex, t)
    return rhs - system.B @ proj.to_vector()
