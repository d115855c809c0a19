"""Broken tensor-product polynomial spaces and their deterministic DOF layout.

A discrete scalar field stores one modal Legendre coefficient block per
cell.  Layout (2D): cells are ordered lexicographically by (j, i), i.e.
e = j*Nx + i, and within a cell the local index is c = n*(k+1) + m where
m is the x-mode and n the y-mode.  Multi-field vectors (u, p, q) stack
whole fields back to back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .mesh import Mesh1D, TensorMesh2D
from .quadrature import ReferenceBasis, reference_basis


@dataclass(frozen=True)
class FESpace1D:
    """Discontinuous P^k space on a 1D mesh, with cached quadrature geometry."""

    mesh: Mesh1D
    k: int
    basis: ReferenceBasis
    h: np.ndarray          # (N,) cell widths
    xq: np.ndarray         # (N, nq) quadrature points per cell
    jac: np.ndarray        # (N,) h/2, the 1D jacobians

    @property
    def n_cells(self) -> int:
        return len(self.h)

    @property
    def n_loc(self) -> int:
        return self.k + 1

    @property
    def ndof(self) -> int:
        return self.n_cells * self.n_loc


def fe_space_1d(mesh: Mesh1D, k: int) -> FESpace1D:
    basis = reference_basis(k)
    h = mesh.widths
    mid = 0.5 * (mesh.points[1:] + mesh.points[:-1])
    xq = mid[:, None] + 0.5 * h[:, None] * basis.quad.nodes[None, :]
    return FESpace1D(mesh=mesh, k=k, basis=basis, h=h, xq=xq, jac=0.5 * h)


@dataclass(frozen=True)
class FESpace2D:
    """Discontinuous Q^k space on a tensor mesh, with cached geometry tables."""

    mesh: TensorMesh2D
    k: int
    basis: ReferenceBasis
    hx: np.ndarray         # (Nx,)
    hy: np.ndarray         # (Ny,)
    xq: np.ndarray         # (Nx, nq)
    yq: np.ndarray         # (Ny, nq)
    jac: np.ndarray        # (E,) hx*hy/4 in flat (j,i) cell order

    @property
    def Nx(self) -> int:
        return self.mesh.Nx

    @property
    def Ny(self) -> int:
        return self.mesh.Ny

    @property
    def n_cells(self) -> int:
        return self.Nx * self.Ny

    @property
    def n_loc(self) -> int:
        return (self.k + 1) ** 2

    @property
    def ndof(self) -> int:
        return self.n_cells * self.n_loc

    def cell_x_points(self) -> np.ndarray:
        """X-coordinates at cell quadrature points, shape (E, nq)."""
        return np.tile(self.xq, (self.Ny, 1))

    def cell_y_points(self) -> np.ndarray:
        """Y-coordinates at cell quadrature points, shape (E, nq)."""
        return np.repeat(self.yq, self.Nx, axis=0)

    def eval_on_cells(self, func, t: float | None = None) -> np.ndarray:
        """Evaluate func(x, y[, t]) at all cell quad points, shape (E, nq, nq)."""
        X = self.cell_x_points()[:, :, None]
        Y = self.cell_y_points()[:, None, :]
        vals = func(X, Y) if t is None else func(X, Y, t)
        return np.broadcast_to(np.asarray(vals, dtype=float), (self.n_cells,) + (self.basis.quad.n,) * 2).copy()


def fe_space_2d(mesh: TensorMesh2D, k: int) -> FESpace2D:
    basis = reference_basis(k)
    hx = mesh.mesh_x.widths
    hy = mesh.mesh_y.widths
    xm = 0.5 * (mesh.mesh_x.points[1:] + mesh.mesh_x.points[:-1])
    ym = 0.5 * (mesh.mesh_y.points[1:] + mesh.mesh_y.points[:-1])
    xq = xm[:, None] + 0.5 * hx[:, None] * basis.quad.nodes[None, :]
    yq = ym[:, None] + 0.5 * hy[:, None] * basis.quad.nodes[None, :]
    jac = 0.25 * np.outer(hy, hx).ravel()  # flat order e = j*Nx + i
    return FESpace2D(mesh=mesh, k=k, basis=basis, hx=hx, hy=hy, xq=xq, yq=yq, jac=jac)


@dataclass
class ScalarField:
    """Discrete field: coefficient vector over a 1D or 2D space."""

    space: FESpace1D | FESpace2D
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.ndof,):
            raise ValueError(
                f"coefficient vector has length {self.coeffs.shape}, expected {self.space.ndof}"
            )

    def copy(self) -> "ScalarField":
        return ScalarField(self.space, self.coeffs.copy())

    def elem_view(self) -> np.ndarray:
        """(E, k+1) in 1D or (E, k+1, k+1) in 2D, [n, m] ordering."""
        sp = self.space
        if isinstance(sp, FESpace1D):
            return self.coeffs.reshape(sp.n_cells, sp.n_loc)
        k1 = sp.k + 1
        return self.coeffs.reshape(sp.n_cells, k1, k1)

    def values_at_quad(self) -> np.ndarray:
        """Field values at all cell quadrature points."""
        sp = self.space
        C = np.ascontiguousarray(self.elem_view())
        if isinstance(sp, FESpace1D):
            return K.eval_cells_1d(C, sp.basis.val)
        return K.eval_cells_2d(C, sp.basis.val, sp.basis.val)

    def dump(self, path) -> None:
        """Write coefficients as lines "e c value", 17 significant digits."""
        n_loc = self.space.n_loc
        with open(path, "w") as fh:
            for idx, v in enumerate(self.coeffs):
                fh.write(f"{idx // n_loc} {idx % n_loc} {v:.16e}\n")


def zero_field(space) -> ScalarField:
    return ScalarField(space, np.zeros(space.ndof))


# ------------------------------------------------------------ trace helpers


def xtraces_2d(field: ScalarField, side: str) -> np.ndarray:
    """Traces on vertical cell edges, shape (E, nq) over y-quad points.

    side "right": value at the cell's own right edge (xi = +1);
    side "left": value at its left edge (xi = -1).
    """
    sp = field.space
    C = np.ascontiguousarray(field.elem_view())
    xv = sp.basis.val_right if side == "right" else sp.basis.val_left
    return K.xtrace_cells_2d(C, xv, sp.basis.val)


def ytraces_2d(field: ScalarField, side: str) -> np.ndarray:
    """Traces on horizontal cell edges, shape (E, nq) over x-quad points."""
    sp = field.space
    C = np.ascontiguousarray(field.elem_view())
    yv = sp.basis.val_right if side == "top" else sp.basis.val_left
    return K.ytrace_cells_2d(C, sp.basis.val, yv)


def traces_1d(field: ScalarField, side: str) -> np.ndarray:
    """Endpoint traces per cell, shape (E,)."""
    sp = field.space
    C = field.elem_view()
    xv = sp.basis.val_right if side == "right" else sp.basis.val_left
    return C @ xv


def eval_field_at_points(field: ScalarField, x, y=None) -> np.ndarray:
    """Evaluate a discrete field at arbitrary points (plotting helper).

    Points on cell boundaries resolve to the cell on the right/top
    (left/bottom for the last boundary).
    """
    from .quadrature import legendre_values

    sp = field.space
    if isinstance(sp, FESpace1D):
        pts = sp.mesh.points
        x = np.asarray(x, dtype=float)
        e = np.clip(np.searchsorted(pts, x, side="right") - 1, 0, sp.n_cells - 1)
        xi = 2.0 * (x - pts[e]) / sp.h[e] - 1.0
        L = legendre_values(sp.k, xi)
        C = field.elem_view()
        return np.einsum("em,me->e", C[e], L)
    px, py = sp.mesh.mesh_x.points, sp.mesh.mesh_y.points
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i = np.clip(np.searchsorted(px, x, side="right") - 1, 0, sp.Nx - 1)
    j = np.clip(np.searchsorted(py, y, side="right") - 1, 0, sp.Ny - 1)
    xi = 2.0 * (x - px[i]) / sp.hx[i] - 1.0
    eta = 2.0 * (y - py[j]) / sp.hy[j] - 1.0
    Lx = legendre_values(sp.k, xi)
    Ly = legendre_values(sp.k, eta)
    C = field.elem_view()[j * sp.Nx + i]
    return np.einsum("pnm,mp,np->p", C, Lx, Ly)
