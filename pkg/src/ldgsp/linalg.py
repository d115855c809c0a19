"""Sparse storage, assembly merge, and reusable LU factorization.

Thin layer over scipy.sparse: COO triplets accumulated during assembly
are merged into CSR, and systems are solved by a sparse direct LU
(SuperLU) whose factor object is reused across time steps.  A single
pass of iterative refinement is applied when the residual is above
1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SingularMatrixError(RuntimeError):
    """Factorization failed; carries the first structurally empty row if any."""


@dataclass
class COOBuilder:
    """Accumulates (row, col, value) triplets; duplicate entries are summed."""

    nrows: int
    ncols: int
    rows: list = field(default_factory=list)
    cols: list = field(default_factory=list)
    vals: list = field(default_factory=list)

    def add_block(self, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> None:
        """Add entries; rows/cols/values are flat arrays of equal length."""
        self.rows.append(np.asarray(rows, dtype=np.int64).ravel())
        self.cols.append(np.asarray(cols, dtype=np.int64).ravel())
        self.vals.append(np.asarray(values, dtype=float).ravel())

    def to_csr(self) -> sp.csr_matrix:
        if not self.rows:
            return sp.csr_matrix((self.nrows, self.ncols))
        r = np.concatenate(self.rows)
        c = np.concatenate(self.cols)
        v = np.concatenate(self.vals)
        m = sp.coo_matrix((v, (r, c)), shape=(self.nrows, self.ncols)).tocsr()
        m.sum_duplicates()
        return m


@dataclass
class Factorization:
    """Reusable sparse LU factor with residual-checked solves."""

    matrix: sp.csr_matrix
    lu: spla.SuperLU
    last_residual: float = 0.0

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        x = self.lu.solve(rhs)
        rnorm = np.linalg.norm(rhs)
        if rnorm == 0.0:
            self.last_residual = 0.0
            return x
        res = rhs - self.matrix @ x
        rel = np.linalg.norm(res) / rnorm
        if rel > 1e-10:
            x = x + self.lu.solve(res)
            rel = np.linalg.norm(rhs - self.matrix @ x) / rnorm
        self.last_residual = rel
        return x


def factorize(A: sp.spmatrix, permc_spec: str = "COLAMD") -> Factorization:
    """LU-factorize a square sparse matrix with a fill-reducing ordering."""
    A = A.tocsc()
    n, m = A.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {n}x{m}")
    empty_rows = np.flatnonzero(np.diff(A.tocsr().indptr) == 0)
    try:
        lu = spla.splu(A, permc_spec=permc_spec)
    except RuntimeError as exc:
        loc = f"; first empty row: {empty_rows[0]}" if empty_rows.size else ""
        raise SingularMatrixError(f"sparse LU failed: {exc}{loc}") from exc
    return Factorization(matrix=A.tocsr(), lu=lu)


def solve(F: Factorization, rhs: np.ndarray) -> np.ndarray:
    return F.solve(np.asarray(rhs, dtype=float))


def dump_coo(A: sp.spmatrix, path) -> None:
    """Write a matrix as "row col value" lines (debugging aid)."""
    coo = A.tocoo()
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v:.16e}\n")


class SchurFactorization:
    """Solver for [u; aux...] systems with diagonal aux-aux blocks.

    The auxiliary fields (p, q) couple to themselves only through a
    diagonal mass block, so they are eliminated locally and a single
    sparse LU of the u-Schur complement

        S = A_uu - sum_i A_{u,aux_i} D_i^{-1} A_{aux_i,u}

    replaces the monolithic factorization.  Solves reproduce the full
    stacked solution; the elimination is exact (block Gaussian
    elimination with diagonal pivots).
    """

    def __init__(self, A: sp.csr_matrix, n_fields: int, D: int, shift_diag: np.ndarray | None = None):
        A = A.tocsr()
        self.n_fields = n_fields
        self.D = D
        self.A_uu = A[:D, :D].copy()
        if shift_diag is not None:
            self.A_uu = (self.A_uu + sp.diags(shift_diag)).tocsr()
        self.A_u_aux = []
        self.A_aux_u = []
        self.inv_diag = []
        S = self.A_uu
        for i in range(1, n_fields):
            blk = slice(i * D, (i + 1) * D)
            diag_block = A[blk, blk]
            if diag_block.nnz > D or (diag_block - sp.diags(diag_block.diagonal())).nnz != 0:
                raise ValueError("auxiliary diagonal block is not diagonal; use the monolithic path")
            dinv = 1.0 / diag_block.diagonal()
            Aua = A[:D, blk].tocsr()
            Aau = A[blk, :D].tocsr()
            self.A_u_aux.append(Aua)
            self.A_aux_u.append(Aau)
            self.inv_diag.append(dinv)
            S = S - Aua @ sp.diags(dinv) @ Aau
        # S is structurally symmetric; the AT+A ordering beats COLAMD on it
        self.fact = factorize(S.tocsc(), permc_spec="MMD_AT_PLUS_A")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        D = self.D
        rhs_u = rhs[:D].copy()
        for i in range(1, self.n_fields):
            ra = rhs[i * D : (i + 1) * D]
            rhs_u -= self.A_u_aux[i - 1] @ (self.inv_diag[i - 1] * ra)
        u = self.fact.solve(rhs_u)
        out = np.empty_like(rhs)
        out[:D] = u
        for i in range(1, self.n_fields):
            ra = rhs[i * D : (i + 1) * D]
            out[i * D : (i + 1) * D] = self.inv_diag[i - 1] * (ra - self.A_aux_u[i - 1] @ u)
        return out


@dataclass
class AssembledSystem:
    """Assembled LDG operator: sparse B, u-block mass diagonal, cached factors.

    The stacked unknown is [u; p; q] (2D) or [u; q] (1D); mass_diag is the
    diagonal u-mass matrix embedded in the full vector (zero on auxiliary
    blocks).  Solvers for B and for the theta-step matrix
    B + diag(mass)/(theta*dt) are built on first use and reused.  The
    default solver eliminates the auxiliary fields (exact local Schur
    complement); solver="monolithic" factorizes the full stacked matrix.
    """

    B: sp.csr_matrix
    mass_diag: np.ndarray
    n_fields: int
    dof_field: int
    space: object
    problem: object
    solver: str = "schur"

    def __post_init__(self):
        self._stationary = None
        self._steps: dict = {}

    @property
    def ndof_total(self) -> int:
        return self.n_fields * self.dof_field

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.B @ vec

    def quadratic_form(self, vec: np.ndarray) -> float:
        return float(vec @ (self.B @ vec))

    def stationary_factorization(self):
        if self._stationary is None:
            if self.solver == "schur":
                self._stationary = SchurFactorization(self.B, self.n_fields, self.dof_field)
            else:
                self._stationary = factorize(self.B)
        return self._stationary

    def step_matrix(self, theta: float, dt: float) -> sp.csr_matrix:
        return (self.B + sp.diags(self.mass_diag / (theta * dt))).tocsr()

    def step_factorization(self, theta: float, dt: float):
        key = (float(theta), float(dt))
        if key not in self._steps:
            if self.solver == "schur":
                D = self.dof_field
                shift = self.mass_diag[:D] / (theta * dt)
                self._steps[key] = SchurFactorization(self.B, self.n_fields, D, shift_diag=shift)
            else:
                self._steps[key] = factorize(self.step_matrix(theta, dt))
        return self._steps[key]

    def dump(self, path) -> None:
        dump_coo(self.B, path)
