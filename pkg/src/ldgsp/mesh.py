"""Layer-adapted 1D meshes and their 2D tensor products.

Three mesh families are supported, all sharing the same structure: a
uniform coarse part on [0, 1-tau] with N/2 cells and a graded fine part
on [1-tau, 1] with N/2 cells resolving an outflow boundary layer.  The
grading is controlled by a mesh-generating function lambda(t) built from
a monotone convex profile phi:

    kind "s"      phi(t) = 2 t ln N                  (Shishkin)
    kind "bs"     phi(t) = -ln[1 - 2(1 - 1/N) t]     (Bakhvalov-Shishkin)
    kind "btype"  phi(t) = -ln[1 - 2(1 - eps) t]     (Bakhvalov-type)

The companion characterizing function is psi = exp(-phi); its maximal
slope max|psi'| enters all error constants and is exposed here with its
exact analytic value per family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MESH_KINDS = ("s", "bs", "btype")


class MeshConstructionError(ValueError):
    """Raised for invalid mesh parameters (odd N, N < 4, nonpositive reals)."""


@dataclass(frozen=True)
class MeshSpec:
    """Parameters defining a layer-adapted mesh in one direction.

    Attributes
    ----------
    kind : str
        One of "s", "bs", "btype".
    N : int
        Number of cells; must be even and >= 4.
    eps : float
        Perturbation parameter; positive.
    sigma : float
        User-chosen grading strength; positive.  Typically k + 2.
    alpha : float
        Lower bound of the convection coefficient; positive.
    eps_warning : bool
        Set when eps > 1/N, outside the regime the error theory assumes.
        Construction still proceeds.
    """

    kind: str
    N: int
    eps: float
    sigma: float
    alpha: float = 1.0
    eps_warning: bool = field(init=False, default=False)

    def __post_init__(self):
        if self.kind not in MESH_KINDS:
            raise MeshConstructionError(f"unknown mesh kind {self.kind!r}")
        if self.N < 4 or self.N % 2 != 0:
            raise MeshConstructionError(f"N must be even and >= 4, got {self.N}")
        if not (self.eps > 0 and self.sigma > 0 and self.alpha > 0):
            raise MeshConstructionError("eps, sigma, alpha must be positive")
        if self.eps > 1.0 / self.N:
            object.__setattr__(self, "eps_warning", True)


def phi(spec: MeshSpec, t):
    """Grading profile phi(t) on [0, 1/2] for the given mesh family."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "s":
        return 2.0 * t * math.log(spec.N)
    if spec.kind == "bs":
        return -np.log1p(-2.0 * (1.0 - 1.0 / spec.N) * t)
    return -np.log1p(-2.0 * (1.0 - spec.eps) * t)


def psi(spec: MeshSpec, t):
    """Characterizing function psi(t) = exp(-phi(t))."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "s":
        return np.power(float(spec.N), -2.0 * t)
    if spec.kind == "bs":
        return 1.0 - 2.0 * (1.0 - 1.0 / spec.N) * t
    return 1.0 - 2.0 * (1.0 - spec.eps) * t


def phi_half(spec: MeshSpec) -> float:
    """phi(1/2): ln N for the Shishkin families, ln(1/eps) for Bakhvalov-type."""
    if spec.kind in ("s", "bs"):
        return math.log(spec.N)
    return math.log(1.0 / spec.eps)


def transition_tau(spec: MeshSpec) -> float:
    """Transition point offset tau = min{1/2, (sigma eps / alpha) phi(1/2)}."""
    return min(0.5, spec.sigma * spec.eps / spec.alpha * phi_half(spec))


def max_abs_psi_prime(spec: MeshSpec) -> float:
    """Exact value of max|psi'|: 2 ln N (s), 2(1 - 1/N) (bs), 2(1 - eps) (btype)."""
    if spec.kind == "s":
        return 2.0 * math.log(spec.N)
    if spec.kind == "bs":
        return 2.0 * (1.0 - 1.0 / spec.N)
    return 2.0 * (1.0 - spec.eps)


def mesh_generating_lambda(spec: MeshSpec, t):
    """Mesh-generating function lambda(t) mapping [0,1] onto [0,1].

    lambda(t) = 2(1-tau) t on [0, 1/2] and 1 - tau * phi(1-t)/phi(1/2) on
    [1/2, 1].  When tau is not clamped at 1/2 the second branch reduces to
    1 - (sigma eps / alpha) phi(1-t); when it is clamped the profile is
    rescaled so that lambda stays continuous and the mesh stays valid.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise ValueError("lambda(t) is defined for t in [0, 1]")
    tau = transition_tau(spec)
    out = 2.0 * (1.0 - tau) * t_arr
    upper = t_arr > 0.5
    if np.any(upper):
        out[upper] = 1.0 - tau * phi(spec, 1.0 - t_arr[upper]) / phi_half(spec)
    if np.ndim(t) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class Mesh1D:
    """Realized 1D mesh: nodes x_0 = 0 < ... < x_N = 1 with x_{N/2} = 1 - tau."""

    spec: MeshSpec
    points: np.ndarray
    widths: np.ndarray
    tau: float

    @property
    def N(self) -> int:
        return self.spec.N

    def dump(self, path) -> None:
        """Write nodes as lines "i x_i", 17 significant digits."""
        with open(path, "w") as fh:
            for i, x in enumerate(self.points):
                fh.write(f"{i} {x:.16e}\n")


def build_mesh_1d(spec: MeshSpec) -> Mesh1D:
    """Build the 1D mesh with nodes x_i = lambda(i/N)."""
    N = spec.N
    tau = transition_tau(spec)
    i = np.arange(N + 1)
    pts = np.empty(N + 1, dtype=float)
    # coarse branch evaluated as (1-tau)*(2i/N) so x_{N/2} = 1-tau exactly
    left = i[: N // 2 + 1]
    pts[: N // 2 + 1] = (1.0 - tau) * (2.0 * left / N)
    right = i[N // 2 + 1 :]
    pts[N // 2 + 1 :] = 1.0 - tau * phi(spec, 1.0 - right / N) / phi_half(spec)
    pts[0] = 0.0
    pts[N] = 1.0
    widths = np.diff(pts)
    if np.any(widths <= 0.0):
        raise MeshConstructionError(
            f"mesh degenerate for kind={spec.kind}, N={N}, eps={spec.eps}"
        )
    pts.setflags(write=False)
    widths.setflags(write=False)
    return Mesh1D(spec=spec, points=pts, widths=widths, tau=tau)


def layer_diagnostic_theta(mesh: Mesh1D) -> np.ndarray:
    """Weighted layer quantities Theta_i = min{h_i/eps, 1} exp(-alpha(1-x_i)/(sigma eps)).

    Returned for the fine-region nodes i = N/2+1 .. N; a diagnostic used
    to check the smallness bounds the mesh construction is designed for.
    """
    spec = mesh.spec
    i = np.arange(spec.N // 2 + 1, spec.N + 1)
    h = mesh.widths[i - 1]
    x = mesh.points[i]
    w = np.minimum(h / spec.eps, 1.0)
    return w * np.exp(-spec.alpha * (1.0 - x) / (spec.sigma * spec.eps))


# cell (i, j) lives in region index pair (ri, rj) with 1 = coarse, 2 = fine
REGIONS_2D = ("11", "21", "12", "22")


@dataclass(frozen=True)
class TensorMesh2D:
    """Tensor product of two 1D meshes (identical spec in both directions)."""

    mesh_x: Mesh1D
    mesh_y: Mesh1D

    @property
    def Nx(self) -> int:
        return self.mesh_x.N

    @property
    def Ny(self) -> int:
        return self.mesh_y.N

    @property
    def n_cells(self) -> int:
        return self.Nx * self.Ny

    def cell_index(self, i: int, j: int) -> int:
        """Flat index of cell (i, j), 0-based, lexicographic in (j, i)."""
        return j * self.Nx + i

    def region_of_cell(self, i: int, j: int) -> str:
        """Region label among "11", "21", "12", "22" (x-part first)."""
        rx = "1" if i < self.Nx // 2 else "2"
        ry = "1" if j < self.Ny // 2 else "2"
        return rx + ry

    def region_labels(self) -> np.ndarray:
        """Array of region labels for all cells in flat (j, i) order."""
        out = np.empty(self.n_cells, dtype="U2")
        for j in range(self.Ny):
            for i in range(self.Nx):
                out[self.cell_index(i, j)] = self.region_of_cell(i, j)
        return out


def tensor_mesh(spec: MeshSpec) -> TensorMesh2D:
    """Build the 2D mesh by tensoring the 1D mesh with itself."""
    m = build_mesh_1d(spec)
    return TensorMesh2D(mesh_x=m, mesh_y=m)
