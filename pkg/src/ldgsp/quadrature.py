"""Reference-element Legendre basis and 5-point Gauss-Legendre quadrature.

Every integral in the package (assembly, right-hand sides, projections,
error norms) uses the same 5-point rule per direction, mapped affinely
onto each cell.  The rule is exact for polynomials up to degree 9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# 5-point Gauss-Legendre rule on [-1, 1], 18 significant digits
_GL5_NODES = np.array(
    [
        -0.906179845938663993,
        -0.538469310105683091,
        0.0,
        0.538469310105683091,
        0.906179845938663993,
    ]
)
_GL5_WEIGHTS = np.array(
    [
        0.236926885056189088,
        0.478628670499366468,
        0.568888888888888889,
        0.478628670499366468,
        0.236926885056189088,
    ]
)


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


def gauss_legendre_5() -> QuadratureRule:
    """The 5-point Gauss-Legendre rule on [-1, 1]."""
    return QuadratureRule(nodes=_GL5_NODES.copy(), weights=_GL5_WEIGHTS.copy())


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule (general orders; only n=5 is used in anger)."""
    if n == 5:
        return gauss_legendre_5()
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadratureRule(nodes=x, weights=w)


def legendre_values(k: int, xi) -> np.ndarray:
    """Values of L_0..L_k at points xi, via the three-term recurrence.

    Returns an array of shape (k+1,) + shape(xi).
    """
    xi = np.asarray(xi, dtype=float)
    out = np.empty((k + 1,) + xi.shape)
    out[0] = 1.0
    if k >= 1:
        out[1] = xi
    for n in range(1, k):
        out[n + 1] = ((2 * n + 1) * xi * out[n] - n * out[n - 1]) / (n + 1)
    return out


def legendre_derivatives(k: int, xi) -> np.ndarray:
    """Derivatives L_0'..L_k' at points xi.

    Uses the recurrence L_{n+1}' = L_{n-1}' + (2n+1) L_n.
    """
    xi = np.asarray(xi, dtype=float)
    vals = legendre_values(k, xi)
    out = np.zeros((k + 1,) + xi.shape)
    if k >= 1:
        out[1] = 1.0
    for n in range(1, k):
        out[n + 1] = out[n - 1] + (2 * n + 1) * vals[n]
    return out


@dataclass(frozen=True)
class ReferenceBasis:
    """Legendre basis tables on [-1, 1] at the quadrature nodes and endpoints.

    Attributes
    ----------
    k : int
        Polynomial degree (k+1 modes).
    quad : QuadratureRule
        The rule the tables are sampled at.
    val : ndarray, (k+1, nq)
        L_m(xi_g).
    der : ndarray, (k+1, nq)
        L_m'(xi_g).
    val_left, val_right : ndarray, (k+1,)
        L_m(-1) = (-1)^m and L_m(+1) = 1.
    """

    k: int
    quad: QuadratureRule
    val: np.ndarray
    der: np.ndarray
    val_left: np.ndarray
    val_right: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.k + 1


def reference_basis(k: int, quad: QuadratureRule | None = None) -> ReferenceBasis:
    """Build the evaluation tables for degree k on the 5-point rule."""
    if k < 0:
        raise ValueError("degree k must be >= 0")
    if quad is None:
        quad = gauss_legendre_5()
    val = legendre_values(k, quad.nodes)
    der = legendre_derivatives(k, quad.nodes)
    m = np.arange(k + 1)
    return ReferenceBasis(
        k=k,
        quad=quad,
        val=val,
        der=der,
        val_left=np.where(m % 2 == 0, 1.0, -1.0),
        val_right=np.ones(k + 1),
    )


def eval_basis_1d(basis: ReferenceBasis, xi: float) -> np.ndarray:
    """Values of L_0..L_k at a single reference point xi in [-1, 1]."""
    return legendre_values(basis.k, float(xi))


def eval_basis_1d_deriv(basis: ReferenceBasis, xi: float) -> np.ndarray:
    """Derivatives L_0'..L_k' at a single reference point xi."""
    return legendre_derivatives(basis.k, float(xi))


def cell_integrate(f, x_lo: float, x_hi: float, quad: QuadratureRule | None = None) -> float:
    """Integrate f over the interval (x_lo, x_hi) with the mapped rule."""
    if quad is None:
        quad = gauss_legendre_5()
    if not x_hi > x_lo:
        raise ValueError("cell must have positive width")
    h = x_hi - x_lo
    x = 0.5 * (x_lo + x_hi) + 0.5 * h * quad.nodes
    return 0.5 * h * float(np.dot(quad.weights, f(x)))


def cell_integrate_2d(
    f,
    x_lo: float,
    x_hi: float,
    y_lo: float,
    y_hi: float,
    quad: QuadratureRule | None = None,
) -> float:
    """Integrate f(x, y) over a rectangle with the tensorized mapped rule."""
    if quad is None:
        quad = gauss_legendre_5()
    if not (x_hi > x_lo and y_hi > y_lo):
        raise ValueError("cell must have positive widths")
    hx, hy = x_hi - x_lo, y_hi - y_lo
    x = 0.5 * (x_lo + x_hi) + 0.5 * hx * quad.nodes
    y = 0.5 * (y_lo + y_hi) + 0.5 * hy * quad.nodes
    X, Y = np.meshgrid(x, y, indexing="ij")
    W = np.outer(quad.weights, quad.weights)
    return 0.25 * hx * hy * float(np.sum(W * f(X, Y)))
