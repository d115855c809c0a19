"""Built-in test problems.

"paper2d"/"paper1d" are the layered manufactured solutions used for the
convergence studies; "poly2d"/"poly1d" are time-independent polynomial
solutions used as consistency oracles (the discrete solution must
reproduce them to solver tolerance for k >= 2).

Layer factors 1 - exp(-(1-x)/eps) and the forcing term are coded in
cancellation-free form: the O(1/eps) pieces of -eps*u_xx + u_x cancel
analytically, so f stays O(1) and evaluable down to eps = 1e-11.
"""

from __future__ import annotations

import numpy as np

from .ldg_1d import ExactSolution1D, ProblemDef1D
from .ldg_2d import ExactSolution2D, ProblemDef2D


def _layer(s, eps):
    """g(s) = 1 - exp(-(1-s)/eps), computed as -expm1(-(1-s)/eps)."""
    return -np.expm1(-(1.0 - s) / eps)


def _layer_exp(s, eps):
    """E(s) = exp(-(1-s)/eps)."""
    return np.exp(-(1.0 - s) / eps)


def paper2d_problem(eps: float) -> ProblemDef2D:
    """u_t - eps*Lap(u) + u_x + u_y + u = f on (0,1)^2 with exact solution
    u = e^t sin(pi x y) (1 - e^{-(1-x)/eps}) (1 - e^{-(1-y)/eps})."""

    def u(x, y, t):
        return np.exp(t) * np.sin(np.pi * x * y) * _layer(x, eps) * _layer(y, eps)

    def u_x(x, y, t):
        G, H, E = _layer(x, eps), _layer(y, eps), _layer_exp(x, eps)
        return np.exp(t) * H * (np.pi * y * np.cos(np.pi * x * y) * G - np.sin(np.pi * x * y) * E / eps)

    def u_y(x, y, t):
        G, H, E = _layer(x, eps), _layer(y, eps), _layer_exp(y, eps)
        return np.exp(t) * G * (np.pi * x * np.cos(np.pi * x * y) * H - np.sin(np.pi * x * y) * E / eps)

    def p_exact(x, y, t):
        # eps*u_x without forming u_x (keeps the layer term eps-free)
        G, H, E = _layer(x, eps), _layer(y, eps), _layer_exp(x, eps)
        return np.exp(t) * H * (eps * np.pi * y * np.cos(np.pi * x * y) * G - np.sin(np.pi * x * y) * E)

    def q_exact(x, y, t):
        G, H, E = _layer(x, eps), _layer(y, eps), _layer_exp(y, eps)
        return np.exp(t) * G * (eps * np.pi * x * np.cos(np.pi * x * y) * H - np.sin(np.pi * x * y) * E)

    def f(x, y, t):
        phi = np.sin(np.pi * x * y)
        G, H = _layer(x, eps), _layer(y, eps)
        Ex, Ey = _layer_exp(x, eps), _layer_exp(y, eps)
        phi_x = np.pi * y * np.cos(np.pi * x * y)
        phi_y = np.pi * x * np.cos(np.pi * x * y)
        phi_xx = -((np.pi * y) ** 2) * phi
        phi_yy = -((np.pi * x) ** 2) * phi
        # u_t + b u = 2 u; the layer blowup in -eps u_xx + u_x cancels exactly
        adv_x = H * (phi_x * (G + 2.0 * Ex) - eps * phi_xx * G)
        adv_y = G * (phi_y * (H + 2.0 * Ey) - eps * phi_yy * H)
        return np.exp(t) * (2.0 * phi * G * H + adv_x + adv_y)

    one = lambda x, y: np.ones_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))
    zero = lambda x, y: np.zeros_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))

    return ProblemDef2D(
        eps=eps,
        a1=one,
        a2=one,
        b=one,
        a1_x=zero,
        a2_y=zero,
        f=f,
        u0=lambda x, y: u(x, y, 0.0),
        alpha1=1.0,
        alpha2=1.0,
        beta=1.0,
        exact=ExactSolution2D(u=u, u_x=u_x, u_y=u_y, u_t=u, p=p_exact, q=q_exact),
    )


def poly2d_problem(eps: float) -> ProblemDef2D:
    """Time-independent polynomial solution u = x(1-x)y(1-y), same operator."""

    def u(x, y, t):
        return x * (1.0 - x) * y * (1.0 - y)

    def u_x(x, y, t):
        return (1.0 - 2.0 * x) * y * (1.0 - y)

    def u_y(x, y, t):
        return x * (1.0 - x) * (1.0 - 2.0 * y)

    def f(x, y, t):
        lap = -2.0 * y * (1.0 - y) - 2.0 * x * (1.0 - x)
        return -eps * lap + u_x(x, y, t) + u_y(x, y, t) + u(x, y, t)

    one = lambda x, y: np.ones_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))
    zero = lambda x, y: np.zeros_like(np.asarray(x, dtype=float) + np.asarray(y, dtype=float))

    return ProblemDef2D(
        eps=eps,
        a1=one,
        a2=one,
        b=one,
        a1_x=zero,
        a2_y=zero,
        f=f,
        u0=lambda x, y: u(x, y, 0.0),
        alpha1=1.0,
        alpha2=1.0,
        beta=1.0,
        exact=ExactSolution2D(
            u=u,
            u_x=u_x,
            u_y=u_y,
            u_t=lambda x, y, t: np.zeros_like(x * y),
            p=lambda x, y, t: eps * u_x(x, y, t),
            q=lambda x, y, t: eps * u_y(x, y, t),
        ),
    )


def paper1d_problem(eps: float) -> ProblemDef1D:
    """u_t - eps*u_xx + u_x + u = f on (0,1) with exact solution
    u = e^t sin(pi x / 2) (1 - e^{-(1-x)/eps})."""

    def u(x, t):
        return np.exp(t) * np.sin(0.5 * np.pi * x) * _layer(x, eps)

    def u_x(x, t):
        G, E = _layer(x, eps), _layer_exp(x, eps)
        return np.exp(t) * (0.5 * np.pi * np.cos(0.5 * np.pi * x) * G - np.sin(0.5 * np.pi * x) * E / eps)

    def q_exact(x, t):
        G, E = _layer(x, eps), _layer_exp(x, eps)
        return np.exp(t) * (eps * 0.5 * np.pi * np.cos(0.5 * np.pi * x) * G - np.sin(0.5 * np.pi * x) * E)

    def f(x, t):
        phi = np.sin(0.5 * np.pi * x)
        phi_x = 0.5 * np.pi * np.cos(0.5 * np.pi * x)
        phi_xx = -0.25 * np.pi**2 * phi
        G, E = _layer(x, eps), _layer_exp(x, eps)
        return np.exp(t) * (2.0 * phi * G + phi_x * (G + 2.0 * E) - eps * phi_xx * G)

    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    return ProblemDef1D(
        eps=eps,
        a=one,
        b=one,
        a_x=zero,
        f=f,
        u0=lambda x: u(x, 0.0),
        alpha=1.0,
        beta=1.0,
        exact=ExactSolution1D(u=u, u_x=u_x, u_t=u, q=q_exact),
    )


def poly1d_problem(eps: float) -> ProblemDef1D:
    """Time-independent polynomial solution u = x(1-x), same 1D operator."""

    def u(x, t):
        return x * (1.0 - x)

    def u_x(x, t):
        return 1.0 - 2.0 * x

    def f(x, t):
        return 2.0 * eps + u_x(x, t) + u(x, t)

    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    return ProblemDef1D(
        eps=eps,
        a=one,
        b=one,
        a_x=zero,
        f=f,
        u0=lambda x: u(x, 0.0),
        alpha=1.0,
        beta=1.0,
        exact=ExactSolution1D(
            u=u,
            u_x=u_x,
            u_t=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            q=lambda x, t: eps * u_x(x, t),
        ),
    )


PROBLEMS_2D = {"paper2d": paper2d_problem, "poly": poly2d_problem}
PROBLEMS_1D = {"paper1d": paper1d_problem, "poly": poly1d_problem}
