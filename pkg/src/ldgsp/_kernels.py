"""Hot per-step kernels: field evaluation, load projection, weighted reductions.

Each kernel has a pure-numpy implementation and a numba @njit twin.  The
backend is chosen once at import time: numba when importable, unless the
environment variable LDGSP_NUMBA is set to "0" (then the numpy path is
used).  Both paths compute the same sums in the same nesting order, so
results agree to rounding; benchmarks/bench_kernels.py compares them.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


USE_NUMBA = HAS_NUMBA and os.environ.get("LDGSP_NUMBA", "1") not in ("0", "false", "off")


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- 2D kernels
# Coefficient layout: C[e, n, m] with m the x-mode and n the y-mode.
# Px[m, g] are x-basis values at x-quad nodes, Py[n, h] likewise in y.


def _np_eval_cells_2d(C, Px, Py):
    return np.einsum("enm,mg,nh->egh", C, Px, Py, optimize=True)


@njit(cache=True)
def _nb_eval_cells_2d(C, Px, Py):
    E, K1, _ = C.shape
    G = Px.shape[1]
    H = Py.shape[1]
    out = np.zeros((E, G, H))
    for e in range(E):
        for n in range(K1):
            for m in range(K1):
                c = C[e, n, m]
                if c == 0.0:
                    continue
                for g in range(G):
                    cg = c * Px[m, g]
                    for h in range(H):
                        out[e, g, h] += cg * Py[n, h]
    return out


def _np_xtrace_cells_2d(C, xv, Py):
    return np.einsum("enm,m,nh->eh", C, xv, Py, optimize=True)


@njit(cache=True)
def _nb_xtrace_cells_2d(C, xv, Py):
    E, K1, _ = C.shape
    H = Py.shape[1]
    out = np.zeros((E, H))
    for e in range(E):
        for n in range(K1):
            s = 0.0
            for m in range(K1):
                s += C[e, n, m] * xv[m]
            for h in range(H):
                out[e, h] += s * Py[n, h]
    return out


def _np_ytrace_cells_2d(C, Px, yv):
    return np.einsum("enm,mg,n->eg", C, Px, yv, optimize=True)


@njit(cache=True)
def _nb_ytrace_cells_2d(C, Px, yv):
    E, K1, _ = C.shape
    G = Px.shape[1]
    out = np.zeros((E, G))
    for e in range(E):
        for m in range(K1):
            s = 0.0
            for n in range(K1):
                s += C[e, n, m] * yv[n]
            for g in range(G):
                out[e, g] += s * Px[m, g]
    return out


def _np_load_cells_2d(F, Px, Py, w, jac):
    out = np.einsum("egh,mg,nh,g,h->enm", F, Px, Py, w, w, optimize=True)
    return out * jac[:, None, None]


@njit(cache=True)
def _nb_load_cells_2d(F, Px, Py, w, jac):
    E, G, H = F.shape
    K1 = Px.shape[0]
    out = np.zeros((E, K1, K1))
    for e in range(E):
        for n in range(K1):
            for m in range(K1):
                s = 0.0
                for g in range(G):
                    sg = 0.0
                    for h in range(H):
                        sg += F[e, g, h] * Py[n, h] * w[h]
                    s += sg * Px[m, g] * w[g]
                out[e, n, m] = s * jac[e]
    return out


def _np_wsq_cells_2d(V, w, jac):
    return float(np.einsum("egh,g,h,e->", V * V, w, w, jac, optimize=True))


@njit(cache=True)
def _nb_wsq_cells_2d(V, w, jac):
    E, G, H = V.shape
    total = 0.0
    for e in range(E):
        s = 0.0
        for g in range(G):
            sg = 0.0
            for h in range(H):
                sg += V[e, g, h] * V[e, g, h] * w[h]
            s += sg * w[g]
        total += s * jac[e]
    return total


def _np_wsq_lines(V, w, jac):
    # V[l, g]: one row per edge line, jac[l] the 1D jacobian
    return float(np.einsum("lg,g,l->", V * V, w, jac, optimize=True))


@njit(cache=True)
def _nb_wsq_lines(V, w, jac):
    L, G = V.shape
    total = 0.0
    for l in range(L):
        s = 0.0
        for g in range(G):
            s += V[l, g] * V[l, g] * w[g]
        total += s * jac[l]
    return total


# ---------------------------------------------------------------- 1D kernels


def _np_eval_cells_1d(C, P):
    return C @ P


@njit(cache=True)
def _nb_eval_cells_1d(C, P):
    E, K1 = C.shape
    G = P.shape[1]
    out = np.zeros((E, G))
    for e in range(E):
        for m in range(K1):
            c = C[e, m]
            for g in range(G):
                out[e, g] += c * P[m, g]
    return out


def _np_load_cells_1d(F, P, w, jac):
    return np.einsum("eg,mg,g->em", F, P, w, optimize=True) * jac[:, None]


@njit(cache=True)
def _nb_load_cells_1d(F, P, w, jac):
    E, G = F.shape
    K1 = P.shape[0]
    out = np.zeros((E, K1))
    for e in range(E):
        for m in range(K1):
            s = 0.0
            for g in range(G):
                s += F[e, g] * P[m, g] * w[g]
            out[e, m] = s * jac[e]
    return out


def _np_wsq_cells_1d(V, w, jac):
    return float(np.einsum("eg,g,e->", V * V, w, jac, optimize=True))


@njit(cache=True)
def _nb_wsq_cells_1d(V, w, jac):
    E, G = V.shape
    total = 0.0
    for e in range(E):
        s = 0.0
        for g in range(G):
            s += V[e, g] * V[e, g] * w[g]
        total += s * jac[e]
    return total


# ---------------------------------------------------------------- dispatch

if USE_NUMBA:
    eval_cells_2d = _nb_eval_cells_2d
    xtrace_cells_2d = _nb_xtrace_cells_2d
    ytrace_cells_2d = _nb_ytrace_cells_2d
    load_cells_2d = _nb_load_cells_2d
    wsq_cells_2d = _nb_wsq_cells_2d
    wsq_lines = _nb_wsq_lines
    eval_cells_1d = _nb_eval_cells_1d
    load_cells_1d = _nb_load_cells_1d
    wsq_cells_1d = _nb_wsq_cells_1d
else:
    eval_cells_2d = _np_eval_cells_2d
    xtrace_cells_2d = _np_xtrace_cells_2d
    ytrace_cells_2d = _np_ytrace_cells_2d
    load_cells_2d = _np_load_cells_2d
    wsq_cells_2d = _np_wsq_cells_2d
    wsq_lines = _np_wsq_lines
    eval_cells_1d = _np_eval_cells_1d
    load_cells_1d = _np_load_cells_1d
    wsq_cells_1d = _np_wsq_cells_1d

NUMPY_IMPLS = {
    "eval_cells_2d": _np_eval_cells_2d,
    "xtrace_cells_2d": _np_xtrace_cells_2d,
    "ytrace_cells_2d": _np_ytrace_cells_2d,
    "load_cells_2d": _np_load_cells_2d,
    "wsq_cells_2d": _np_wsq_cells_2d,
    "wsq_lines": _np_wsq_lines,
    "eval_cells_1d": _np_eval_cells_1d,
    "load_cells_1d": _np_load_cells_1d,
    "wsq_cells_1d": _np_wsq_cells_1d,
}

NUMBA_IMPLS = {
    "eval_cells_2d": _nb_eval_cells_2d,
    "xtrace_cells_2d": _nb_xtrace_cells_2d,
    "ytrace_cells_2d": _nb_ytrace_cells_2d,
    "load_cells_2d": _nb_load_cells_2d,
    "wsq_cells_2d": _nb_wsq_cells_2d,
    "wsq_lines": _nb_wsq_lines,
    "eval_cells_1d": _nb_eval_cells_1d,
    "load_cells_1d": _nb_load_cells_1d,
    "wsq_cells_1d": _nb_wsq_cells_1d,
}
