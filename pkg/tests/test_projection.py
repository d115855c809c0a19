import numpy as np
import pytest

from ldgsp.mesh import MeshSpec, build_mesh_1d, tensor_mesh
from ldgsp.problems import paper2d_problem
from ldgsp.projection import (
    gr_minus_1d,
    gr_plus_1d,
    l2_project,
    pi_minus_2d,
    pi_x_plus_2d,
    pi_y_plus_2d,
    projection_rate_study,
)
from ldgsp.quadrature import cell_integrate, gauss_legendre_5, legendre_values
from ldgsp.space import ScalarField, fe_space_1d, fe_space_2d


def space_1d(N=8, k=2, kind="bs", eps=1e-2):
    return fe_space_1d(build_mesh_1d(MeshSpec(kind=kind, N=N, eps=eps, sigma=3)), k)


def space_2d(N=4, k=2, kind="s", eps=1e-2):
    return fe_space_2d(tensor_mesh(MeshSpec(kind=kind, N=N, eps=eps, sigma=3)), k)


def uniform_space_1d(N, k):
    # clamped tau = 1/2 makes the s-profile linear on both halves
    return fe_space_1d(build_mesh_1d(MeshSpec(kind="s", N=N, eps=0.9, sigma=2.0)), k)


# ------------------------------------------------------------ L2 projection


def _poly_1d(k):
    # degree-exactly-k polynomial with all lower modes present
    c = np.arange(1.0, k + 2.0)
    return lambda x: sum(ci * np.asarray(x) ** i for i, ci in enumerate(c))


def test_l2_project_reproduces_polynomials_2d():
    sp = space_2d(k=2)
    f = _poly_1d(2)
    z = lambda x, y: f(x) * f(y)
    proj = l2_project(z, sp)
    assert np.allclose(proj.values_at_quad(), sp.eval_on_cells(z), rtol=1e-12, atol=1e-12)


def test_l2_project_constant():
    sp = space_2d(k=1)
    proj = l2_project(lambda x, y: 3.5 * np.ones_like(x + y), sp)
    C = proj.elem_view()
    assert np.allclose(C[:, 0, 0], 3.5, rtol=1e-13)
    C2 = C.copy()
    C2[:, 0, 0] = 0.0
    assert np.max(np.abs(C2)) < 1e-13


def test_l2_project_orthogonality_residual_1d():
    # residual orthogonality against every basis mode, via independent quadrature
    sp = space_1d(N=4, k=3)
    z = lambda x: x ** (sp.k + 1)
    proj = l2_project(z, sp)
    pts = sp.mesh.points
    for e in range(sp.n_cells):
        lo, hi = pts[e], pts[e + 1]
        C = proj.elem_view()[e]

        def diff_times_mode(x, m):
            xi = 2.0 * (x - lo) / (hi - lo) - 1.0
            L = legendre_values(sp.k, xi)
            approx = np.einsum("m,mx->x", C, L)
            return (z(x) - approx) * L[m]

        for m in range(sp.k + 1):
            res = cell_integrate(lambda x: diff_times_mode(x, m), lo, hi)
            assert abs(res) < 1e-12


# -------------------------------------------------------------- 1D GR pi+-


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_gr_1d_reproduces_polynomials(k):
    sp = space_1d(k=k)
    z = _poly_1d(k)
    for proj_fn in (gr_minus_1d, gr_plus_1d):
        proj = proj_fn(z, sp)
        assert np.allclose(proj.values_at_quad(), z(sp.xq), rtol=1e-11, atol=1e-11)


def test_gr_minus_collocation_at_right_nodes():
    sp = space_1d(N=8, k=2)
    proj = gr_minus_1d(np.sin, sp)
    right = proj.elem_view() @ np.ones(sp.k + 1)
    assert np.max(np.abs(right - np.sin(sp.mesh.points[1:]))) < 1e-12


def test_gr_plus_collocation_at_left_nodes():
    sp = space_1d(N=8, k=2)
    proj = gr_plus_1d(np.sin, sp)
    signs = np.where(np.arange(sp.k + 1) % 2 == 0, 1.0, -1.0)
    left = proj.elem_view() @ signs
    assert np.max(np.abs(left - np.sin(sp.mesh.points[:-1]))) < 1e-12


def test_gr_1d_moment_conditions():
    sp = space_1d(N=4, k=3)
    z = lambda x: np.exp(x)
    proj = gr_minus_1d(z, sp)
    pts = sp.mesh.points
    for e in range(sp.n_cells):
        lo, hi = pts[e], pts[e + 1]
        C = proj.elem_view()[e]
        for m in range(sp.k):

            def integrand(x):
                xi = 2.0 * (x - lo) / (hi - lo) - 1.0
                L = legendre_values(sp.k, xi)
                return (z(x) - np.einsum("m,mx->x", C, L)) * L[m]

            assert abs(cell_integrate(integrand, lo, hi)) < 1e-12


@pytest.mark.parametrize("k", [1, 2])
def test_gr_1d_convergence_order(k):
    errs = []
    for N in (32, 64):
        sp = uniform_space_1d(N, k)
        proj = gr_minus_1d(np.sin, sp)
        err = np.max(np.abs(proj.values_at_quad() - np.sin(sp.xq)))
        errs.append(err)
    rate = np.log2(errs[0] / errs[1])
    assert rate >= k + 0.9


def test_gr_k0_degenerate_collocation_only():
    sp = space_1d(N=4, k=0)
    proj = gr_minus_1d(np.sin, sp)
    assert np.allclose(proj.coeffs, np.sin(sp.mesh.points[1:]), rtol=1e-13)


# -------------------------------------------------------------- 2D GR Pi


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("proj_fn", [pi_minus_2d, pi_x_plus_2d, pi_y_plus_2d])
def test_pi_2d_reproduces_polynomials(k, proj_fn):
    sp = space_2d(N=4, k=k)
    f = _poly_1d(k)
    z = lambda x, y: f(x) * f(y)
    proj = proj_fn(z, sp)
    assert np.allclose(proj.values_at_quad(), sp.eval_on_cells(z), rtol=1e-10, atol=1e-10)


def test_pi_minus_corner_collocation():
    sp = space_2d(N=4, k=2)
    z = lambda x, y: np.sin(np.pi * x * y)
    proj = pi_minus_2d(z, sp)
    C = proj.elem_view()
    corner_vals = C.sum(axis=(1, 2))  # L_m(1) L_n(1) = 1
    xr = np.tile(sp.mesh.mesh_x.points[1:], sp.Ny)
    yr = np.repeat(sp.mesh.mesh_y.points[1:], sp.Nx)
    assert np.max(np.abs(corner_vals - z(xr, yr))) < 1e-12


def test_pi_minus_tensor_factorization():
    # for separable z = f(x) g(y), Pi^- z has coefficients (pi^- f) x (pi^- g)
    for k in (1, 2, 3):
        sp2 = space_2d(N=4, k=k)
        sp1 = fe_space_1d(sp2.mesh.mesh_x, k)
        z = lambda x, y: np.exp(x + y)
        a = gr_minus_1d(np.exp, sp1).elem_view()       # (Nx, k+1)
        proj = pi_minus_2d(z, sp2).elem_view()         # (E, k+1, k+1) [n, m]
        for j in range(sp2.Ny):
            for i in range(sp2.Nx):
                expect = np.outer(a[j], a[i])          # [n, m] = b_n a_m
                got = proj[j * sp2.Nx + i]
                assert np.max(np.abs(got - expect)) < 1e-12


def test_pi_2d_linearity():
    sp = space_2d(N=4, k=2)
    z1 = lambda x, y: np.sin(x) * np.cos(y)
    z2 = lambda x, y: x**2 + y
    alpha = 2.75
    for proj_fn in (pi_minus_2d, pi_x_plus_2d, pi_y_plus_2d):
        lhs = proj_fn(lambda x, y: alpha * z1(x, y) + z2(x, y), sp)
        rhs = alpha * proj_fn(z1, sp).coeffs + proj_fn(z2, sp).coeffs
        assert np.allclose(lhs.coeffs, rhs, rtol=1e-12, atol=1e-12)


def test_pi_2d_locality():
    sp = space_2d(N=4, k=1)
    z1 = lambda x, y: np.sin(x + y)

    def z2(x, y):
        base = np.sin(x + y)
        return np.where(x > 0.9, base + 50.0, base)  # bump confined to last x-cells

    p1 = pi_minus_2d(z1, sp).elem_view()
    p2 = pi_minus_2d(z2, sp).elem_view()
    cell = sp.mesh.cell_index(0, 0)  # far from the modified region
    assert np.allclose(p1[cell], p2[cell], atol=1e-14)
    assert not np.allclose(p1[-1], p2[-1])


def test_pi_xplus_left_edge_moments():
    sp = space_2d(N=4, k=2)
    z = lambda x, y: np.exp(x) * np.sin(y + 0.3)
    proj = pi_x_plus_2d(z, sp)
    # left-edge trace of the projection must match z's edge moments against P^k
    w = sp.basis.quad.weights
    P = sp.basis.val
    signs = np.where(np.arange(sp.k + 1) % 2 == 0, 1.0, -1.0)
    C = proj.elem_view()
    for j in range(sp.Ny):
        for i in range(sp.Nx):
            e = j * sp.Nx + i
            tr = np.einsum("nm,m,nh->h", C[e], signs, P)
            zing = z(sp.mesh.mesh_x.points[i], sp.yq[j])
            for n in range(sp.k + 1):
                got = np.dot(w, tr * P[n])
                want = np.dot(w, zing * P[n])
                assert abs(got - want) < 1e-12


# ------------------------------------------------------------- rate study


def test_projection_rate_study_bs():
    prob = paper2d_problem(1e-8)
    recs = projection_rate_study("bs", 1, (32, 64), 1e-8, prob.exact.u, prob.exact.p)
    assert recs[0].rate_u is None and recs[0].rate_p is None
    assert recs[1].rate_p >= 1.9
    assert recs[1].rate_u >= 1.9


def test_projection_rate_study_s_log_scaled():
    prob = paper2d_problem(1e-8)
    recs = projection_rate_study("s", 1, (32, 64), 1e-8, prob.exact.u, prob.exact.p)
    assert recs[1].rate_p >= 1.9   # measured against N^{-1} ln N
    assert recs[1].rate_u >= 1.9   # coarse-region error has no log factor
