import numpy as np
import pytest

from ldgsp.ldg_2d import (
    ConfigurationError,
    FieldTriple,
    ProblemDef2D,
    assemble_B_2d,
    energy_norm_2d,
    rhs_vector_2d,
    u_mass_diag,
)
from ldgsp.mesh import MeshSpec, tensor_mesh
from ldgsp.problems import paper2d_problem, poly2d_problem
from ldgsp.projection import l2_project
from ldgsp.quadrature import cell_integrate_2d
from ldgsp.space import ScalarField, fe_space_2d


def make_system(kind="s", N=4, k=1, eps=1e-2):
    prob = paper2d_problem(eps)
    space = fe_space_2d(tensor_mesh(MeshSpec(kind=kind, N=N, eps=eps, sigma=k + 2)), k)
    return prob, space, assemble_B_2d(prob, space)


# ------------------------------------------------ quadratic form and norm


@pytest.mark.parametrize("kind", ["s", "bs", "btype"])
@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("N", [4, 8])
def test_quadratic_form_identity(kind, k, N):
    prob, space, system = make_system(kind=kind, N=N, k=k)
    rng = np.random.default_rng(42)
    for _ in range(10):
        z = rng.standard_normal(system.ndof_total)
        quad = system.quadratic_form(z)
        norm2 = energy_norm_2d(prob, space, FieldTriple.from_vector(space, z)) ** 2
        assert quad == pytest.approx(norm2, rel=1e-10)


def test_quadratic_form_identity_small_eps():
    prob, space, system = make_system(kind="bs", N=4, k=1, eps=1e-8)
    rng = np.random.default_rng(7)
    z = rng.standard_normal(system.ndof_total)
    norm2 = energy_norm_2d(prob, space, FieldTriple.from_vector(space, z)) ** 2
    assert system.quadratic_form(z) == pytest.approx(norm2, rel=1e-10)


def test_coercivity():
    prob, space, system = make_system(kind="bs", N=4, k=1)
    md = u_mass_diag(space)
    rng = np.random.default_rng(1)
    for _ in range(20):
        z = rng.standard_normal(system.ndof_total)
        u = z[: space.ndof]
        l2u_sq = float(u @ (md * u))
        assert system.quadratic_form(z) >= prob.beta * l2u_sq * (1.0 - 1e-12)


def test_energy_norm_zero_triple():
    prob, space, _ = make_system()
    assert energy_norm_2d(prob, space, FieldTriple.zero(space)) == 0.0


def test_energy_norm_pure_p():
    prob, space, _ = make_system(k=2)
    rng = np.random.default_rng(2)
    p = rng.standard_normal(space.ndof)
    md = u_mass_diag(space)
    trip = FieldTriple(
        u=ScalarField(space, np.zeros(space.ndof)),
        p=ScalarField(space, p),
        q=ScalarField(space, np.zeros(space.ndof)),
    )
    expect = float(p @ (md * p)) / prob.eps
    assert energy_norm_2d(prob, space, trip) ** 2 == pytest.approx(expect, rel=1e-12)


# --------------------------------------------------------------- rhs loads


def test_rhs_zero_forcing():
    prob, space, _ = make_system()
    prob.f = lambda x, y, t: np.zeros_like(x + y)
    assert np.all(rhs_vector_2d(prob, space, 0.3) == 0.0)


def test_rhs_constant_forcing_k0():
    prob, space, _ = make_system(k=0)
    prob.f = lambda x, y, t: np.ones_like(x + y)
    rhs = rhs_vector_2d(prob, space, 0.0)
    areas = np.outer(space.hy, space.hx).ravel()
    assert np.allclose(rhs[: space.ndof], areas, rtol=1e-13)
    assert np.all(rhs[space.ndof :] == 0.0)


def test_rhs_polynomial_exactness():
    prob, space, _ = make_system(k=1)
    prob.f = lambda x, y, t: x**4 * y**3 + 2.0 * x
    rhs = rhs_vector_2d(prob, space, 0.0)
    # compare the (0,0)-mode load on each cell against independent quadrature
    px, py = space.mesh.mesh_x.points, space.mesh.mesh_y.points
    for j in range(space.Ny):
        for i in range(space.Nx):
            e = j * space.Nx + i
            want = cell_integrate_2d(
                lambda x, y: prob.f(x, y, 0.0), px[i], px[i + 1], py[j], py[j + 1]
            )
            got = rhs[e * space.n_loc]
            assert got == pytest.approx(want, rel=1e-13, abs=1e-18)


# ------------------------------------------------------------- consistency


def test_polynomial_solution_consistency_k2():
    eps = 1e-3
    prob = poly2d_problem(eps)
    space = fe_space_2d(tensor_mesh(MeshSpec(kind="bs", N=8, eps=eps, sigma=4)), 2)
    system = assemble_B_2d(prob, space)
    rhs = rhs_vector_2d(prob, space, 0.0)
    sol = system.stationary_factorization().solve(rhs)
    w = FieldTriple.from_vector(space, sol)
    ex = prob.exact
    u_star = l2_project(lambda x, y: ex.u(x, y, 0.0), space)
    p_star = l2_project(lambda x, y: ex.p(x, y, 0.0), space)
    q_star = l2_project(lambda x, y: ex.q(x, y, 0.0), space)
    assert np.max(np.abs(w.u.coeffs - u_star.coeffs)) < 1e-9
    assert np.max(np.abs(w.p.coeffs - p_star.coeffs)) < 1e-9
    assert np.max(np.abs(w.q.coeffs - q_star.coeffs)) < 1e-9


# ---------------------------------------------------------------- structure


@pytest.mark.parametrize("k", [0, 1, 2])
def test_u_row_sparsity(k):
    _, space, system = make_system(kind="s", N=8, k=k)
    A = system.B.tocsr()
    A.eliminate_zeros()
    u_rows = np.diff(A.indptr)[: space.ndof]
    assert u_rows.max() <= 5 * (k + 1) ** 2 + 12 * (k + 1)


def test_no_evaluation_outside_domain():
    eps = 1e-2

    def guarded(fn):
        def wrapped(x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            assert np.all((x >= -1e-14) & (x <= 1 + 1e-14)), "evaluated outside domain"
            assert np.all((y >= -1e-14) & (y <= 1 + 1e-14))
            return np.ones_like(x + y)

        return wrapped

    prob = paper2d_problem(eps)
    base = assemble_B_2d(prob, fe_space_2d(tensor_mesh(MeshSpec(kind="s", N=4, eps=eps, sigma=3)), 1)).B
    prob2 = paper2d_problem(eps)
    prob2.a1 = guarded(prob2.a1)
    prob2.a2 = guarded(prob2.a2)
    prob2.b = guarded(prob2.b)
    guard = assemble_B_2d(prob2, fe_space_2d(tensor_mesh(MeshSpec(kind="s", N=4, eps=eps, sigma=3)), 1)).B
    assert (base != guard).nnz == 0


def test_configuration_error_on_bad_bounds():
    prob = paper2d_problem(1e-2)
    prob.b = lambda x, y: np.zeros_like(x + y)  # b - div(a)/2 = 0 < beta
    space = fe_space_2d(tensor_mesh(MeshSpec(kind="s", N=4, eps=1e-2, sigma=3)), 1)
    with pytest.raises(ConfigurationError):
        assemble_B_2d(prob, space)


def test_matrix_dump_format(tmp_path):
    _, _, system = make_system(N=4, k=0)
    path = tmp_path / "B.txt"
    system.dump(path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == system.B.nnz
    r, c, v = lines[0].split()
    int(r), int(c), float(v)


def test_field_triple_roundtrip():
    _, space, system = make_system()
    rng = np.random.default_rng(0)
    vec = rng.standard_normal(system.ndof_total)
    trip = FieldTriple.from_vector(space, vec)
    assert np.array_equal(trip.to_vector(), vec)
