import numpy as np
import pytest

from ldgsp.ldg_1d import (
    ConfigurationError1D,
    FieldPair,
    assemble_B_1d,
    energy_norm_1d,
    rhs_vector_1d,
    u_mass_diag_1d,
)
from ldgsp.mesh import MeshSpec, build_mesh_1d
from ldgsp.problems import paper1d_problem, poly1d_problem
from ldgsp.projection import l2_project
from ldgsp.space import ScalarField, fe_space_1d


def make_system(kind="bs", N=8, k=1, eps=1e-2):
    prob = paper1d_problem(eps)
    space = fe_space_1d(build_mesh_1d(MeshSpec(kind=kind, N=N, eps=eps, sigma=k + 2)), k)
    return prob, space, assemble_B_1d(prob, space)


@pytest.mark.parametrize("kind", ["s", "bs", "btype"])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_quadratic_form_identity(kind, k):
    prob, space, system = make_system(kind=kind, k=k)
    rng = np.random.default_rng(5)
    for _ in range(10):
        z = rng.standard_normal(system.ndof_total)
        norm2 = energy_norm_1d(prob, space, FieldPair.from_vector(space, z)) ** 2
        assert system.quadratic_form(z) == pytest.approx(norm2, rel=1e-12)


def test_coercivity():
    prob, space, system = make_system()
    md = u_mass_diag_1d(space)
    rng = np.random.default_rng(6)
    for _ in range(20):
        z = rng.standard_normal(system.ndof_total)
        u = z[: space.ndof]
        assert system.quadratic_form(z) >= prob.beta * float(u @ (md * u)) * (1 - 1e-12)


def test_energy_norm_zero():
    prob, space, _ = make_system()
    assert energy_norm_1d(prob, space, FieldPair.zero(space)) == 0.0


def test_energy_norm_pure_q():
    prob, space, _ = make_system(k=2)
    rng = np.random.default_rng(8)
    q = rng.standard_normal(space.ndof)
    pair = FieldPair(u=ScalarField(space, np.zeros(space.ndof)), q=ScalarField(space, q))
    md = u_mass_diag_1d(space)
    expect = np.sqrt(float(q @ (md * q)) / prob.eps)
    assert energy_norm_1d(prob, space, pair) == pytest.approx(expect, rel=1e-13)


def test_polynomial_consistency_k2():
    eps = 1e-3
    prob = poly1d_problem(eps)
    space = fe_space_1d(build_mesh_1d(MeshSpec(kind="s", N=8, eps=eps, sigma=4)), 2)
    system = assemble_B_1d(prob, space)
    sol = system.stationary_factorization().solve(rhs_vector_1d(prob, space, 0.0))
    pair = FieldPair.from_vector(space, sol)
    ex = prob.exact
    u_star = l2_project(lambda x: ex.u(x, 0.0), space)
    q_star = l2_project(lambda x: ex.q(x, 0.0), space)
    assert np.max(np.abs(pair.u.coeffs - u_star.coeffs)) < 1e-10
    assert np.max(np.abs(pair.q.coeffs - q_star.coeffs)) < 1e-10


def test_rhs_zero():
    prob, space, _ = make_system()
    prob.f = lambda x, t: np.zeros_like(x)
    assert np.all(rhs_vector_1d(prob, space, 1.0) == 0.0)


def test_configuration_error():
    prob = paper1d_problem(1e-2)
    prob.a = lambda x: 0.5 * np.ones_like(np.asarray(x, dtype=float))  # below alpha = 1
    space = fe_space_1d(build_mesh_1d(MeshSpec(kind="s", N=4, eps=1e-2, sigma=3)), 1)
    with pytest.raises(ConfigurationError1D):
        assemble_B_1d(prob, space)
