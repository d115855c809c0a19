import math

import numpy as np
import pytest

from ldgsp.quadrature import (
    cell_integrate,
    cell_integrate_2d,
    eval_basis_1d,
    eval_basis_1d_deriv,
    gauss_legendre_5,
    legendre_derivatives,
    legendre_values,
    reference_basis,
)


def _p5(x):
    # degree-5 Legendre polynomial, closed form (independent of the recurrence)
    return (63.0 * x**5 - 70.0 * x**3 + 15.0 * x) / 8.0


def _bisect_root(f, lo, hi, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_gl5_first_node_matches_bisection_oracle():
    root = _bisect_root(_p5, -0.95, -0.85)
    rule = gauss_legendre_5()
    assert rule.nodes[0] == pytest.approx(root, abs=1e-14)
    assert rule.nodes[0] == pytest.approx(-0.906179845938664, abs=1e-15)


def test_gl5_weights_sum_to_two():
    rule = gauss_legendre_5()
    assert rule.weights.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.all(rule.weights > 0)


def test_gl5_symmetric():
    rule = gauss_legendre_5()
    assert np.allclose(rule.nodes, -rule.nodes[::-1])
    assert np.allclose(rule.weights, rule.weights[::-1])


@pytest.mark.parametrize("deg", range(10))
def test_exact_for_monomials_to_degree_9(deg):
    rule = gauss_legendre_5()
    got = float(np.dot(rule.weights, rule.nodes**deg))
    expect = 0.0 if deg % 2 == 1 else 2.0 / (deg + 1)
    assert got == pytest.approx(expect, abs=2e-14)


def test_x8_integral_relative():
    rule = gauss_legendre_5()
    got = float(np.dot(rule.weights, rule.nodes**8))
    assert abs(got - 2.0 / 9.0) / (2.0 / 9.0) < 1e-14


def test_cell_integrate_linear():
    assert cell_integrate(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_cell_integrate_exp():
    got = cell_integrate(np.exp, 0.0, 1.0)
    assert abs(got - (math.e - 1.0)) < 1e-9


def test_cell_integrate_2d_separable():
    got = cell_integrate_2d(lambda x, y: x**3 * y**3, 0.0, 1.0, 0.0, 1.0)
    assert got == pytest.approx(1.0 / 16.0, rel=1e-14)


def test_cell_integrate_2d_anisotropic_exactness():
    # degree 9 per direction on a 1e6-anisotropic cell
    hx = 1e-6
    got = cell_integrate_2d(lambda x, y: x**9 * y**9, 0.0, hx, 0.0, 1.0)
    expect = (hx**10 / 10.0) * (1.0 / 10.0)
    assert abs(got - expect) / expect < 1e-13


def test_cell_integrate_rejects_degenerate():
    with pytest.raises(ValueError):
        cell_integrate(lambda x: x, 1.0, 1.0)
    with pytest.raises(ValueError):
        cell_integrate_2d(lambda x, y: x, 0.0, 1.0, 2.0, 1.0)


# ------------------------------------------------------------------- basis


def test_endpoint_values():
    basis = reference_basis(4)
    assert np.allclose(basis.val_right, 1.0)
    assert np.allclose(basis.val_left, [1, -1, 1, -1, 1])


def test_eval_basis_closed_forms():
    basis = reference_basis(2)
    assert np.allclose(eval_basis_1d(basis, 1.0), [1.0, 1.0, 1.0])
    assert np.allclose(eval_basis_1d(basis, 0.0), [1.0, 0.0, -0.5])
    assert np.allclose(eval_basis_1d_deriv(basis, 0.0), [0.0, 1.0, 0.0])


def test_legendre_derivatives_match_finite_differences():
    k = 5
    xi = gauss_legendre_5().nodes
    h = 1e-6
    fd = (legendre_values(k, xi + h) - legendre_values(k, xi - h)) / (2 * h)
    assert np.allclose(legendre_derivatives(k, xi), fd, atol=1e-6)


def test_reference_mass_matrix_diagonal():
    k = 4
    basis = reference_basis(k)
    w = basis.quad.weights
    M = np.einsum("mg,ng,g->mn", basis.val, basis.val, w)
    expect = np.diag(2.0 / (2.0 * np.arange(k + 1) + 1.0))
    assert np.max(np.abs(M - expect)) < 1e-13


def test_orthogonality_via_quadrature():
    basis = reference_basis(4)
    w = basis.quad.weights
    for m in range(5):
        for n in range(5):
            if m != n and m + n <= 9:
                val = float(np.dot(w, basis.val[m] * basis.val[n]))
                assert abs(val) < 1e-14


def test_rejects_negative_degree():
    with pytest.raises(ValueError):
        reference_basis(-1)
