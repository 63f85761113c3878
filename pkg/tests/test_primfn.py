import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from conftest import pd_matrices, rand_pd, rand_sym, sym_matrices
from matmono.exceptions import ConfigurationError, DomainError
from matmono.primfn import (
    BUILTINS,
    DifferencingSpec,
    apply_primary,
    divided_differences,
    frechet,
    frechet_apply,
    frechet_exp_integral,
    frechet_log_integral,
    gauss_legendre_01,
    get_function,
    potential_gradient_check,
    potential_value,
    pseudo_potential,
)
from matmono.symcore import norm, sym_basis


def test_registry_lookup():
    assert get_function("exp") is BUILTINS["exp"]
    assert get_function(BUILTINS["log"]) is BUILTINS["log"]
    with pytest.raises(ConfigurationError, match="unknown scalar function"):
        get_function("tanh")


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_registered_derivatives_match_finite_differences(name):
    fn = BUILTINS[name]
    t = np.array([0.3, 1.1, 2.5])
    h = 1e-6
    np.testing.assert_allclose(fn.df(t), (fn.f(t + h) - fn.f(t - h)) / (2 * h), rtol=1e-7)
    np.testing.assert_allclose(fn.f(t), (fn.F(t + h) - fn.F(t - h)) / (2 * h), rtol=1e-7)


def test_primary_functions_against_scipy(rng):
    for n in (2, 3, 5):
        a = rand_sym(rng, n)
        np.testing.assert_allclose(apply_primary("exp", a), scipy.linalg.expm(a), rtol=1e-12, atol=1e-13)
        p = rand_pd(rng, n)
        np.testing.assert_allclose(apply_primary("log", p), scipy.linalg.logm(p).real, atol=1e-11)
        np.testing.assert_allclose(apply_primary("square", a), a @ a, atol=1e-12)


def test_log_of_diagonal_exponentials():
    np.testing.assert_allclose(apply_primary("log", np.diag([math.e, math.e**2])), np.diag([1.0, 2.0]), atol=1e-15)


def test_domain_error_names_the_eigenvalue():
    with pytest.raises(DomainError, match="-2.0") as info:
        apply_primary("log", np.diag([1.0, -2.0]))
    assert info.value.value == -2.0


def test_divided_differences_coincident_use_midpoint_derivative():
    fn = BUILTINS["exp"]
    phi = divided_differences(fn, np.array([1.0, 1.0 + 1e-12, 3.0]))
    assert phi[0, 1] == pytest.approx(math.exp(1.0 + 5e-13), rel=1e-15)
    assert phi[0, 2] == pytest.approx((math.exp(1.0) - math.exp(3.0)) / (1.0 - 3.0), rel=1e-14)
    np.testing.assert_allclose(phi, phi.T)


def test_gauss_legendre_nodes_integrate_polynomials():
    x, w = gauss_legendre_01(8)
    assert np.sum(w) == pytest.approx(1.0, abs=1e-15)
    assert np.dot(w, x**15) == pytest.approx(1.0 / 16.0, rel=1e-14)


def test_square_derivative_is_anticommutator(rng):
    a, h = rand_sym(rng, 3), rand_sym(rng, 3)
    np.testing.assert_allclose(frechet_apply("square", a, h), a @ h + h @ a, atol=1e-12)


def test_exp_derivative_against_scipy_expm_frechet(rng):
    for n in (2, 3, 4):
        a, h = rand_sym(rng, n), rand_sym(rng, n)
        _, oracle = scipy.linalg.expm_frechet(a, h)
        np.testing.assert_allclose(frechet_apply("exp", a, h), oracle, rtol=1e-10, atol=1e-12)


def test_log_derivative_is_inverse_of_exp_derivative(rng):
    a = rand_sym(rng, 3)
    dexp = frechet("exp", a)
    dlog = frechet("log", apply_primary("exp", a))
    np.testing.assert_allclose((dlog @ dexp).mat, np.eye(6), atol=1e-10)


def test_log_derivative_against_finite_differences(rng):
    p, h = rand_pd(rng, 3), rand_sym(rng, 3)
    eps = 1e-5
    fd = (scipy.linalg.logm(p + eps * h).real - scipy.linalg.logm(p - eps * h).real) / (2 * eps)
    np.testing.assert_allclose(frechet_apply("log", p, h), fd, atol=1e-8)


def test_derivative_at_identity_is_scalar_multiple():
    for name in ("exp", "log", "square", "cube", "cubic-mono"):
        op = frechet(name, np.eye(3))
        np.testing.assert_allclose(op.mat, BUILTINS[name].df(1.0) * np.eye(6), atol=1e-12)


def test_frechet_operator_is_self_adjoint_before_symmetrization(rng):
    for name in ("exp", "cube", "softplus"):
        op = frechet(name, rand_sym(rng, 4))
        assert op.presym_asymmetry <= 1e-9
        assert op.asymmetry == 0.0


def test_quadrature_routes_agree_with_divided_differences(rng):
    a = rand_sym(rng, 3)
    np.testing.assert_allclose(frechet_exp_integral(a).mat, frechet("exp", a).mat, atol=1e-12)
    p = rand_pd(rng, 3)
    np.testing.assert_allclose(frechet_log_integral(p).mat, frechet("log", p).mat, atol=1e-11)
    with pytest.raises(DomainError):
        frechet_log_integral(np.diag([1.0, -1.0]))


def test_differencing_spec_validation():
    with pytest.raises(ConfigurationError):
        DifferencingSpec(tau_eig=0.0)
    with pytest.raises(ConfigurationError):
        DifferencingSpec(order=1)


def test_potential_value_closed_forms():
    a = np.diag([1.0, 2.0])
    assert potential_value("square", a) == pytest.approx(1 / 3 + 8 / 3)
    assert potential_value("log", a) == pytest.approx(-1.0 + 2 * math.log(2) - 2)


def test_pseudo_potential_constant_term(rng):
    for name in ("id", "exp"):
        fn = BUILTINS[name]
        for _ in range(5):
            a = rand_sym(rng, 3)
            lam = np.linalg.eigvalsh(a)
            expected = np.sum(fn.F(lam)) - 3 * fn.F(0.0)
            assert pseudo_potential(name, a) == pytest.approx(expected, abs=1e-10)
    with pytest.raises(DomainError):
        pseudo_potential("log", np.eye(2))


@pytest.mark.parametrize("name", ["exp", "log", "square", "cube", "cubic-mono", "softplus"])
def test_gradient_check_is_second_order(name):
    a = np.array([[1.2, 0.3, 0.1], [0.3, 0.9, -0.2], [0.1, -0.2, 1.5]])
    check = potential_gradient_check(name, a)
    assert check.ratio is not None and 3.5 <= check.ratio <= 4.5


def test_gradient_check_exact_for_quadratic_potential():
    check = potential_gradient_check("id", np.diag([1.0, 2.0]))
    assert check.exact and check.deviation_half <= check.noise_floor


@given(sym_matrices(n_max=4, bound=2.0), sym_matrices(n_min=2, n_max=2, bound=1.0), st.sampled_from(["exp", "cube", "cubic-mono"]))
def test_frechet_is_linear_and_matches_fd(a, h_small, name):
    n = a.shape[0]
    h = np.zeros((n, n))
    h[:2, :2] = h_small
    eps = 1e-5
    fd = (apply_primary(name, a + eps * h) - apply_primary(name, a - eps * h)) / (2 * eps)
    got = frechet_apply(name, a, h)
    scale = max(1.0, norm(apply_primary(name, a))) * max(1.0, norm(h))
    assert norm(got - fd) <= 1e-6 * scale
    np.testing.assert_allclose(frechet_apply(name, a, 2.0 * h), 2.0 * got, atol=1e-12 * scale)


@given(pd_matrices())
def test_log_derivative_positive_definite(p):
    assert frechet("log", p).lambda_min > 0


@given(sym_matrices(n_max=4, bound=2.0))
def test_exp_derivative_positive_definite(a):
    # moderate spectra only: for spread-out spectra the operator's condition
    # number (about exp(lam_max - lam_min)) swamps lambda_min in rounding
    assert frechet("exp", a).lambda_min > 0


@given(sym_matrices(n_max=4))
def test_operator_is_symmetric_in_basis(a):
    op = frechet("exp", a)
    b = sym_basis(a.shape[0])
    e0, e1 = b.elements[0], b.elements[-1]
    lhs = np.sum(op.apply(e0) * e1)
    rhs = np.sum(e0 * op.apply(e1))
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


def test_log_quadrature_on_ill_conditioned_input():
    # eigenvalues 0.02 .. 30: the unscaled integrand has a pole near t = 1.02
    q, _ = np.linalg.qr(np.random.default_rng(1).standard_normal((3, 3)))
    p = q @ np.diag([0.02, 1.0, 30.0]) @ q.T
    np.testing.assert_allclose(frechet_log_integral(p).mat, frechet("log", p).mat, atol=1e-8)
