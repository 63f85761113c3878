import math

import numpy as np
import pytest
from hypothesis import given

from conftest import rand_sym, sym_matrices
from matmono import elast
from matmono.elast import StrainState, StressModel
from matmono.exceptions import ConfigurationError, DomainError
from matmono.monocheck import SampleSpec, hmon_margin
from matmono.operator import SymOperator
from matmono.symcore import dev, norm, sym_basis

HENCKY = StressModel.create("hencky", mu=1.0, kappa=1.0)
TSTS = StressModel.create("tsts", mu=1.0, lam=1.0, k=1.0, k_hat=1.0)
EXPH = StressModel.create("exp-hencky", mu=1.0, kappa=1.0, k=0.5, k_hat=0.25, sigma_y=0.3)


def test_hencky_kirchhoff_hand_value():
    # 2 dev diag(1,0,0) = diag(4/3, -2/3, -2/3); plus tr(L) I = I
    tau = elast.kirchhoff_stress(HENCKY, StrainState.from_log(np.diag([1.0, 0.0, 0.0])))
    np.testing.assert_allclose(tau, np.diag([7 / 3, 1 / 3, 1 / 3]), atol=1e-15)


def test_cauchy_is_scaled_kirchhoff(rng):
    l = rand_sym(rng, 3, 0.3)
    s = StrainState.from_log(l)
    for m in (HENCKY, TSTS, EXPH):
        np.testing.assert_allclose(elast.cauchy_stress(m, s), math.exp(-np.trace(l)) * elast.kirchhoff_stress(m, s))
        np.testing.assert_allclose(elast.cauchy_stress_of_stretch(m, s.v), elast.cauchy_stress(m, s), atol=1e-12)
    assert s.det_v == pytest.approx(np.linalg.det(s.v))


@pytest.mark.parametrize("model", [HENCKY, TSTS, EXPH], ids=lambda m: m.name)
def test_kirchhoff_is_energy_gradient(rng, model):
    l = rand_sym(rng, 3, 0.3)
    h = 1e-6
    basis = sym_basis(3)
    grad = [(model.energy_log(l + h * e) - model.energy_log(l - h * e)) / (2 * h) for e in basis.elements]
    np.testing.assert_allclose(grad, basis.coords(model.kirchhoff_log(l)), atol=1e-7)
    assert elast.energy(model, StrainState.from_log(l)) == model.energy_log(l)


def test_parameter_constraints():
    with pytest.raises(ConfigurationError, match="k must exceed 3/8"):
        StressModel.create("tsts", mu=1.0, lam=1.0, k=0.3, k_hat=1.0)
    with pytest.raises(ConfigurationError, match="k_hat must exceed 1/8"):
        StressModel.create("tsts", mu=1.0, lam=1.0, k=1.0, k_hat=0.1)
    with pytest.raises(ConfigurationError, match="k must exceed 1/3"):
        StressModel.create("exp-hencky", mu=1.0, kappa=1.0, k=0.3, k_hat=0.2)
    with pytest.raises(ConfigurationError, match="mu must be positive"):
        StressModel.create("hencky", mu=0.0, kappa=1.0)
    with pytest.raises(ConfigurationError, match="unknown model"):
        StressModel.create("neo-hooke", mu=1.0)


def test_from_config_round_trip():
    cfg = {"model": "TSTS", "mu": 1, "lambda": 2, "k": 1, "k_hat": 1}
    m = StressModel.from_config(cfg)
    assert m.name == "tsts" and m.params.lam == 2.0
    assert StressModel.from_config(m.to_dict()) == m
    with pytest.raises(ConfigurationError, match="unknown model parameters"):
        StressModel.from_config({"model": "hencky", "mu": 1, "kappa": 1, "nu": 0.3})
    with pytest.raises(ConfigurationError):
        StressModel.from_config({"mu": 1})


def test_strain_state_validation():
    with pytest.raises(DomainError):
        StrainState.from_stretch(np.diag([1.0, -1.0]))
    with pytest.raises(ConfigurationError):
        StrainState(np.eye(2), np.diag([0.1, 0.0]))
    s = StrainState.from_stretch(np.diag([math.e, 1.0]))
    np.testing.assert_allclose(s.logv, np.diag([1.0, 0.0]), atol=1e-15)


def hencky_derivative(model, l):
    # D sigma_hat[L].H = exp(-tr L) (2 mu dev H + kappa tr(H) I - tr(H) tau(L))
    p = model.params
    tau = model.kirchhoff_log(l)
    n = l.shape[0]
    return SymOperator.from_map(
        n, lambda h: math.exp(-np.trace(l)) * (2 * p.mu * dev(h) + p.kappa * np.trace(h) * np.eye(n) - np.trace(h) * tau)
    )


def test_tsts_operator_matches_closed_form(rng):
    l = rand_sym(rng, 3, 0.4)
    op = elast.tsts_operator(HENCKY, StrainState.from_log(l))
    exact = hencky_derivative(HENCKY, l)
    np.testing.assert_allclose(op.raw.mat, exact.mat, atol=1e-8)
    assert op.lambda_min == pytest.approx(exact.lambda_min, abs=1e-8)


def test_tsts_operator_asymmetry_is_exactly_predicted(rng):
    for model in (HENCKY, TSTS, EXPH):
        l = rand_sym(rng, 3, 0.4)
        op = elast.tsts_operator(model, StrainState.from_log(l))
        numerator = op.asymmetry * np.linalg.norm(op.raw.mat)
        assert numerator == pytest.approx(elast.tsts_operator_exact_asymmetry(model, l), rel=1e-6)
        assert op.asymmetry > 1e-3


def test_tsts_operator_self_adjoint_at_spherical_states():
    op = elast.tsts_operator(TSTS, StrainState.from_log(0.2 * np.eye(3)))
    assert op.asymmetry <= 1e-6
    assert elast.tsts_operator_exact_asymmetry(TSTS, 0.2 * np.eye(3)) == 0.0


def test_elastic_domain_membership():
    sy = 0.3
    r = math.sqrt(2 / 3) * sy
    inside = np.diag([r, -r, 0.0]) / math.sqrt(2) * (1 - 1e-9) + 5.0 * np.eye(3)
    assert elast.elastic_domain_contains(StrainState.from_log(inside), sy)
    assert not elast.elastic_domain_contains(np.diag([r, -r, 0.0]), sy)
    with pytest.raises(ConfigurationError):
        elast.elastic_domain_contains(np.eye(3), -1.0)


def test_elastic_samples_lie_in_domain():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = elast._sample_log_strain(rng, 3, 1.0, 0.3)
        assert elast.elastic_domain_contains(x, 0.3)


def test_scans_small():
    spec = SampleSpec(n=3, count=150)
    assert elast.tsts_scan(TSTS, spec).passed
    assert elast.tsts_scan(EXPH, spec, domain="elastic").passed
    r = elast.tsts_scan(HENCKY, SampleSpec(n=3, count=1000))
    assert not r.passed
    fmap = elast.stress_map(HENCKY)
    for w in r.witnesses:
        assert hmon_margin(fmap, w.a, w.b_or_h)[0] == w.margin
    with pytest.raises(ConfigurationError):
        elast.tsts_scan(HENCKY, spec, domain="elastic")


def test_hill_check_respects_lower_bound():
    for mu, kappa in [(1.0, 1.0), (2.0, 0.1), (0.5, 3.0)]:
        m = StressModel.create("hencky", mu=mu, kappa=kappa)
        r = elast.hill_check(m, SampleSpec(n=3, count=200))
        assert r.passed
        assert r.worst_margin >= elast.hill_margin_bound(m, 3) * (1 - 1e-12)
    with pytest.raises(ConfigurationError):
        elast.hill_check(TSTS)


def test_hencky_grid_search_crossing():
    found = elast.hencky_violation_search(HENCKY)
    assert found is not None and found.lambda_min < 0
    # along L = s I: d/ds [3 kappa s exp(-3 s)] vanishes at s = 1/3
    assert found.crossing[0] == 0.0
    assert found.crossing[1] == pytest.approx(1 / 3, abs=1e-8)
    assert found.witness.margin < 0
    assert hmon_margin(elast.stress_map(HENCKY), found.witness.a, found.witness.b_or_h)[0] == found.witness.margin
    assert elast.hencky_violation_search(TSTS, dilations=np.linspace(-0.5, 0.5, 5)) is None


@given(sym_matrices(n_min=3, n_max=3, bound=0.5))
def test_hencky_hill_margin_formula(d):
    # <tau(L + D) - tau(L), D> / ||D||^2 = 2 mu + (kappa - 2 mu / n) tr(D)^2 / ||D||^2
    if norm(d) < 1e-3:
        return
    m = StressModel.create("hencky", mu=0.7, kappa=1.3)
    l = np.diag([0.1, 0.2, -0.1])
    got = np.sum((m.kirchhoff_log(l + d) - m.kirchhoff_log(l)) * d) / np.sum(d * d)
    expected = 1.4 + (1.3 - 1.4 / 3) * np.trace(d) ** 2 / np.sum(d * d)
    assert got == pytest.approx(expected, rel=1e-12)
