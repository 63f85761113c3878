import math

import numpy as np
import pytest

from matmono import jogcalc as jc
from matmono.elast import StrainState, StressModel
from matmono.exceptions import HypothesisFailure, PreconditionError
from matmono.operator import SymOperator

TSTS = StressModel.create("tsts", mu=1.0, lam=1.0, k=1.0, k_hat=1.0)
HENCKY = StressModel.create("hencky", mu=1.0, kappa=1.0)


def pd_operator(rng, n=2):
    m = n * (n + 1) // 2
    g = rng.standard_normal((m, m))
    return SymOperator(n, g @ g.T + 0.1 * np.eye(m))


def commuting_partner(rng, op):
    # a positive polynomial in op commutes with it
    c = rng.uniform(0.1, 2.0, size=3)
    mat = c[0] * np.eye(op.m) + c[1] * op.mat + c[2] * op.mat @ op.mat
    return SymOperator(op.n, mat)


def test_identity_product():
    v = jc.product_pd(SymOperator.identity(2), SymOperator.identity(2))
    assert v.positive_definite and v.lambda_min == 1.0


def test_commuting_diagonal_operators():
    a = SymOperator(2, np.diag([1.0, 2.0, 3.0]))
    b = SymOperator(2, np.diag([0.5, 4.0, 1.0]))
    v = jc.product_pd(a, b)
    assert v.positive_definite and v.lambda_min == 0.5


def test_lemma_on_commuting_pairs():
    rng = np.random.default_rng(11)
    for _ in range(500):
        a = pd_operator(rng, n=int(rng.integers(2, 4)))
        v = jc.product_pd(a, commuting_partner(rng, a), tol=1e-9)
        assert v.positive_definite and v.lambda_min > 0


def test_non_commuting_pairs_get_no_verdict_unless_self_adjoint():
    rng = np.random.default_rng(12)
    refused = 0
    for _ in range(500):
        a, b = pd_operator(rng), pd_operator(rng)
        try:
            v = jc.product_pd(a, b)
        except HypothesisFailure as exc:
            refused += 1
            assert exc.report["asymmetry_ab"] > 1e-9
        else:
            assert v.positive_definite
    assert refused == 500


def test_refusal_reports_which_hypothesis():
    ok = SymOperator.identity(2)
    asym = SymOperator(2, np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
    with pytest.raises(HypothesisFailure, match="factors must be self-adjoint"):
        jc.product_pd(asym, ok)
    with pytest.raises(HypothesisFailure, match="positive definite") as info:
        jc.product_pd(SymOperator(2, np.diag([1.0, -1.0, 1.0])), ok)
    assert info.value.report["lambda_min_a"] == -1.0


def test_chain_rule_at_natural_state():
    t = jc.chain_factorization(TSTS, StrainState.from_log(np.zeros((3, 3))))
    assert t.residual <= 1e-8
    assert t.propagated is True
    for op in (t.dsigma_dB, t.dB_dlogB, t.dsigma_dlogB):
        assert op.lambda_min > 0


def test_chain_rule_residual_scales_quadratically():
    rng = np.random.default_rng(5)
    g = rng.standard_normal((3, 3))
    state = StrainState.from_log(0.15 * (g + g.T))
    r1 = jc.chain_factorization(TSTS, state, h=1e-2).residual
    r2 = jc.chain_factorization(TSTS, state, h=5e-3).residual
    assert 3.0 < r1 / r2 < 5.0
    assert jc.chain_factorization(TSTS, state).residual <= 1e-6


def test_chain_rule_at_violating_hencky_state():
    t = jc.chain_factorization(HENCKY, StrainState.from_log(0.5 * np.eye(3)))
    assert t.dsigma_dlogB.lambda_min < 0
    assert t.propagated is None and "positive definite" in t.hypothesis_failure
    d = t.to_dict()
    assert set(d["lambda_min"]) == {"dsigma_dB", "dB_dlogB", "dsigma_dlogB"}


def test_chain_rule_refuses_on_non_self_adjoint_legs():
    t = jc.chain_factorization(TSTS, StrainState.from_log(np.diag([0.1, -0.05, 0.02])))
    assert t.propagated is None and "not self-adjoint" in t.hypothesis_failure


def test_path_endpoints():
    exp = jc.run_path_experiment(11)
    first, last = exp.records[0], exp.records[-1]
    assert first.sym_pd and first.det_sym_ab == 0.125
    assert not last.sym_pd and last.det_sym_ab == -0.125
    assert all(r.invertible and r.det_ab == 0.125 for r in exp.records)
    np.testing.assert_array_equal(exp.t, np.linspace(0, 1, 11))


def test_path_det_sym_is_quadratic():
    # det(sym(A B_t)) = 1/8 - t^2 / 4
    for r in jc.run_path_experiment(21).records:
        assert r.det_sym_ab == pytest.approx(0.125 - r.t**2 / 4, abs=1e-15)
        assert r.sym_pd == (r.t < 1 / math.sqrt(2))


def test_crossing_matches_closed_form_root():
    assert abs(jc.locate_sym_pd_crossing() - 1 / math.sqrt(2)) <= 1e-12


def test_path_csv_and_validation():
    lines = jc.run_path_experiment(3).to_csv().splitlines()
    assert lines[0] == "t,det_AB,det_sym_AB,sym_pd,invertible"
    assert lines[1] == "0.0,0.125,0.125,true,true"
    with pytest.raises(PreconditionError):
        jc.run_path_experiment(1)
