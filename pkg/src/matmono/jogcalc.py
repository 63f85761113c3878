"""Operator products, the chain-rule factorization of the stress derivative, and the
invertible-but-not-positive deformation path.

``B`` denotes the stretch ``V`` throughout, so ``sigma(B) = sigma_hat(log B)``.
"positive definite" for a non-symmetric matrix means a positive definite
symmetric part and is spelled ``sym_pd`` here.
"""

from dataclasses import dataclass

import numpy as np

from .elast import StrainState, _model, cauchy_stress_of_stretch, fd_step, tsts_operator
from .exceptions import HypothesisFailure, PreconditionError
from .operator import SymOperator, fd_operator
from .primfn import frechet
from .symcore import Definiteness, classify_spectrum, sym_part

SELF_ADJOINT_TOL = 1e-9


@dataclass(frozen=True)
class ProductVerdict:
    positive_definite: bool
    lambda_min: float
    asymmetry: float


def product_pd(op_a, op_b, tol=SELF_ADJOINT_TOL):
    """Positive definiteness of ``A B`` for self-adjoint positive definite ``A``, ``B``
    whose product is self-adjoint.

    Raises
    ------
    HypothesisFailure
        If any of the three self-adjointness hypotheses or the definiteness of
        ``A`` or ``B`` fails; no verdict is produced in that case.
    """
    report = {
        "asymmetry_a": op_a.asymmetry,
        "asymmetry_b": op_b.asymmetry,
        "lambda_min_a": op_a.lambda_min,
        "lambda_min_b": op_b.lambda_min,
    }
    if report["asymmetry_a"] > tol or report["asymmetry_b"] > tol:
        raise HypothesisFailure("factors must be self-adjoint", report)
    if report["lambda_min_a"] <= 0 or report["lambda_min_b"] <= 0:
        raise HypothesisFailure("factors must be positive definite", report)
    prod = op_a @ op_b
    report["asymmetry_ab"] = prod.asymmetry
    if prod.asymmetry > tol:
        raise HypothesisFailure("product is not self-adjoint", report)
    lam = prod.lambda_min
    return ProductVerdict(lam > 0, lam, prod.asymmetry)


@dataclass(frozen=True)
class OperatorTriple:
    """The three derivatives of the chain rule at one state.

    ``residual = ||dsigma_dB @ dB_dlogB - dsigma_dlogB||_F``.
    ``propagated`` is the product-lemma verdict for ``dsigma_dB`` (``None``
    when its hypotheses failed; ``hypothesis_failure`` says which).
    """

    dsigma_dB: SymOperator
    dB_dlogB: SymOperator
    dsigma_dlogB: SymOperator
    residual: float
    propagated: bool | None
    hypothesis_failure: str | None

    def to_dict(self):
        return {
            "lambda_min": {
                "dsigma_dB": self.dsigma_dB.lambda_min,
                "dB_dlogB": self.dB_dlogB.lambda_min,
                "dsigma_dlogB": self.dsigma_dlogB.lambda_min,
            },
            "asymmetry": {
                "dsigma_dB": self.dsigma_dB.asymmetry,
                "dB_dlogB": self.dB_dlogB.asymmetry,
                "dsigma_dlogB": self.dsigma_dlogB.asymmetry,
            },
            "residual": self.residual,
            "propagated": self.propagated,
            "hypothesis_failure": self.hypothesis_failure,
        }


def chain_factorization(model, state, h=None, tol=1e-6):
    """Build ``d sigma/dB``, ``dB/d log B = Dexp[log B]`` and ``d sigma_hat/d log B``.

    The two stress legs are central differences with step ``h`` (default
    ``1e-5 max(1, ||log V||)``).  When ``d sigma_hat/d log B`` and
    ``d sigma/dB`` are self-adjoint (within ``tol``, FD accuracy) the product
    lemma is applied to ``d sigma_hat/d log B @ Dlog[B]``.
    """
    model = _model(model)
    if not isinstance(state, StrainState):
        state = StrainState.from_stretch(state)
    h = fd_step(state.logv) if h is None else h
    ds_db = fd_operator(lambda b: cauchy_stress_of_stretch(model, b), state.v, h)
    db_dl = frechet("exp", state.logv)
    ds_dl = tsts_operator(model, state, h=h).raw
    residual = float(np.linalg.norm((ds_db @ db_dl).mat - ds_dl.mat))

    propagated, failure = None, None
    try:
        dlog = db_dl.inverse()
        if ds_db.asymmetry > tol:
            raise HypothesisFailure("d sigma/dB is not self-adjoint", {"asymmetry": ds_db.asymmetry})
        if ds_dl.asymmetry > tol:
            raise HypothesisFailure("d sigma_hat/d log B is not self-adjoint", {"asymmetry": ds_dl.asymmetry})
        propagated = product_pd(ds_dl.sym(), dlog.sym(), tol=tol).positive_definite
    except HypothesisFailure as exc:
        failure = str(exc)
    return OperatorTriple(ds_db, db_dl, ds_dl, residual, propagated, failure)


PATH_A = np.array([[1.0, 0.0], [0.0, 0.125]])


def path_b(t):
    return np.array([[1.0, -t], [0.0, 1.0]])


@dataclass(frozen=True)
class PathRecord:
    t: float
    det_ab: float
    det_sym_ab: float
    sym_pd: bool
    invertible: bool


@dataclass(frozen=True)
class PathExperiment:
    a: np.ndarray
    records: tuple

    @property
    def t(self):
        return np.array([r.t for r in self.records])

    def to_csv(self):
        lines = ["t,det_AB,det_sym_AB,sym_pd,invertible"]
        for r in self.records:
            lines.append(f"{r.t!r},{r.det_ab!r},{r.det_sym_ab!r},{str(r.sym_pd).lower()},{str(r.invertible).lower()}")
        return "\n".join(lines) + "\n"


def det2(m):
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def path_record(t):
    ab = PATH_A @ path_b(t)
    s = sym_part(ab)
    verdict = classify_spectrum(np.linalg.eigvalsh(s), tol=0.0).verdict
    det_ab = det2(ab)
    return PathRecord(float(t), det_ab, det2(s), verdict is Definiteness.POSITIVE_DEFINITE, abs(det_ab) > 1e-12)


def run_path_experiment(t_steps=101):
    """Evaluate ``A B_t`` on a uniform grid of ``t_steps`` points in ``[0, 1]``."""
    if t_steps < 2:
        raise PreconditionError("t_steps must be at least 2")
    return PathExperiment(PATH_A.copy(), tuple(path_record(t) for t in np.linspace(0.0, 1.0, t_steps)))


def locate_sym_pd_crossing(tol=1e-12):
    """Bisect ``det(sym(A B_t)) = 0`` on ``[0, 1]``; returns ``t*``."""
    lo, hi = 0.0, 1.0
    f_lo = det2(sym_part(PATH_A @ path_b(lo)))
    if not (f_lo > 0 and det2(sym_part(PATH_A @ path_b(hi))) < 0):
        raise PreconditionError("no sign change of det(sym(A B_t)) on [0, 1]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if det2(sym_part(PATH_A @ path_b(mid))) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
