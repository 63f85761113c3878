"""Stress responses of Hencky-type energies and the true-stress-true-strain check.

All stresses are functions of the logarithmic strain ``L = log V``::

    hencky      W = mu ||dev L||^2 + kappa/2 (tr L)^2
    tsts        W = mu/k exp(k ||L||^2) + lambda/(2 k_hat) exp(k_hat (tr L)^2)
    exp-hencky  W = mu/k exp(k ||dev L||^2) + kappa/(2 k_hat) exp(k_hat (tr L)^2)

Kirchhoff stress ``tau = dW/dL`` and Cauchy stress ``sigma = exp(-tr L) tau``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .monocheck import HMON, PSYM, SYM, MatrixMap, SampleSpec, Witness, _Collector, hmon_margin
from .operator import SymOperator, fd_operator
from .primfn import apply_primary
from .symcore import dev, eig, inner, is_positive_definite, norm, sym_basis
from .validation import check_sym

MODELS = ("hencky", "tsts", "exp-hencky")
_ALIASES = {"Hencky": "hencky", "TSTS": "tsts", "TSTSExp": "tsts", "ExpHencky": "exp-hencky", "eH": "exp-hencky"}


@dataclass(frozen=True)
class MaterialParams:
    mu: float
    kappa: float | None = None
    lam: float | None = None
    k: float | None = None
    k_hat: float | None = None
    sigma_y: float | None = None


@dataclass(frozen=True)
class StressModel:
    """A named energy with validated parameters.

    Raises ``ConfigurationError`` naming the violated constraint.
    """

    name: str
    params: MaterialParams

    def __post_init__(self):
        name = _ALIASES.get(self.name, self.name)
        object.__setattr__(self, "name", name)
        if name not in MODELS:
            raise ConfigurationError(f"unknown model {self.name!r}; known: {', '.join(MODELS)}")
        p = self.params
        _require(p.mu is not None and p.mu > 0, "mu must be positive")
        if name == "hencky":
            _require(p.kappa is not None and p.kappa > 0, "kappa must be positive")
        elif name == "tsts":
            _require(p.lam is not None and math.isfinite(p.lam), "lambda must be given")
            _require(p.k is not None and p.k > 3 / 8, "k must exceed 3/8")
            _require(p.k_hat is not None and p.k_hat > 1 / 8, "k_hat must exceed 1/8")
        else:
            _require(p.kappa is not None and p.kappa > 0, "kappa must be positive")
            _require(p.k is not None and p.k > 1 / 3, "k must exceed 1/3")
            _require(p.k_hat is not None and p.k_hat > 1 / 8, "k_hat must exceed 1/8")
        if p.sigma_y is not None:
            _require(p.sigma_y >= 0, "sigma_y must be non-negative")

    @classmethod
    def create(cls, name, **params):
        return cls(name, MaterialParams(**params))

    @classmethod
    def from_config(cls, config):
        """Build from ``{model, mu, kappa?, lambda?, k?, k_hat?, sigma_y?}``."""
        config = dict(config)
        try:
            name = config.pop("model")
        except KeyError:
            raise ConfigurationError("model configuration needs a 'model' field") from None
        if "lambda" in config:
            config["lam"] = config.pop("lambda")
        unknown = set(config) - set(MaterialParams.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown model parameters: {', '.join(sorted(unknown))}")
        try:
            params = MaterialParams(**{k: float(v) for k, v in config.items()})
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from None
        return cls(name, params)

    def to_dict(self):
        p = self.params
        d = {"model": self.name, "mu": p.mu, "kappa": p.kappa, "lambda": p.lam,
             "k": p.k, "k_hat": p.k_hat, "sigma_y": p.sigma_y}
        return {k: v for k, v in d.items() if v is not None}

    # -- closed forms in L = log V -------------------------------------------

    def energy_log(self, l):
        p = self.params
        t = float(np.trace(l))
        if self.name == "hencky":
            return p.mu * inner(dev(l), dev(l)) + 0.5 * p.kappa * t * t
        if self.name == "tsts":
            return p.mu / p.k * math.exp(p.k * inner(l, l)) + p.lam / (2 * p.k_hat) * math.exp(p.k_hat * t * t)
        d = dev(l)
        return p.mu / p.k * math.exp(p.k * inner(d, d)) + p.kappa / (2 * p.k_hat) * math.exp(p.k_hat * t * t)

    def kirchhoff_log(self, l):
        p = self.params
        n = l.shape[0]
        t = float(np.trace(l))
        eye = np.eye(n)
        if self.name == "hencky":
            return 2 * p.mu * dev(l) + p.kappa * t * eye
        if self.name == "tsts":
            return 2 * p.mu * math.exp(p.k * inner(l, l)) * l + p.lam * t * math.exp(p.k_hat * t * t) * eye
        d = dev(l)
        return 2 * p.mu * math.exp(p.k * inner(d, d)) * d + p.kappa * t * math.exp(p.k_hat * t * t) * eye

    def cauchy_log(self, l):
        """``sigma_hat(L) = exp(-tr L) tau(L)``."""
        return math.exp(-float(np.trace(l))) * self.kirchhoff_log(l)


def _require(cond, message):
    if not cond:
        raise ConfigurationError(message)


def _model(model):
    if isinstance(model, StressModel):
        return model
    if isinstance(model, dict):
        return StressModel.from_config(model)
    raise ConfigurationError(f"expected a StressModel or config dict, got {type(model).__name__}")


@dataclass(frozen=True, eq=False)
class StrainState:
    """Left stretch ``V`` (positive definite) together with ``log V``."""

    v: np.ndarray
    logv: np.ndarray

    def __post_init__(self):
        v = check_sym(self.v, name="v")
        logv = check_sym(self.logv, name="logv")
        if v.shape != logv.shape:
            raise ConfigurationError("v and logv have different shapes")
        if not is_positive_definite(v):
            raise DomainError("V must be positive definite")
        if norm(apply_primary("exp", logv) - v) > 1e-9 * (1.0 + norm(v)):
            raise ConfigurationError("logv is not the logarithm of v")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "logv", logv)

    @classmethod
    def from_stretch(cls, v):
        v = check_sym(v, name="v")
        return cls(v, apply_primary("log", v))

    @classmethod
    def from_log(cls, logv):
        logv = check_sym(logv, name="logv")
        return cls(apply_primary("exp", logv), logv)

    @property
    def n(self):
        return self.v.shape[0]

    @property
    def det_v(self):
        return math.exp(float(np.trace(self.logv)))


def energy(model, state):
    return _model(model).energy_log(state.logv)


def kirchhoff_stress(model, state):
    """``tau = dW/d(log V)``; for Hencky ``2 mu dev log V + kappa tr(log V) I``."""
    return _model(model).kirchhoff_log(state.logv)


def cauchy_stress(model, state):
    """``sigma = exp(-tr log V) tau``."""
    return _model(model).cauchy_log(state.logv)


def cauchy_stress_of_stretch(model, v):
    """``V -> sigma(V)``, routed through ``log V``."""
    return _model(model).cauchy_log(apply_primary("log", v))


def fd_step(logv):
    return 1e-5 * max(1.0, norm(logv))


@dataclass(frozen=True)
class TstsOperator:
    """Finite-difference derivative of ``L -> sigma_hat(L)`` and its self-adjoint part."""

    operator: SymOperator
    raw: SymOperator
    asymmetry: float
    h: float

    @property
    def lambda_min(self):
        return self.operator.lambda_min

    @property
    def positive_definite(self):
        return self.lambda_min > 0


def tsts_operator(model, state, h=None):
    """``sym D sigma_hat[log V]`` by central differences in every basis direction.

    The derivative itself is generally *not* self-adjoint:
    ``D sigma_hat[L].H = exp(-tr L) (D tau[L].H - tr(H) tau(L))`` and the
    rank-one term ``-tau (x) I`` is symmetric only when ``tau`` is spherical.
    ``asymmetry`` reports the relative asymmetry of the raw matrix.
    """
    model = _model(model)
    l = state.logv if isinstance(state, StrainState) else check_sym(state)
    h = fd_step(l) if h is None else h
    raw = fd_operator(model.cauchy_log, l, h)
    return TstsOperator(operator=raw.sym(), raw=raw, asymmetry=raw.asymmetry, h=h)


def tsts_operator_exact_asymmetry(model, state):
    """Asymmetry ``||M - M^T|| / ||M||`` predicted from ``exp(-tr L) tr(H) tau`` alone.

    Returns the numerator ``exp(-tr L) ||tau (x) I - I (x) tau||``.
    """
    model = _model(model)
    l = state.logv if isinstance(state, StrainState) else check_sym(state)
    basis = sym_basis(l.shape[0])
    tau = basis.coords(model.kirchhoff_log(l))
    one = basis.coords(np.eye(l.shape[0]))
    outer = np.outer(tau, one)
    return math.exp(-float(np.trace(l))) * float(np.linalg.norm(outer - outer.T))


def elastic_domain_contains(state, sigma_y):
    """``||dev log V||^2 <= (2/3) sigma_y^2`` (closed set)."""
    if sigma_y < 0:
        raise ConfigurationError("sigma_y must be non-negative")
    l = state.logv if isinstance(state, StrainState) else check_sym(state)
    d = dev(l)
    return bool(inner(d, d) <= 2.0 * sigma_y**2 / 3.0)


def stress_map(model, parametrization="log"):
    """The model's Cauchy stress as a :class:`MatrixMap` of ``log V`` (or of ``V``)."""
    model = _model(model)
    if parametrization == "log":
        return MatrixMap(f"sigma[{model.name}](log V)", model.cauchy_log, SYM)
    if parametrization == "stretch":
        return MatrixMap(f"sigma[{model.name}](V)", lambda v: cauchy_stress_of_stretch(model, v), PSYM)
    raise ConfigurationError(f"unknown parametrization {parametrization!r}")


def _sample_log_strain(rng, n, scale, sigma_y):
    g = rng.standard_normal((n, n))
    x = scale * 0.5 * (g + g.T)
    if sigma_y is None:
        return x
    # shrink the deviatoric part radially into the closed ball ||dev X||^2 <= 2/3 sigma_y^2
    radius = math.sqrt(2.0 / 3.0) * sigma_y
    d = dev(x)
    nd = norm(d)
    if nd > 0:
        target = radius * rng.uniform() ** (1.0 / max(1, n * (n + 1) // 2 - 1))
        x = x - d + d * min(1.0, target / nd)
    return x


def tsts_scan(model, spec=None, *, domain="sym", sigma_y=None, max_witnesses=16):
    """Pairwise H-mon scan of ``log V -> sigma(log V)`` (the TSTS-M+ condition).

    ``domain="elastic"`` restricts both samples to the elastic domain with
    yield stress ``sigma_y`` (default: the model's ``sigma_y``).
    """
    model = _model(model)
    spec = spec or SampleSpec(n=3)
    if domain == "elastic":
        sigma_y = sigma_y if sigma_y is not None else model.params.sigma_y
        if sigma_y is None:
            raise ConfigurationError("elastic domain needs sigma_y")
    elif domain == "sym":
        sigma_y = None
    else:
        raise ConfigurationError(f"unknown domain {domain!r}")
    fmap = stress_map(model)
    out = _Collector(max_witnesses)
    for i in range(spec.count):
        rng = spec.rng(i)
        x = _sample_log_strain(rng, spec.n, spec.scale, sigma_y)
        y = _sample_log_strain(rng, spec.n, spec.scale, sigma_y)
        margin, band = hmon_margin(fmap, x, y)
        out.add(margin, band, x, y)
    extra = {"model": model.to_dict(), "domain": domain}
    if sigma_y is not None:
        extra["sigma_y"] = sigma_y
    return out.report(HMON, fmap.name, spec.n, spec.seed, **extra)


def hill_check(model, spec=None, *, parametrization="log", max_witnesses=16):
    """H-mon scan of the Kirchhoff stress as a function of ``log V`` (Hill's inequality).

    ``parametrization="stretch"`` scans ``V -> tau(V)`` instead, which is not
    monotone in general.
    """
    model = _model(model)
    if model.name != "hencky":
        raise ConfigurationError("Hill's inequality check is defined for the Hencky model")
    spec = spec or SampleSpec(n=3)
    if parametrization == "log":
        fmap = MatrixMap("tau[hencky](log V)", model.kirchhoff_log, SYM)
    elif parametrization == "stretch":
        fmap = MatrixMap("tau[hencky](V)", lambda v: model.kirchhoff_log(apply_primary("log", v)), PSYM)
    else:
        raise ConfigurationError(f"unknown parametrization {parametrization!r}")
    out = _Collector(max_witnesses)
    for i in range(spec.count):
        rng = spec.rng(i)
        a = fmap.domain.sample(rng, spec.n, spec.scale)
        b = fmap.domain.sample(rng, spec.n, spec.scale)
        margin, band = hmon_margin(fmap, a, b)
        out.add(margin, band, a, b)
    return out.report(HMON, fmap.name, spec.n, spec.seed, model=model.to_dict())


def hill_margin_bound(model, n):
    """Lower bound ``min(2 mu, n kappa)`` of the Hill margin of the Hencky model."""
    p = _model(model).params
    return min(2 * p.mu, n * p.kappa)


@dataclass(frozen=True)
class GridSearchResult:
    """Outcome of :func:`hencky_violation_search`.

    ``crossing`` is the (shear, dilation) point where ``lambda_min`` of the
    symmetrized derivative changes sign, located by bisection in the
    dilation; ``witness`` is a pair around a point with negative
    ``lambda_min``.
    """

    shear: float
    dilation: float
    lambda_min: float
    crossing: tuple
    witness: Witness


def _grid_state(n, shear, dilation):
    shape = np.zeros(n)
    shape[0], shape[1] = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
    return np.diag(shear * shape + dilation)


def hencky_violation_search(model, n=3, shears=None, dilations=None, eps=1e-3, bisect_tol=1e-12):
    """Deterministic search for a TSTS-M+ violation of the given model.

    Scans ``lambda_min(sym D sigma_hat[L])`` on a grid of states
    ``L = shear * diag(1, -1, 0)/sqrt(2) + dilation * I``.  At the first
    grid point (shear-major, dilation ascending) with negative value the sign
    change is bisected in the dilation, and the witness pair is
    ``L +- eps * E`` with ``E`` the eigen-direction of the most negative
    eigenvalue.
    """
    model = _model(model)
    shears = np.linspace(0.0, 1.0, 5) if shears is None else np.asarray(shears, dtype=float)
    dilations = np.linspace(-1.0, 1.0, 21) if dilations is None else np.asarray(dilations, dtype=float)
    basis = sym_basis(n)
    fmap = stress_map(model)

    def lam_min(s, d):
        return tsts_operator(model, _grid_state(n, s, d)).lambda_min

    for s in shears:
        prev_d, prev_v = None, None
        for d in dilations:
            value = lam_min(s, d)
            if value < 0:
                lo, hi = (prev_d, d) if prev_d is not None and prev_v > 0 else (d, d)
                while hi - lo > bisect_tol:
                    mid = 0.5 * (lo + hi)
                    if lam_min(s, mid) < 0:
                        hi = mid
                    else:
                        lo = mid
                l = _grid_state(n, s, d)
                op = tsts_operator(model, l).operator
                w, vec = np.linalg.eigh(op.mat)
                direction = basis.matrix(vec[:, 0])
                x, y = l + eps * direction, l - eps * direction
                margin = hmon_margin(fmap, x, y)[0]
                return GridSearchResult(float(s), float(d), float(w[0]), (float(s), float(0.5 * (lo + hi))),
                                        Witness(x, y, float(margin)))
            prev_d, prev_v = d, value
    return None
