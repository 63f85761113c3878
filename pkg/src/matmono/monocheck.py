"""Sampling checkers for four monotonicity notions of matrix maps.

Notions (strict forms)::

    H-mon  <f(B) - f(A), B - A> > 0                      for A != B
    O-mon  B - A positive definite  =>  f(B) - f(A) positive definite
    P-mon  <f(A + H) - f(A), H> > 0                      for H positive definite
    S-mon  b > a  =>  f(b) > f(a)                        (scalar-induced maps only)

Sampling cannot prove monotonicity.  A recorded violation is exact and
replayable from its stored witness; a clean pass is only evidence.

Every sample ``i`` draws from its own generator ``default_rng([seed, i])`` so
reports do not depend on evaluation order.
"""

import json
import math
from importlib import resources
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.optimize

from .exceptions import ConfigurationError, DomainError, PreconditionError
from .operator import SymOperator
from .primfn import ScalarFunction, apply_primary, frechet, get_function
from .symcore import cof, eig, inner, norm, sym_basis

DEFAULT_SEED = 0xC0FFEE
BOUNDARY_TOL = 1e-10
MAX_RESAMPLE = 100
MAX_WITNESSES = 16

HMON, OMON, SMON, PMON = "H-mon", "O-mon", "S-mon", "P-mon"
NOTIONS = (HMON, OMON, SMON, PMON)


@dataclass(frozen=True)
class Domain:
    """Spectral domain ``S_(lo, hi)``: symmetric matrices with eigenvalues in ``(lo, hi)``."""

    lo: float = -math.inf
    hi: float = math.inf
    name: str = ""

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError(f"empty interval ({self.lo}, {self.hi})")
        if not self.name:
            object.__setattr__(self, "name", f"S({self.lo},{self.hi})")

    @property
    def is_full(self):
        return self.lo == -math.inf and self.hi == math.inf

    def contains(self, a):
        lam = eig(a).lam
        return bool(lam[0] > self.lo and lam[-1] < self.hi)

    def _from_line(self, x):
        # bijection R -> (lo, hi)
        lo, hi = self.lo, self.hi
        if lo == -math.inf and hi == math.inf:
            return x
        if hi == math.inf:
            return lo + np.exp(x)
        if lo == -math.inf:
            return hi - np.exp(-x)
        return lo + (hi - lo) / (1.0 + np.exp(-x))

    def sample(self, rng, n, scale=1.0):
        """Random element: Gaussian symmetric ``S`` pushed through ``R -> (lo, hi)``.

        For ``PSym`` this is ``exp(S)``.
        """
        g = rng.standard_normal((n, n))
        s = scale * 0.5 * (g + g.T)
        if self.is_full:
            return s
        if self.lo == 0.0 and self.hi == math.inf:
            return apply_primary("exp", s)
        dec = eig(s)
        vals = self._from_line(dec.lam)
        return dec.q.T @ (vals[:, None] * dec.q)

    def grid(self, size=401):
        """Sorted scalar grid inside the interval (for S-mon)."""
        lo, hi = self.lo, self.hi
        if self.is_full:
            return np.linspace(-10.0, 10.0, size)
        if lo == 0.0 and hi == math.inf:
            return np.geomspace(1e-4, 1e4, size)
        return self._from_line(np.linspace(-10.0, 10.0, size))

    def to_dict(self):
        return {"name": self.name, "lo": self.lo, "hi": self.hi}


SYM = Domain(name="Sym")
PSYM = Domain(lo=0.0, name="PSym")


def random_pd(rng, n, scale=1.0):
    """``M M^T + delta I`` with Gaussian ``M`` and ``delta = 1e-6 ||M M^T||``."""
    m = scale * rng.standard_normal((n, n))
    p = m @ m.T
    return p + 1e-6 * norm(p) * np.eye(n)


@dataclass(frozen=True)
class MatrixMap:
    """A map ``Sym(n) -> Sym(n)`` with its sampling domain.

    ``fn`` is set for primary matrix functions (kind ``primary``) and is what
    makes S-mon applicable.
    """

    name: str
    func: Callable
    domain: Domain = SYM
    fn: ScalarFunction | None = None

    @property
    def kind(self):
        return "primary" if self.fn is not None else "general"

    def __call__(self, a):
        return self.func(a)

    @classmethod
    def primary(cls, fn, domain=None, name=None):
        fn = get_function(fn)
        if domain is None:
            domain = Domain(fn.lo, fn.hi, name="PSym" if (fn.lo, fn.hi) == (0.0, math.inf) else "")
        return cls(name or fn.name, lambda a, _fn=fn: apply_primary(_fn, a), domain, fn)


def det_identity(c):
    """``g(C) = det(C) I`` (operator monotone on PSym, not Hilbert-space monotone)."""
    c = np.asarray(c, dtype=float)
    return np.linalg.det(c) * np.eye(c.shape[0])


def det_identity_derivative(c):
    """Closed form ``Dg[C].H = <Cof C, H> I`` as a (non-self-adjoint) operator."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    cc = cof(c)
    return SymOperator.from_map(n, lambda h: inner(cc, h) * np.eye(n), label="Ddet-identity")


MAPS = {
    "exp": MatrixMap.primary("exp", SYM),
    "log": MatrixMap.primary("log", PSYM),
    "square": MatrixMap.primary("square", PSYM),
    "cube": MatrixMap.primary("cube", SYM),
    "id": MatrixMap.primary("id", SYM),
    "cubic-mono": MatrixMap.primary("cubic-mono", SYM),
    "softplus": MatrixMap.primary("softplus", SYM),
    "det-identity": MatrixMap("det-identity", det_identity, PSYM),
}


def get_map(name):
    if isinstance(name, MatrixMap):
        return name
    try:
        return MAPS[name]
    except KeyError:
        raise ConfigurationError(f"unknown map {name!r}; known: {', '.join(sorted(MAPS))}") from None


@dataclass(frozen=True)
class SampleSpec:
    """Sampling configuration; ``domain=None`` uses the map's own domain."""

    seed: int = DEFAULT_SEED
    count: int = 1000
    scale: float = 1.0
    n: int = 2
    domain: Domain | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ConfigurationError("sample count must be at least 1")
        if not self.scale > 0:
            raise ConfigurationError("sample scale must be positive")
        if not 2 <= self.n <= 8:
            raise ConfigurationError("n must lie in 2..8")

    def rng(self, index):
        return np.random.default_rng([self.seed, index])


@dataclass(frozen=True)
class Witness:
    a: np.ndarray
    b_or_h: np.ndarray
    margin: float

    def to_dict(self):
        return {"a": np.asarray(self.a).tolist(), "b_or_h": np.asarray(self.b_or_h).tolist(), "margin": self.margin}

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["a"], dtype=float), np.asarray(d["b_or_h"], dtype=float), float(d["margin"]))


@dataclass
class MonotonicityReport:
    """Aggregate of one sampling scan.

    ``worst_margin`` is the minimum of the notion's normalized defining
    quantity.  Margins within ``+-1e-10 * scale`` count as ``boundary`` and
    are neither passes nor violations.  At most ``MAX_WITNESSES`` violation
    witnesses are stored, in sample order.
    """

    notion: str
    map: str
    n: int
    samples: int
    violations: int
    worst_margin: float
    boundary_count: int
    seed: int
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.violations == 0

    def to_dict(self):
        d = {
            "notion": self.notion,
            "map": self.map,
            "n": self.n,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "boundary_count": self.boundary_count,
            "seed": self.seed,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }
        d.update(self.extra)
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


class _Collector:
    def __init__(self, max_witnesses):
        self.max_witnesses = max_witnesses
        self.margins = []
        self.violations = 0
        self.boundary = 0
        self.witnesses = []

    def add(self, margin, band, a, b):
        self.margins.append(margin)
        if margin < -band:
            self.violations += 1
            if len(self.witnesses) < self.max_witnesses:
                self.witnesses.append(Witness(np.array(a), np.array(b), float(margin)))
        elif margin <= band:
            self.boundary += 1

    def report(self, notion, name, n, seed, **extra):
        return MonotonicityReport(
            notion=notion,
            map=name,
            n=n,
            samples=len(self.margins),
            violations=self.violations,
            worst_margin=float(min(self.margins)),
            boundary_count=self.boundary,
            seed=seed,
            witnesses=self.witnesses,
            extra=extra,
        )


def _spec(spec):
    return spec if spec is not None else SampleSpec()


def _domain(fmap, spec):
    return spec.domain if spec.domain is not None else fmap.domain


def hmon_margin(fmap, a, b):
    """``<f(B) - f(A), B - A> / ||B - A||^2`` and its boundary band."""
    d = b - a
    df = fmap(b) - fmap(a)
    dd = inner(d, d)
    return inner(df, d) / dd, BOUNDARY_TOL * max(1.0, norm(df) / math.sqrt(dd))


def omon_margin(fmap, a, p):
    """``lambda_min(f(A + P) - f(A)) / ||P||`` and its boundary band."""
    df = fmap(a + p) - fmap(a)
    np_ = norm(p)
    return float(eig(df).lam[0]) / np_, BOUNDARY_TOL * max(1.0, norm(df) / np_)


def pmon_margin(fmap, a, h):
    """``<f(A + H) - f(A), H> / ||H||^2`` and its boundary band."""
    df = fmap(a + h) - fmap(a)
    hh = inner(h, h)
    return inner(df, h) / hh, BOUNDARY_TOL * max(1.0, norm(df) / math.sqrt(hh))


MARGINS = {HMON: hmon_margin, OMON: omon_margin, PMON: pmon_margin}


def _sample_pair(notion, domain, rng, n, scale):
    for _ in range(MAX_RESAMPLE):
        a = domain.sample(rng, n, scale)
        if notion == HMON:
            b = domain.sample(rng, n, scale)
            if np.array_equal(a, b):
                continue
            return a, b
        p = random_pd(rng, n, scale)
        if domain.is_full or domain.contains(a + p):
            return a, p
    raise DomainError(f"could not draw a {notion} sample inside {domain.name} after {MAX_RESAMPLE} tries")


def _check(notion, fmap, spec, max_witnesses):
    fmap = get_map(fmap)
    spec = _spec(spec)
    domain = _domain(fmap, spec)
    margin_fn = MARGINS[notion]
    out = _Collector(max_witnesses)
    for i in range(spec.count):
        a, b = _sample_pair(notion, domain, spec.rng(i), spec.n, spec.scale)
        margin, band = margin_fn(fmap, a, b)
        out.add(margin, band, a, b)
    return out.report(notion, fmap.name, spec.n, spec.seed)


def check_hmon(fmap, spec=None, *, max_witnesses=MAX_WITNESSES):
    """Hilbert-space monotonicity scan over random pairs ``A != B`` in the domain."""
    return _check(HMON, fmap, spec, max_witnesses)


def check_omon(fmap, spec=None, *, max_witnesses=MAX_WITNESSES):
    """Operator monotonicity scan over ``B = A + P`` with random positive definite ``P``."""
    return _check(OMON, fmap, spec, max_witnesses)


def check_pmon(fmap, spec=None, *, max_witnesses=MAX_WITNESSES):
    """P-mon scan: ``<f(A + H) - f(A), H>`` for random positive definite ``H``."""
    return _check(PMON, fmap, spec, max_witnesses)


def check_smon(fn, samples=None, *, domain=None, max_witnesses=MAX_WITNESSES):
    """Order preservation of a scalar function over all pairs of a sorted grid.

    Parameters
    ----------
    fn : ScalarFunction, str or primary MatrixMap
    samples : array_like, optional
        Points inside the domain; defaults to :meth:`Domain.grid`.
    """
    if isinstance(fn, MatrixMap):
        if fn.fn is None:
            raise PreconditionError(f"S-mon is undefined for the non-primary map {fn.name}")
        domain = domain or fn.domain
        fn = fn.fn
    fn = get_function(fn)
    domain = domain or Domain(fn.lo, fn.hi)
    x = np.sort(np.asarray(samples if samples is not None else domain.grid(), dtype=float))
    fn.check_domain(x)
    fx = np.asarray(fn.f(x), dtype=float)
    i, j = np.triu_indices(x.size, k=1)
    keep = x[j] > x[i]
    i, j = i[keep], j[keep]
    dx = x[j] - x[i]
    df = fx[j] - fx[i]
    slope = df / dx
    band = BOUNDARY_TOL * np.maximum(1.0, np.abs(slope))
    bad = np.flatnonzero(slope < -band)
    witnesses = [
        Witness(np.array([x[i[k]]]), np.array([x[j[k]]]), float(slope[k])) for k in bad[:max_witnesses]
    ]
    return MonotonicityReport(
        notion=SMON,
        map=fn.name,
        n=1,
        samples=int(slope.size),
        violations=int(bad.size),
        worst_margin=float(slope.min()),
        boundary_count=int(np.count_nonzero(np.abs(slope) <= band)),
        seed=0,
        witnesses=witnesses,
    )


def replay_witness(fmap, notion, witness):
    """Recompute the margin of a stored witness (bit-identical to the scan)."""
    fmap = get_map(fmap)
    if notion == SMON:
        a, b = float(witness.a[0]), float(witness.b_or_h[0])
        f = fmap.fn.f
        return float((f(b) - f(a)) / (b - a))
    return MARGINS[notion](fmap, np.asarray(witness.a), np.asarray(witness.b_or_h))[0]


@dataclass
class ImplicationResult:
    """Verdicts of all applicable notions for one map (``None`` = not applicable)."""

    map: str
    kind: str
    verdicts: dict
    reports: dict

    def pattern(self):
        sym = {True: "✓", False: "✗", None: "n/a"}
        return " ".join(f"{k[0]}{sym[self.verdicts[k]]}" for k in (HMON, SMON, PMON, OMON))

    def consistent(self):
        """Observed pattern does not contradict the known implications.

        O-mon pass implies P-mon pass; for primary maps S, H and P coincide.
        """
        v = self.verdicts
        if v[OMON] and not v[PMON]:
            return False
        if self.kind == "primary" and len({v[SMON], v[HMON], v[PMON]}) != 1:
            return False
        return True

    def to_dict(self):
        return {
            "map": self.map,
            "kind": self.kind,
            "verdicts": {k: v for k, v in self.verdicts.items()},
            "pattern": self.pattern(),
            "consistent": self.consistent(),
            "reports": {k: r.to_dict() for k, r in self.reports.items()},
        }


def implication_matrix(fmap, spec=None):
    """Run every applicable checker with a shared seed and summarize the pattern."""
    fmap = get_map(fmap)
    spec = _spec(spec)
    reports = {
        HMON: check_hmon(fmap, spec),
        OMON: check_omon(fmap, spec),
        PMON: check_pmon(fmap, spec),
    }
    if fmap.fn is not None:
        reports[SMON] = check_smon(fmap)
    verdicts = {k: (reports[k].passed if k in reports else None) for k in NOTIONS}
    return ImplicationResult(fmap.name, fmap.kind, verdicts, reports)


@dataclass
class CurveTrace:
    """``lambda_min`` of the self-adjoint part of an operator field along a segment.

    ``sign_change`` is True when the trace moves between the non-negative band
    ``[-band, inf)`` and strictly negative values.  ``min_abs_eig`` is the
    smallest ``|eigenvalue|`` seen anywhere (near-singularity indicator).
    """

    t: np.ndarray
    lambda_min: np.ndarray
    min_abs_eig: float
    band: float

    @property
    def sign_change(self):
        neg = self.lambda_min < -self.band
        return bool(np.any(neg) and np.any(~neg))

    @property
    def first_negative_t(self):
        neg = np.flatnonzero(self.lambda_min < -self.band)
        return float(self.t[neg[0]]) if neg.size else None

    def to_csv(self):
        lines = ["t,lambda_min"]
        lines += [f"{t!r},{v!r}" for t, v in zip(self.t.tolist(), self.lambda_min.tolist())]
        return "\n".join(lines) + "\n"


def lambda_min_along_curve(field_fn, a0, a1, steps=101):
    """Evaluate ``phi(t) = lambda_min(sym L(gamma(t)))`` on ``gamma(t) = (1-t) a0 + t a1``.

    Raises
    ------
    DomainError
        When the field cannot be evaluated at some ``t``; the error carries ``t``.
    """
    if steps < 1:
        raise PreconditionError("steps must be at least 1")
    a0 = np.asarray(a0, dtype=float)
    a1 = np.asarray(a1, dtype=float)
    ts = np.linspace(0.0, 1.0, steps) if steps > 1 else np.zeros(1)
    mins, min_abs, peak = [], math.inf, 0.0
    for t in ts:
        try:
            op = field_fn((1.0 - t) * a0 + t * a1)
        except DomainError as exc:
            err = DomainError(f"segment leaves the domain at t={float(t)!r}: {exc}", value=exc.value)
            err.t = float(t)
            raise err from exc
        ev = op.eigvals()
        mins.append(float(ev[0]))
        min_abs = min(min_abs, float(np.min(np.abs(ev))))
        peak = max(peak, float(np.max(np.abs(ev))))
    return CurveTrace(np.asarray(ts), np.asarray(mins), min_abs, BOUNDARY_TOL * max(1.0, peak))


FIELDS = {
    "dexp": lambda a: frechet("exp", a),
    "dlog": lambda a: frechet("log", a),
    "dsquare": lambda a: frechet("square", a),
    "det-identity": det_identity_derivative,
}


def search_omon_witness(fmap, n=2, seed=DEFAULT_SEED, trials=2000, scale=1.0, refine=True):
    """Seeded random search for an O-mon violation, then Nelder-Mead refinement.

    ``A`` is parametrized through its domain sampler (``exp(S)`` for PSym) and
    ``P = M M^T + 1e-6 ||M M^T|| I``; refinement keeps ``||S||_F <= 3``.
    Returns the most negative :class:`Witness` found, or ``None``.
    """
    fmap = get_map(fmap)
    domain = fmap.domain
    basis = sym_basis(n)

    def unpack(x):
        s = basis.matrix(x[: basis.m])
        m = x[basis.m :].reshape(n, n)
        if domain.is_full:
            a = s
        else:
            dec = eig(s)
            a = dec.q.T @ (domain._from_line(dec.lam)[:, None] * dec.q)
        p = m @ m.T
        return s, a, p + 1e-6 * norm(p) * np.eye(n)

    def objective(x):
        s, a, p = unpack(x)
        if norm(s) > 3.0 or norm(p) < 1e-8:
            return 1e3
        return omon_margin(fmap, a, p)[0]

    best_x, best = None, math.inf
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        x = scale * rng.standard_normal(basis.m + n * n)
        val = objective(x)
        if val < best:
            best_x, best = x, val
    if refine and best_x is not None:
        res = scipy.optimize.minimize(objective, best_x, method="Nelder-Mead",
                                      options={"maxiter": 4000, "xatol": 1e-12, "fatol": 1e-14})
        if res.fun < best:
            best_x, best = res.x, float(res.fun)
    if best_x is None or not best < 0:
        return None
    _, a, p = unpack(best_x)
    margin = omon_margin(fmap, a, p)[0]
    return Witness(a, p, float(margin))


def load_witness_fixture(name):
    """Read a persisted witness fixture ``{map, notion, seed, n, witness}`` from package data."""
    text = resources.files("matmono").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    data = json.loads(text)
    data["witness"] = Witness.from_dict(data["witness"])
    return data
