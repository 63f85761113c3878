"""Primary matrix functions on symmetric matrices and their Fréchet derivatives.

A scalar function ``f`` on an open interval ``I`` induces
``f(A) = Q.T @ diag(f(lam)) @ Q`` on the symmetric matrices with spectrum in
``I``.  Its derivative is realized in the eigenbasis of ``A`` by first divided
differences (Daleckii-Krein form)::

    Df[A].H = Q.T @ (Phi * (Q @ H @ Q.T)) @ Q,
    Phi_ij = (f(l_i) - f(l_j)) / (l_i - l_j)   or   f'((l_i + l_j) / 2)

and cross-checked against quadrature of the integral representations of the
derivatives of ``exp`` and ``log``.
"""

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.special

from .exceptions import ConfigurationError, DomainError, NumericalError, PreconditionError
from .operator import SymOperator, symmetrized
from .symcore import eig, inner, sym_basis
from .validation import check_sym

SELF_ADJOINT_TOL = 1e-9


@dataclass(frozen=True)
class ScalarFunction:
    """Scalar map with derivative, optional antiderivative and open domain ``(lo, hi)``.

    ``f``, ``df`` and ``F`` must accept numpy arrays.
    """

    name: str
    f: Callable
    df: Callable
    F: Callable | None = None
    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigurationError(f"empty domain ({self.lo}, {self.hi}) for {self.name}")

    def __repr__(self):
        return f"ScalarFunction({self.name!r}, domain=({self.lo}, {self.hi}))"

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    def check_domain(self, lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        bad = ~self.contains(lam)
        if np.any(bad):
            value = float(lam[np.argmax(bad)])
            raise DomainError(
                f"eigenvalue {value!r} lies outside the domain ({self.lo}, {self.hi}) of {self.name}",
                value=value,
            )

    @property
    def has_antiderivative(self):
        return self.F is not None


def _xlogx_minus_x(t):
    t = np.asarray(t, dtype=float)
    return t * np.log(t) - t


def _softplus_antiderivative(t):
    # d/dt [-Li2(-e^t)] = log(1 + e^t);  Li2(z) = spence(1 - z)
    return -scipy.special.spence(1.0 + np.exp(t))


BUILTINS = {
    fn.name: fn
    for fn in [
        ScalarFunction("exp", np.exp, np.exp, np.exp),
        ScalarFunction("log", np.log, np.reciprocal, _xlogx_minus_x, lo=0.0),
        ScalarFunction("square", np.square, lambda t: 2.0 * t, lambda t: t**3 / 3.0),
        ScalarFunction("cube", lambda t: t**3, lambda t: 3.0 * t**2, lambda t: t**4 / 4.0),
        ScalarFunction("id", lambda t: 1.0 * t, np.ones_like, lambda t: 0.5 * t**2),
        ScalarFunction(
            "cubic-mono",
            lambda t: t + t**3 / 3.0,
            lambda t: 1.0 + t**2,
            lambda t: 0.5 * t**2 + t**4 / 12.0,
        ),
        ScalarFunction(
            "softplus",
            lambda t: np.logaddexp(0.0, t),
            scipy.special.expit,
            _softplus_antiderivative,
        ),
    ]
}


def get_function(fn):
    """Look up a built-in scalar function by name (instances pass through)."""
    if isinstance(fn, ScalarFunction):
        return fn
    try:
        return BUILTINS[fn]
    except KeyError:
        raise ConfigurationError(
            f"unknown scalar function {fn!r}; known: {', '.join(sorted(BUILTINS))}"
        ) from None


@dataclass(frozen=True)
class DifferencingSpec:
    """Numerical knobs for derivative construction.

    tau_eig : relative gap below which two eigenvalues count as coincident.
    order : Gauss-Legendre order for the integral representations.
    """

    tau_eig: float = 1e-8
    order: int = 32

    def __post_init__(self):
        if not self.tau_eig > 0:
            raise ConfigurationError("tau_eig must be positive")
        if self.order < 2:
            raise ConfigurationError("quadrature order must be at least 2")


DEFAULT_SPEC = DifferencingSpec()


@functools.lru_cache(maxsize=None)
def gauss_legendre_01(order):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _decompose(fn, a):
    fn = get_function(fn)
    dec = eig(a)
    fn.check_domain(dec.lam)
    return fn, dec


def apply_primary(fn, a):
    """Evaluate the primary matrix function ``fn(a)``."""
    fn, dec = _decompose(fn, a)
    values = np.asarray(fn.f(dec.lam), dtype=float)
    return dec.q.T @ (values[:, None] * dec.q)


def divided_differences(fn, lam, tau_eig=DEFAULT_SPEC.tau_eig):
    """First divided-difference matrix of ``fn`` on the spectrum ``lam``.

    Pairs closer than ``tau_eig * max(1, |lam|_max)`` use ``f'`` at the midpoint.
    """
    fn = get_function(fn)
    lam = np.asarray(lam, dtype=float)
    scale = max(1.0, float(np.max(np.abs(lam))))
    li, lj = lam[:, None], lam[None, :]
    gap = li - lj
    near = np.abs(gap) <= tau_eig * scale
    fv = np.asarray(fn.f(lam), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = (fv[:, None] - fv[None, :]) / gap
    midpoint = np.asarray(fn.df(0.5 * (li + lj)), dtype=float) * np.ones_like(gap)
    return np.where(near, midpoint, quotient)


def frechet(fn, a, spec=DEFAULT_SPEC):
    """Fréchet derivative ``Df[a]`` as a :class:`SymOperator`.

    The operator matrix is assembled by applying the divided-difference formula
    to every basis element and projecting back.  It is returned symmetrized;
    the relative asymmetry before symmetrization is kept in
    ``presym_asymmetry`` and must not exceed 1e-9.
    """
    fn, dec = _decompose(fn, a)
    n = dec.q.shape[0]
    phi = divided_differences(fn, dec.lam, spec.tau_eig)
    basis = sym_basis(n)
    q = dec.q
    rotated = q @ basis.elements @ q.T
    images = q.T @ (phi * rotated) @ q
    mat = basis.coords(images).T
    op = symmetrized(n, mat, label=f"D{fn.name}")
    if op.presym_asymmetry > SELF_ADJOINT_TOL:
        raise NumericalError(
            f"derivative of {fn.name} failed the self-adjointness certificate "
            f"(asymmetry {op.presym_asymmetry:.3e})",
            residual=op.presym_asymmetry,
        )
    return op


def frechet_apply(fn, a, h, spec=DEFAULT_SPEC):
    """Directional derivative ``Df[a].h`` without assembling the operator."""
    fn, dec = _decompose(fn, a)
    h = check_sym(h, name="h")
    phi = divided_differences(fn, dec.lam, spec.tau_eig)
    q = dec.q
    return q.T @ (phi * (q @ h @ q.T)) @ q


def frechet_exp_integral(a, spec=DEFAULT_SPEC):
    """``Dexp[a]`` by Gauss-Legendre quadrature of ``int_0^1 e^{sA} H e^{(1-s)A} ds``.

    Exponentials come from :func:`scipy.linalg.expm`, independent of the
    eigen-route used by :func:`frechet`.
    """
    a = check_sym(a)
    n = a.shape[0]
    nodes, weights = gauss_legendre_01(spec.order)
    basis = sym_basis(n)
    images = np.zeros_like(basis.elements)
    for s, w in zip(nodes, weights):
        left = scipy.linalg.expm(s * a)
        right = scipy.linalg.expm((1.0 - s) * a)
        images += w * (left @ basis.elements @ right)
    return symmetrized(n, basis.coords(images).T, label="Dexp[quad]")


def frechet_log_integral(a, spec=DEFAULT_SPEC):
    """``Dlog[a]`` by quadrature of ``int_0^1 R_t H R_t dt``, ``R_t = (t(A - I) + I)^{-1}``.

    The integral is evaluated for ``cA`` with ``c = 1/sqrt(lam_min lam_max)``
    and rescaled via ``Dlog[A] = c Dlog[cA]``.  Centering the spectrum on 1
    keeps the integrand's poles ``t = 1/(1 - c lam)`` away from ``[0, 1]``.
    """
    a = check_sym(a)
    lam = eig(a).lam
    lam_min = float(lam[0])
    if not lam_min > 0:
        raise DomainError(f"log requires a positive definite argument (eigenvalue {lam_min!r})", value=lam_min)
    c = 1.0 / math.sqrt(lam_min * float(lam[-1]))
    a = c * a
    n = a.shape[0]
    eye = np.eye(n)
    nodes, weights = gauss_legendre_01(spec.order)
    basis = sym_basis(n)
    images = np.zeros_like(basis.elements)
    for t, w in zip(nodes, weights):
        r = np.linalg.inv(t * (a - eye) + eye)
        images += w * (r @ basis.elements @ r)
    return symmetrized(n, c * basis.coords(images).T, label="Dlog[quad]")


def _require_antiderivative(fn):
    fn = get_function(fn)
    if fn.F is None:
        raise ConfigurationError(f"{fn.name} has no registered antiderivative")
    return fn


def potential_value(fn, a):
    """Valanis-Landel potential ``W(a) = sum_i F(lam_i(a)) = tr F(a)``."""
    fn = _require_antiderivative(fn)
    lam = eig(a).lam
    fn.check_domain(lam)
    return float(np.sum(fn.F(lam)))


def pseudo_potential(fn, a, spec=DEFAULT_SPEC):
    """Quadrature of ``int_0^1 <f(tA), A> dt``.

    For an antiderivative ``F`` this equals ``sum_i F(lam_i) - n F(0)``.
    Requires ``0`` in the domain of ``fn``.
    """
    fn = get_function(fn)
    a = check_sym(a)
    if not fn.contains(0.0):
        raise DomainError(f"0 is outside the domain of {fn.name}", value=0.0)
    nodes, weights = gauss_legendre_01(spec.order)
    return float(sum(w * inner(apply_primary(fn, t * a), a) for t, w in zip(nodes, weights)))


@dataclass(frozen=True)
class GradientCheck:
    """Central-difference check of ``DW[A].H = <f(A), H>`` over all basis directions.

    ``ratio`` is ``deviation / deviation_half``; it is ``None`` when the
    halved-step deviation is already at the rounding floor (``exact``).
    """

    h: float
    deviation: float
    deviation_half: float
    noise_floor: float
    ratio: float | None

    @property
    def exact(self):
        return self.ratio is None


def _gradient_deviation(fn, a, h):
    fa = apply_primary(fn, a)
    worst = 0.0
    for e in sym_basis(a.shape[0]).elements:
        fd = (potential_value(fn, a + h * e) - potential_value(fn, a - h * e)) / (2.0 * h)
        worst = max(worst, abs(fd - inner(fa, e)))
    return worst


def potential_gradient_check(fn, a, h=1e-2):
    """Verify the potential gradient identity with steps ``h`` and ``h/2``."""
    if not h > 0:
        raise PreconditionError("h must be positive")
    fn = _require_antiderivative(fn)
    a = check_sym(a)
    dev_h = _gradient_deviation(fn, a, h)
    dev_h2 = _gradient_deviation(fn, a, 0.5 * h)
    w_scale = max(1.0, abs(potential_value(fn, a)))
    floor = 64.0 * np.finfo(float).eps * w_scale / (0.5 * h)
    ratio = None if dev_h2 <= floor else dev_h / dev_h2
    return GradientCheck(h=h, deviation=dev_h, deviation_half=dev_h2, noise_floor=floor, ratio=ratio)
