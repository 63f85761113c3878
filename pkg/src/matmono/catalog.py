"""Named golden computations with closed-form expected values.

Every entry recomputes its quantity from scratch; nothing here is random
except the pseudo-potential rows, which use a pinned seed.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .appendix import det_derivative_identity_direction, det_derivative_identity_direction_fd
from .jogcalc import PATH_A, det2, locate_sym_pd_crossing, path_b
from .monocheck import DEFAULT_SEED, det_identity, det_identity_derivative
from .primfn import BUILTINS, frechet, frechet_apply, pseudo_potential
from .symcore import cof, inner, sym_part

SKEW_ALPHAS = tuple(np.linspace(0.0, 2.0 * math.pi, 11).tolist())


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    expected: float
    computed: float
    tol: float = 1e-9

    @property
    def error(self):
        return abs(self.computed - self.expected)

    @property
    def ok(self):
        return self.error <= self.tol

    def to_dict(self):
        return {
            "name": self.name,
            "expected": self.expected,
            "computed": self.computed,
            "abs_err": self.error,
            "tol": self.tol,
            "ok": self.ok,
        }


def skew(alpha):
    return np.array([[0.0, -alpha], [alpha, 0.0]])


def skew_exp_inner(alpha):
    """``<exp(K) - exp(-K), 2K>`` for the 2x2 skew matrix ``K`` with angle ``alpha``."""
    k = skew(alpha)
    return inner(expm(k) - expm(-k), 2.0 * k)


def det_hmon_value(n=2):
    """``<g(B) - g(A), B - A>`` for ``A = diag(3, 2, 1...)`` and ``B = diag(5, 1, 1...)``."""
    a = np.diag([3.0, 2.0] + [1.0] * (n - 2))
    b = np.diag([5.0, 1.0] + [1.0] * (n - 2))
    return inner(det_identity(b) - det_identity(a), b - a)


def det_derivative_asymmetry_value():
    """``<Dg[C].H, Ht> - <H, Dg[C].Ht>`` at ``C = diag(3, 2)``, ``H = diag(1, 0)``, ``Ht = diag(0, 1)``."""
    c = np.diag([3.0, 2.0])
    h, ht = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    op = det_identity_derivative(c)
    return inner(op.apply(h), ht) - inner(h, op.apply(ht))


def square_derivative_error(seed=DEFAULT_SEED, n=3):
    """``||Dsquare[A].H - (AH + HA)||`` for seeded symmetric ``A`` and ``H``."""
    rng = np.random.default_rng(seed)
    a = sym_part(rng.standard_normal((n, n)))
    h = sym_part(rng.standard_normal((n, n)))
    return float(np.linalg.norm(frechet_apply("square", a, h) - (a @ h + h @ a)))


def identity_derivative_error(fn):
    """``max |Df[I] - f'(1) Id|`` over operator entries."""
    op = frechet(fn, np.eye(3))
    return float(np.max(np.abs(op.mat - BUILTINS[fn].df(1.0) * np.eye(op.m))))


def pseudo_potential_error(fn, count=20, seed=DEFAULT_SEED, n=3):
    """Worst ``|quadrature - (sum F(lam) - n F(0))|`` over seeded symmetric matrices."""
    f = BUILTINS[fn]
    worst = 0.0
    for i in range(count):
        a = sym_part(np.random.default_rng([seed, i]).standard_normal((n, n)))
        lam = np.linalg.eigvalsh(a)
        closed = float(np.sum(f.F(lam)) - n * f.F(0.0))
        worst = max(worst, abs(pseudo_potential(f, a) - closed))
    return worst


def counterexample_catalog():
    """The counterexamples and closed-form values, recomputed."""
    rows = [CatalogEntry("skew-exp alpha=3pi/2", -12.0 * math.pi, skew_exp_inner(1.5 * math.pi))]
    for i, alpha in enumerate(SKEW_ALPHAS):
        rows.append(CatalogEntry(f"skew-exp grid[{i}]", 8.0 * alpha * math.sin(alpha), skew_exp_inner(alpha)))
    for n in (2, 3, 4):
        rows.append(CatalogEntry(f"det-H-mon n={n}", -1.0, det_hmon_value(n)))
    rows.append(CatalogEntry("det-derivative-asymmetry", -1.0, det_derivative_asymmetry_value()))
    rows.append(CatalogEntry("det-sym-AB1", -0.125, det2(sym_part(PATH_A @ path_b(1.0)))))
    for t in np.linspace(0.0, 1.0, 11).tolist():
        rows.append(CatalogEntry(f"det-AB t={t:.1f}", 0.125, det2(PATH_A @ path_b(t))))
    return rows


def golden_table():
    """Catalog plus derivative, potential and path rows."""
    rows = counterexample_catalog()
    rows.append(CatalogEntry("Ddet[diag(2,3,5)].I formula", 31.0, det_derivative_identity_direction([2, 3, 5])))
    rows.append(
        CatalogEntry("Ddet[diag(2,3,5)].I central-diff", 31.0, det_derivative_identity_direction_fd([2, 3, 5]), 1e-6)
    )
    rows.append(CatalogEntry("tr Cof(I_3)", 3.0, float(np.trace(cof(np.eye(3))))))
    for fn in ("exp", "log", "square", "cube", "cubic-mono"):
        rows.append(CatalogEntry(f"Df[I] - f'(1) Id, {fn}", 0.0, identity_derivative_error(fn), 1e-12))
    rows.append(CatalogEntry("Dsquare[A].H - (AH+HA)", 0.0, square_derivative_error(), 1e-12))
    rows.append(CatalogEntry("pseudo-potential t^2/2", 0.0, pseudo_potential_error("id"), 1e-7))
    rows.append(CatalogEntry("pseudo-potential exp", 0.0, pseudo_potential_error("exp"), 1e-7))
    rows.append(CatalogEntry("path t*", 1.0 / math.sqrt(2.0), locate_sym_pd_crossing(), 1e-12))
    return rows
