"""Derivative identities at diagonal matrices and the isotropy lemma, checked numerically."""

from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError, ShapeError
from .primfn import DEFAULT_SPEC, apply_primary, get_function, potential_value
from .symcore import eig, norm, sym_basis
from .validation import check_sym


def _diag_vector(a_diag):
    a = np.asarray(a_diag, dtype=float).ravel()
    if a.size < 1 or not np.all(np.isfinite(a)):
        raise ShapeError("expected a non-empty finite vector of diagonal entries")
    return a


def _offdiag(h_off, n):
    h = check_sym(h_off, name="h_off")
    if h.shape[0] != n:
        raise ShapeError(f"h_off has dimension {h.shape[0]}, expected {n}")
    if np.any(np.diag(h) != 0.0):
        raise PreconditionError("h_off must have a zero diagonal")
    return h


def det_derivative_identity_direction(a_diag):
    """``D det[diag(a)].I = sum_i prod_{j != i} a_j``."""
    a = _diag_vector(a_diag)
    return float(sum(np.prod(np.delete(a, i)) for i in range(a.size)))


def det_derivative_identity_direction_fd(a_diag, h=1e-4):
    """Central difference of ``t -> det(diag(a) + t I)`` at 0 (LU determinants)."""
    a = np.diag(_diag_vector(a_diag))
    eye = np.eye(a.shape[0])
    return float((np.linalg.det(a + h * eye) - np.linalg.det(a - h * eye)) / (2.0 * h))


def det_derivative_offdiag_vanishes(a_diag, h_off, h=1e-5):
    """Central-difference estimate of ``D det[diag(a)].H`` for off-diagonal ``H``.

    The exact derivative is 0; the estimate decays with ``h``.
    """
    a = np.diag(_diag_vector(a_diag))
    hm = _offdiag(h_off, a.shape[0])
    return float((np.linalg.det(a + h * hm) - np.linalg.det(a - h * hm)) / (2.0 * h))


def eigenvalue_offdiag_insensitivity(a_diag, h_off, t, spec=DEFAULT_SPEC):
    """Return ``lam(A + tH) - lam(A)`` for diagonal ``A`` with simple spectrum.

    ``H`` must be off-diagonal; the result is then of second order in ``t``.

    Raises
    ------
    PreconditionError
        If the smallest eigenvalue gap of ``A`` is below ``10 * tau_eig`` (relative).
    """
    a = _diag_vector(a_diag)
    lam = np.sort(a)
    gaps = np.diff(lam)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if a.size > 1 and float(gaps.min()) <= 10.0 * spec.tau_eig * scale:
        raise PreconditionError(
            f"eigenvalues of A are not simple enough (gap {gaps.min():.3e})"
        )
    hm = check_sym(h_off, name="h_off")
    if hm.shape[0] != a.size:
        raise ShapeError(f"h_off has dimension {hm.shape[0]}, expected {a.size}")
    return eig(np.diag(a) + t * hm).lam - lam


@dataclass(frozen=True)
class IsotropyReport:
    """Deviations measured by :func:`isotropy_conjugation_check`.

    primary : ``||f(Q^T A Q) - Q^T f(A) Q||_F``
    gradient : ``||G(Q^T A Q) - Q^T G(A) Q||_F`` for finite-difference potential
        gradients ``G`` (``None`` without antiderivative)
    scale : ``max(1, ||f(A)||_F)``
    """

    primary: float
    gradient: float | None
    scale: float

    @property
    def max_deviation(self):
        return max(self.primary, self.gradient or 0.0)

    def ok(self, tol=1e-9):
        return self.max_deviation <= tol * self.scale


def isotropy_conjugation_check(fn, a, q, h=1e-4, orth_tol=1e-10):
    """Check ``f(Q^T A Q) = Q^T f(A) Q`` and the conjugation rule for potential gradients.

    Gradients at ``Q^T A Q`` are differenced along the rotated basis
    ``Q^T E_b Q`` so both sides share the same directions.
    """
    fn = get_function(fn)
    a = check_sym(a)
    q = np.asarray(q, dtype=float)
    n = a.shape[0]
    if q.shape != (n, n):
        raise ShapeError(f"q must be {n}x{n}")
    defect = np.linalg.norm(q.T @ q - np.eye(n))
    if defect > orth_tol:
        raise PreconditionError(f"q is not orthogonal (||Q^T Q - I|| = {defect:.3e})")

    rotated = q.T @ a @ q
    fa = apply_primary(fn, a)
    primary = norm(apply_primary(fn, rotated) - q.T @ fa @ q)

    gradient = None
    if fn.has_antiderivative:
        basis = sym_basis(n)
        diff = np.zeros((n, n))
        for e in basis.elements:
            e_rot = q.T @ e @ q
            g_rot = (potential_value(fn, rotated + h * e_rot) - potential_value(fn, rotated - h * e_rot)) / (2 * h)
            g = (potential_value(fn, a + h * e) - potential_value(fn, a - h * e)) / (2 * h)
            diff += (g_rot - g) * e_rot
        gradient = norm(diff)
    return IsotropyReport(primary=primary, gradient=gradient, scale=max(1.0, norm(fa)))
