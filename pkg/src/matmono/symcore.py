"""Dense symmetric-matrix kernel.

Conventions
-----------
* Matrices are plain ``numpy.ndarray`` objects of shape ``(n, n)`` with
  ``2 <= n <= 8``; symmetric inputs are symmetrized on entry.
* Spectral decompositions follow ``A = Q.T @ diag(lam) @ Q``: the *rows* of
  ``Q`` are eigenvectors and ``lam`` is ascending.
* ``Sym(n)`` is coordinatized by the orthonormal basis ``E_ii = e_i e_i^T``,
  ``E_ij = (e_i e_j^T + e_j e_i^T) / sqrt(2)`` (i < j), diagonal elements
  first, then off-diagonal pairs in lexicographic order.  Because the basis
  is orthonormal for the Frobenius product, an operator on ``Sym(n)`` is
  self-adjoint exactly when its coordinate matrix is symmetric.
"""

import enum
import functools
import math
from typing import NamedTuple

import numpy as np

from .exceptions import NumericalError, ShapeError
from .validation import check_same_shape, check_square, check_sym

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 64
PD_TOL = 1e-9


def inner(a, b):
    """Frobenius inner product ``tr(a.T @ b)``."""
    a, b = check_same_shape(a, b)
    if a.ndim != 2:
        raise ShapeError(f"inner expects matrices, got ndim={a.ndim}")
    return float(np.sum(a * b))


def norm(a):
    return math.sqrt(inner(a, a))


def tr(a):
    return float(np.trace(check_square(a)))


def dev(a):
    """Deviatoric part ``a - tr(a)/n * I``."""
    a = check_square(a)
    n = a.shape[0]
    return a - (np.trace(a) / n) * np.eye(n)


def cof(a):
    """Cofactor matrix, ``cof(a)[i, j] = (-1)**(i+j) * det(minor_ij)``.

    Works for singular input; satisfies ``a @ cof(a).T == det(a) * I``.
    """
    a = check_square(a)
    n = a.shape[0]
    out = np.empty_like(a)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, i, axis=0), j, axis=1)
            out[i, j] = (-1) ** (i + j) * np.linalg.det(minor)
    return out


def sym_part(a):
    a = np.asarray(a, dtype=float)
    return 0.5 * (a + a.T)


class SpectralDecomposition(NamedTuple):
    """``A = q.T @ diag(lam) @ q`` with orthogonal ``q`` and ascending ``lam``."""

    q: np.ndarray
    lam: np.ndarray

    def reconstruct(self):
        return self.q.T @ (self.lam[:, None] * self.q)


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(off * off)))


def jacobi_eigh(a, *, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Rotations sweep the upper triangle row by row.  Iteration stops once the
    off-diagonal Frobenius norm drops to ``tol * ||a||_F``.

    Returns
    -------
    lam : ndarray
        Unsorted eigenvalues (diagonal of the rotated matrix).
    v : ndarray
        Orthogonal matrix whose columns are the eigenvectors.
    sweeps : int
        Number of sweeps performed.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * math.sqrt(float(np.sum(a * a)))
    for sweep in range(max_sweeps + 1):
        off = _off_norm(a)
        if off <= target:
            return np.diag(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                gap = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(gap):
                    t = apq / gap
                else:
                    theta = gap / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q]
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    raise NumericalError(
        f"Jacobi iteration did not converge in {max_sweeps} sweeps "
        f"(off-diagonal norm {off:.3e}, target {target:.3e})",
        residual=off,
    )


def eig(a):
    """Spectral decomposition of a symmetric matrix by cyclic Jacobi.

    Deterministic: no randomness, fixed sweep order, stable ascending sort
    (ties keep the Jacobi output order).
    """
    a = check_sym(a)
    lam, v, _ = jacobi_eigh(a)
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(q=np.ascontiguousarray(v[:, order].T), lam=lam[order])


def eigvalsh(a):
    return eig(a).lam


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemiDefinite"
    INDEFINITE = "Indefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemiDefinite"
    NEGATIVE_DEFINITE = "NegativeDefinite"


class DefinitenessResult(NamedTuple):
    verdict: Definiteness
    lambda_min: float
    lambda_max: float


def classify_spectrum(lam, tol=PD_TOL):
    """Definiteness verdict from eigenvalues, relative to ``max(1, |lam|_max)``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    lam = np.asarray(lam, dtype=float)
    lo, hi = float(lam.min()), float(lam.max())
    band = tol * max(1.0, float(np.max(np.abs(lam))))
    if lo > band:
        verdict = Definiteness.POSITIVE_DEFINITE
    elif lo >= -band:
        verdict = Definiteness.POSITIVE_SEMIDEFINITE
    elif hi < -band:
        verdict = Definiteness.NEGATIVE_DEFINITE
    elif hi <= band:
        verdict = Definiteness.NEGATIVE_SEMIDEFINITE
    else:
        verdict = Definiteness.INDEFINITE
    return DefinitenessResult(verdict, lo, hi)


def definiteness(a, tol=PD_TOL):
    return classify_spectrum(eig(a).lam, tol)


def is_positive_definite(a, tol=PD_TOL):
    return definiteness(a, tol).verdict is Definiteness.POSITIVE_DEFINITE


class SymBasis:
    """Orthonormal basis of ``Sym(n)`` under the Frobenius product.

    Use :func:`sym_basis` to obtain the shared instance for a dimension.
    """

    def __init__(self, n):
        if not 1 <= n <= 8:
            raise ShapeError(f"unsupported dimension {n}")
        self.n = n
        self.m = n * (n + 1) // 2
        elements = np.zeros((self.m, n, n))
        pairs = [(i, i) for i in range(n)]
        pairs += [(i, j) for i in range(n) for j in range(i + 1, n)]
        r = 1.0 / math.sqrt(2.0)
        for k, (i, j) in enumerate(pairs):
            if i == j:
                elements[k, i, i] = 1.0
            else:
                elements[k, i, j] = elements[k, j, i] = r
        elements.setflags(write=False)
        self.elements = elements
        self.pairs = tuple(pairs)

    def __len__(self):
        return self.m

    def __repr__(self):
        return f"SymBasis(n={self.n})"

    def coords(self, h):
        """Coordinates of a matrix (or stack of matrices) in this basis."""
        h = np.asarray(h, dtype=float)
        if h.shape[-2:] != (self.n, self.n):
            raise ShapeError(f"expected trailing shape {(self.n, self.n)}, got {h.shape}")
        return np.einsum("...ij,aij->...a", h, self.elements)

    def matrix(self, c):
        """Symmetric matrix (or stack) with the given coordinates."""
        c = np.asarray(c, dtype=float)
        if c.shape[-1] != self.m:
            raise ShapeError(f"expected {self.m} coordinates, got {c.shape[-1]}")
        return np.einsum("...a,aij->...ij", c, self.elements)

    def gram(self):
        return np.einsum("aij,bij->ab", self.elements, self.elements)


@functools.lru_cache(maxsize=None)
def sym_basis(n):
    return SymBasis(n)
