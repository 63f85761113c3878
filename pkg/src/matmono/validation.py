"""Input validation helpers.

All public entry points funnel matrix arguments through these so that shape,
finiteness and symmetry rules are enforced in one place.
"""

import numpy as np

from .exceptions import ShapeError

N_MAX = 8
SYMMETRY_REPORT_TOL = 1e-12


def check_square(a, *, name="a", n_min=2, n_max=N_MAX):
    """Return ``a`` as a finite float64 square matrix."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be a square matrix, got shape {arr.shape}")
    n = arr.shape[0]
    if not n_min <= n <= n_max:
        raise ShapeError(f"{name} has dimension {n}, supported range is {n_min}..{n_max}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} has non-finite entries")
    return arr


def symmetrize(a, *, name="a", n_min=2, n_max=N_MAX):
    """Symmetrize a square matrix.

    Returns
    -------
    sym : ndarray
        ``(a + a.T) / 2``; bitwise symmetric.
    changed : bool
        True when symmetrization moved some entry by more than 1e-12.
    """
    arr = check_square(a, name=name, n_min=n_min, n_max=n_max)
    sym = 0.5 * (arr + arr.T)
    changed = bool(np.max(np.abs(sym - arr), initial=0.0) > SYMMETRY_REPORT_TOL)
    return sym, changed


def check_sym(a, *, name="a", n_min=2, n_max=N_MAX):
    """Return a symmetric float64 copy of ``a`` (symmetrizing if needed)."""
    return symmetrize(a, name=name, n_min=n_min, n_max=n_max)[0]


def check_same_shape(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def check_sym_stack(x, *, name="X", n_max=N_MAX):
    """Validate a stack of symmetric matrices with shape (k, n, n)."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ShapeError(f"{name} must have shape (k, n, n), got {arr.shape}")
    if arr.shape[0] == 0:
        raise ShapeError(f"{name} is empty")
    return np.stack([check_sym(m, name=name, n_max=n_max) for m in arr])
