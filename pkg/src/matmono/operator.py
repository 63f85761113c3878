"""Linear operators on Sym(n) represented in the orthonormal ``SymBasis``."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericalError, ShapeError
from .symcore import sym_basis


def relative_asymmetry(mat):
    """``||M - M^T||_F / ||M||_F`` (0 for the zero matrix)."""
    mat = np.asarray(mat, dtype=float)
    scale = np.linalg.norm(mat)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(mat - mat.T) / scale)


@dataclass(frozen=True, eq=False)
class SymOperator:
    """Operator ``H -> L.H`` on ``Sym(n)`` stored as an ``m x m`` matrix.

    ``mat[a, b] = <E_a, L.E_b>`` for the basis of :func:`symcore.sym_basis`.
    ``presym_asymmetry`` is set by constructors that symmetrize a computed
    matrix; it records the relative asymmetry before symmetrization.
    """

    n: int
    mat: np.ndarray
    presym_asymmetry: float | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        mat = np.array(self.mat, dtype=float)
        m = self.n * (self.n + 1) // 2
        if mat.shape != (m, m):
            raise ShapeError(f"operator matrix for n={self.n} must be {m}x{m}, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def m(self):
        return self.mat.shape[0]

    @property
    def basis(self):
        return sym_basis(self.n)

    @classmethod
    def identity(cls, n, scale=1.0):
        m = n * (n + 1) // 2
        return cls(n, scale * np.eye(m), label="identity")

    @classmethod
    def from_map(cls, n, linear_map, label=""):
        """Matrix-ize a linear map given as a callable on symmetric matrices."""
        basis = sym_basis(n)
        cols = [basis.coords(linear_map(e)) for e in basis.elements]
        return cls(n, np.column_stack(cols), label=label)

    def apply(self, h):
        basis = self.basis
        return basis.matrix(self.mat @ basis.coords(h))

    __call__ = apply

    def __matmul__(self, other):
        if not isinstance(other, SymOperator):
            return NotImplemented
        if other.n != self.n:
            raise ShapeError("operators act on different dimensions")
        return SymOperator(self.n, self.mat @ other.mat, label=f"({self.label})@({other.label})")

    @property
    def asymmetry(self):
        return relative_asymmetry(self.mat)

    def is_self_adjoint(self, tol=1e-9):
        return self.asymmetry <= tol

    def sym(self):
        """Self-adjoint part ``(L + L^*) / 2``."""
        return SymOperator(self.n, 0.5 * (self.mat + self.mat.T), label=f"sym({self.label})")

    def eigvals(self):
        """Ascending eigenvalues of the self-adjoint part."""
        return np.linalg.eigvalsh(0.5 * (self.mat + self.mat.T))

    @property
    def lambda_min(self):
        return float(self.eigvals()[0])

    def inverse(self, cond_max=1e12):
        cond = np.linalg.cond(self.mat)
        if not np.isfinite(cond) or cond > cond_max:
            raise NumericalError(f"operator is numerically singular (cond={cond:.3e})", residual=cond)
        return SymOperator(self.n, np.linalg.inv(self.mat), label=f"inv({self.label})")

    def to_dict(self):
        return {
            "n": self.n,
            "basis": "E_ii=e_i e_i^T; E_ij=(e_i e_j^T+e_j e_i^T)/sqrt(2), i<j; diagonal first",
            "matrix": self.mat.tolist(),
            "asymmetry": self.asymmetry,
            "presym_asymmetry": self.presym_asymmetry,
            "lambda_min_sym": self.lambda_min,
        }


def symmetrized(n, mat, label=""):
    """Build a ``SymOperator`` from the symmetric part of ``mat``, recording asymmetry."""
    mat = np.asarray(mat, dtype=float)
    return SymOperator(n, 0.5 * (mat + mat.T), presym_asymmetry=relative_asymmetry(mat), label=label)


def fd_operator(func, x, h):
    """Central finite-difference Jacobian of ``func: Sym(n) -> Sym(n)`` at ``x``.

    Column ``b`` is ``(func(x + h E_b) - func(x - h E_b)) / (2 h)`` in basis
    coordinates.  The result is *not* symmetrized.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    basis = sym_basis(n)
    cols = []
    for e in basis.elements:
        diff = np.asarray(func(x + h * e)) - np.asarray(func(x - h * e))
        cols.append(basis.coords(diff) / (2.0 * h))
    return SymOperator(n, np.column_stack(cols), label="fd")
