"""scikit-learn transformers over stacks of symmetric matrices.

Inputs are arrays of shape ``(k, n, n)``.  Both transformers are stateless:
``fit`` only validates and records ``n_``.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .elast import StressModel, StrainState, cauchy_stress, kirchhoff_stress
from .primfn import apply_primary, frechet_apply, get_function
from .symcore import sym_basis
from .validation import check_sym_stack


class _StackTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = check_sym_stack(X)
        self._validate_params()
        self.n_ = X.shape[1]
        return self

    def _check(self, X):
        check_is_fitted(self, "n_")
        X = check_sym_stack(X)
        if X.shape[1] != self.n_:
            raise ValueError(f"fitted for n={self.n_}, got n={X.shape[1]}")
        return X

    def _validate_params(self):
        pass

    def _out(self, Y):
        return sym_basis(self.n_).coords(Y) if self.flatten else Y


class MatrixFunctionTransformer(_StackTransformer):
    """Apply a primary matrix function (or its derivative in a fixed direction).

    Parameters
    ----------
    fn : str
        Name of a built-in scalar function.
    direction : array-like of shape (n, n), optional
        When given, ``transform`` returns ``Df[A].direction`` instead of ``f(A)``.
    flatten : bool
        Return basis coordinates of shape ``(k, n(n+1)/2)`` instead of matrices.
    """

    def __init__(self, fn="exp", direction=None, flatten=False):
        self.fn = fn
        self.direction = direction
        self.flatten = flatten

    def _validate_params(self):
        get_function(self.fn)

    def transform(self, X):
        X = self._check(X)
        fn = get_function(self.fn)
        if self.direction is None:
            Y = np.stack([apply_primary(fn, a) for a in X])
        else:
            h = np.asarray(self.direction, dtype=float)
            Y = np.stack([frechet_apply(fn, a, h) for a in X])
        return self._out(Y)


class StressResponse(_StackTransformer):
    """Map logarithmic strains ``log V`` to Cauchy (or Kirchhoff) stress.

    Parameters
    ----------
    model : str
        ``"hencky"``, ``"tsts"`` or ``"exp-hencky"``.
    params : dict
        Material parameters (``mu``, ``kappa``, ``lambda``, ``k``, ``k_hat``).
    stress : {"cauchy", "kirchhoff"}
    flatten : bool
        Return basis coordinates instead of matrices.
    """

    def __init__(self, model="hencky", params=None, stress="cauchy", flatten=False):
        self.model = model
        self.params = params
        self.stress = stress
        self.flatten = flatten

    def _model(self):
        return StressModel.from_config({"model": self.model, **(self.params or {"mu": 1.0, "kappa": 1.0})})

    def _validate_params(self):
        if self.stress not in ("cauchy", "kirchhoff"):
            raise ValueError(f"stress must be 'cauchy' or 'kirchhoff', got {self.stress!r}")
        self._model()

    def transform(self, X):
        X = self._check(X)
        model = self._model()
        fn = cauchy_stress if self.stress == "cauchy" else kirchhoff_stress
        Y = np.stack([fn(model, StrainState.from_log(x)) for x in X])
        return self._out(Y)
