import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def rand_sym(rng, n, scale=1.0):
    g = rng.standard_normal((n, n))
    return scale * 0.5 * (g + g.T)


def rand_pd(rng, n):
    m = rng.standard_normal((n, n))
    return m @ m.T + 0.5 * np.eye(n)


def rand_orth(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


@st.composite
def sym_matrices(draw, n_min=2, n_max=5, bound=4.0):
    n = draw(st.integers(n_min, n_max))
    raw = draw(arrays(np.float64, (n, n), elements=st.floats(-bound, bound, allow_nan=False, width=64)))
    return 0.5 * (raw + raw.T)


@st.composite
def pd_matrices(draw, n_min=2, n_max=4):
    a = draw(sym_matrices(n_min, n_max, bound=2.0))
    return a @ a + 0.25 * np.eye(a.shape[0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
