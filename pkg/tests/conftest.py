import numpy as np
import pytest
from hypothesis import settings, strategies as st

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def rand_unitary(rng, n, real=False):
    z = rng.standard_normal((n, n))
    if not real:
        z = z + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def rand_psd(rng, n, rank=None, lo=1e-2, hi=1e2, real=False):
    rank = n if rank is None else rank
    u = rand_unitary(rng, n, real)[:, :rank]
    w = np.exp(rng.uniform(np.log(lo), np.log(hi), rank))
    m = (u * w) @ u.conj().T
    return 0.5 * (m + m.conj().T)


@st.composite
def psd_pairs(draw, dims=(2, 3, 4), full=True, lo=1e-2, hi=1e2):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.sampled_from(dims))
    rng = np.random.default_rng(seed)
    ra = n if full else draw(st.integers(1, n))
    rb = n if full else draw(st.integers(1, n))
    return rand_psd(rng, n, ra, lo, hi), rand_psd(rng, n, rb, lo, hi)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
