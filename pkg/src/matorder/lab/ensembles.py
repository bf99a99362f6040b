"""Seeded random ensembles of PSD pairs.

Each sample draws from its own generator seeded by ``(seed, index)``, so a
sample never depends on how many others were drawn before it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInput

PROFILES = ("full", "deficient", "nested", "aligned", "mixed")


@dataclass(frozen=True)
class EnsembleConfig:
    """Recipe for a reproducible ensemble.

    Parameters
    ----------
    dims : tuple of int
        Dimensions cycled through by sample index.
    count : int
    profile : str
        ``"full"`` draws positive definite pairs. ``"deficient"`` draws
        rank-deficient pairs with unrelated supports. ``"nested"`` draws
        rank-deficient pairs with ``s(B) <= s(A)``. ``"aligned"`` draws
        nearly commuting pairs, including rank-one projections at small
        angles. ``"mixed"`` cycles through the others.
    spectrum : (float, float)
        Eigenvalues are log-uniform on this interval.
    seed : int
    nested : bool
        Force ``s(B) <= s(A)`` in every sample.
    """

    dims: tuple[int, ...] = (2, 3, 4)
    count: int = 200
    profile: str = "mixed"
    spectrum: tuple[float, float] = (1e-3, 1e3)
    seed: int = 7
    nested: bool = False

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise InvalidInput(f"unknown ensemble profile {self.profile!r}")
        if self.count < 0 or not self.dims or min(self.dims) < 1:
            raise InvalidInput("ensemble needs a positive dimension list and count >= 0")
        lo, hi = self.spectrum
        if not (0 < lo <= hi):
            raise InvalidInput("spectrum bounds must satisfy 0 < lo <= hi")

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, index])

    def sample(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """The ``index``-th pair ``(A, B)``."""
        rng = self.rng(index)
        n = self.dims[index % len(self.dims)]
        prof = self.profile
        if prof == "mixed":
            prof = ("full", "deficient", "aligned", "full")[index % 4]
        if prof == "deficient" and self.nested:
            prof = "nested"
        if prof == "full":
            return _pd(rng, n, self.spectrum), _pd(rng, n, self.spectrum)
        if prof == "deficient":
            return _deficient(rng, n, self.spectrum)
        if prof == "nested":
            return _nested(rng, n, self.spectrum)
        return _aligned(rng, n, self.spectrum, self.nested)

    def samples(self):
        for i in range(self.count):
            yield self.sample(i)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _spec(rng, k, spectrum):
    lo, hi = spectrum
    return np.exp(rng.uniform(np.log(lo), np.log(hi), k))


def _build(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    m = (u[:, : w.size] * w) @ u[:, : w.size].conj().T
    return 0.5 * (m + m.conj().T)


def _pd(rng, n, spectrum):
    return _build(random_unitary(rng, n), _spec(rng, n, spectrum))


def _deficient(rng, n, spectrum):
    if n == 1:
        return _pd(rng, n, spectrum), _pd(rng, n, spectrum)
    ra = int(rng.integers(1, n))
    rb = int(rng.integers(1, n + 1))
    ua = random_unitary(rng, n)
    if rng.uniform() < 0.5:
        # share part of the support so that the meet is nontrivial
        ub = ua.copy()
        mix = random_unitary(rng, n - 1)
        ub[:, 1:] = ub[:, 1:] @ mix
    else:
        ub = random_unitary(rng, n)
    return _build(ua, _spec(rng, ra, spectrum)), _build(ub, _spec(rng, rb, spectrum))


def _nested(rng, n, spectrum):
    ra = int(rng.integers(1, n + 1)) if n > 1 else 1
    ua = random_unitary(rng, n)
    A = _build(ua, _spec(rng, ra, spectrum))
    rb = int(rng.integers(1, ra + 1))
    inner = random_unitary(rng, ra)
    ub = ua[:, :ra] @ inner
    return A, _build(ub, _spec(rng, rb, spectrum))


def _aligned(rng, n, spectrum, nested):
    u = random_unitary(rng, n)
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = 0.5 * (h + h.conj().T)
    h /= np.linalg.norm(h, 2)
    t = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.5))))
    w_, v_ = np.linalg.eigh(h)
    rot = (v_ * np.exp(1j * t * w_)) @ v_.conj().T
    if rng.uniform() < 0.5 and not nested:
        # rank-one projections at a small angle
        phi = u[:, :1]
        return _build(phi, np.ones(1)), _build(rot @ phi, np.ones(1))
    A = _build(u, _spec(rng, n, spectrum))
    B = _build(rot @ u, _spec(rng, n, spectrum))
    return A, B
