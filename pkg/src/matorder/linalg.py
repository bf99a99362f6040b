"""Spectral primitives for Hermitian and positive semidefinite matrices.

Everything here works on dense complex arrays. `PsdMat` caches a descending
eigendecomposition together with a relative support cut, and every
functional-calculus routine treats eigenvalues at or below that cut as exact
zeros.
"""

from __future__ import annotations

import json
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidInput, NumericalDomain

DEFAULT_SUPPORT_TOL = 1e-10
HERMITIAN_LOAD_TOL = 1e-8
MEET_GAP = 1e-8
SUPPORT_LEQ_TOL = 1e-8


def hermitian(a, check_tol: float | None = None) -> np.ndarray:
    """Return ``(a + a*)/2`` as a complex array.

    Parameters
    ----------
    a : array_like
        Square matrix.
    check_tol : float, optional
        If given, reject inputs whose anti-Hermitian part exceeds
        ``check_tol * max(1, max|a|)`` in max-norm.

    Raises
    ------
    InvalidInput
        For non-square, empty, non-finite or (when checked) non-Hermitian
        input.
    """
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidInput(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    if check_tol is not None:
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > check_tol * scale:
            raise InvalidInput("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


class SpectralDecomp(NamedTuple):
    """Eigenvalues in descending order with matching unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(h) -> SpectralDecomp:
    """Hermitian eigendecomposition with eigenvalues sorted descending."""
    m = hermitian(h)
    w, v = np.linalg.eigh(m)
    return SpectralDecomp(w[::-1].copy(), v[:, ::-1].copy())


def _cut(eigenvalues: np.ndarray, support_tol: float) -> float:
    top = float(eigenvalues[0]) if eigenvalues.size else 0.0
    return support_tol * max(1.0, top)


class PsdMat:
    """Positive semidefinite matrix with cached spectral data.

    Parameters
    ----------
    a : array_like
        Hermitian matrix; symmetrized on construction.
    support_tol : float
        Relative support cut. Eigenvalues ``<= support_tol * max(1, lmax)``
        are treated as exact zeros.
    check : bool
        Reject matrices whose smallest eigenvalue is below ``-cut``. Internal
        callers pass ``False`` after arithmetic that can leave tiny negative
        rounding residue; such eigenvalues are clipped to zero.

    Attributes
    ----------
    mat : ndarray
        The matrix rebuilt from the cleaned spectrum.
    eigenvalues : ndarray
        Descending, with sub-cut values set to exactly 0.
    eigenvectors : ndarray
        Unitary matrix whose columns match ``eigenvalues``.
    rank : int
        Number of eigenvalues above the cut.
    """

    __slots__ = ("mat", "eigenvalues", "eigenvectors", "support_tol", "cut", "rank")

    def __init__(self, a, support_tol: float = DEFAULT_SUPPORT_TOL, check: bool = True):
        if isinstance(a, PsdMat):
            a = a.mat
        w, v = eigh(a)
        cut = _cut(w, support_tol)
        if check and w[-1] < -cut:
            raise InvalidInput(
                f"matrix is not positive semidefinite (min eigenvalue {w[-1]:.3e})"
            )
        self._set(w, v, support_tol)

    def _set(self, w: np.ndarray, v: np.ndarray, support_tol: float) -> None:
        cut = _cut(w, support_tol)
        w = np.where(w > cut, w, 0.0)
        self.eigenvalues = w
        self.eigenvectors = v
        self.support_tol = support_tol
        self.cut = cut
        self.rank = int(np.count_nonzero(w))
        self.mat = hermitian((v * w) @ v.conj().T)

    @classmethod
    def from_spectrum(
        cls,
        eigenvalues,
        eigenvectors,
        support_tol: float = DEFAULT_SUPPORT_TOL,
        keep_positive: bool = False,
    ) -> "PsdMat":
        """Build from eigenpairs without re-diagonalizing.

        With ``keep_positive`` every strictly positive eigenvalue is retained
        and the support tolerance is lowered as far as needed to keep the
        rank invariant consistent. Used when the support is known exactly,
        e.g. for powers of a matrix whose kernel is already clean.
        """
        w = np.asarray(eigenvalues, dtype=float)
        v = np.asarray(eigenvectors, dtype=complex)
        order = np.argsort(-w, kind="stable")
        w, v = w[order], v[:, order]
        w = np.clip(w, 0.0, None)
        if keep_positive and np.any(w > 0):
            smallest = float(np.min(w[w > 0]))
            support_tol = min(support_tol, 0.5 * smallest / max(1.0, float(w[0])))
        obj = cls.__new__(cls)
        obj._set(w, v, support_tol)
        return obj

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def lmax(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def support_basis(self) -> np.ndarray:
        """Orthonormal columns spanning the support."""
        return self.eigenvectors[:, : self.rank]

    def is_pd(self, factor: float = 1e3) -> bool:
        """True when the smallest eigenvalue clears ``factor`` times the cut."""
        return self.rank == self.dim and self.eigenvalues[-1] > factor * self.cut

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    def __repr__(self) -> str:
        return f"PsdMat(dim={self.dim}, rank={self.rank}, eig={np.round(self.eigenvalues, 6)})"


class Projection:
    """Orthogonal projection described by an orthonormal basis of its range."""

    __slots__ = ("basis", "mat")

    def __init__(self, basis: np.ndarray, dim: int | None = None):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim != 2:
            raise InvalidInput("projection basis must be 2-D")
        self.basis = basis
        self.mat = hermitian(basis @ basis.conj().T) if basis.shape[1] else np.zeros(
            (basis.shape[0], basis.shape[0]), dtype=complex
        )

    @classmethod
    def from_matrix(cls, p, tol: float = 1e-10) -> "Projection":
        """Wrap an idempotent Hermitian matrix."""
        m = hermitian(p)
        if np.max(np.abs(m @ m - m)) > tol:
            raise InvalidInput("matrix is not idempotent")
        w, v = eigh(m)
        return cls(v[:, w > 0.5])

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]


def as_psd(a, support_tol: float = DEFAULT_SUPPORT_TOL) -> PsdMat:
    """Coerce arrays (or pass through `PsdMat`) to `PsdMat`."""
    if isinstance(a, PsdMat):
        return a
    return PsdMat(a, support_tol=support_tol)


def func_calc(A, f: Callable[[np.ndarray], np.ndarray], zero_value: float = 0.0) -> np.ndarray:
    """Apply ``f`` to the strictly positive spectrum and ``zero_value`` to the kernel.

    Parameters
    ----------
    A : PsdMat or array_like
    f : callable
        Vectorized scalar function on (0, inf).
    zero_value : float
        Value assigned to null eigenvalues.

    Returns
    -------
    ndarray
        Hermitian result ``U f(L) U*``.

    Raises
    ------
    NumericalDomain
        If ``f`` is non-finite on a retained eigenvalue.
    """
    A = as_psd(A)
    w = A.eigenvalues
    out = np.full(w.shape, float(zero_value))
    pos = w > 0
    if np.any(pos):
        with np.errstate(all="ignore"):
            vals = np.asarray(f(w[pos]), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NumericalDomain("function is not finite on the retained spectrum")
        out[pos] = vals
    v = A.eigenvectors
    return hermitian((v * out) @ v.conj().T)


def gpower(A, r: float) -> PsdMat:
    """Generalized power: ``lambda**r`` on the support, 0 on the kernel.

    ``r = 0`` yields the support projection and negative ``r`` uses the
    generalized inverse.
    """
    A = as_psd(A)
    w = A.eigenvalues
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = 1.0 if r == 0 else w[pos] ** r
    return PsdMat.from_spectrum(out, A.eigenvectors, A.support_tol, keep_positive=True)


def glog(A) -> np.ndarray:
    """Generalized logarithm ``s(A) log(A)`` (zero on the kernel)."""
    return func_calc(A, np.log, 0.0)


def support(A) -> Projection:
    """Support projection ``s(A)``."""
    A = as_psd(A)
    return Projection(A.support_basis)


def proj_meet(P: Projection, Q: Projection, gap: float = MEET_GAP) -> Projection:
    """Projection onto ``range(P) & range(Q)`` via the eigenvalue-2 space of ``P + Q``."""
    w, v = eigh(P.mat + Q.mat)
    return Projection(v[:, w > 2.0 - gap])


def proj_join(P: Projection, Q: Projection, gap: float = MEET_GAP) -> Projection:
    """Projection onto ``range(P) + range(Q)``."""
    w, v = eigh(P.mat + Q.mat)
    return Projection(v[:, w > gap])


def support_leq(P: Projection, Q: Projection, tol: float = SUPPORT_LEQ_TOL) -> bool:
    """Decide ``P <= Q`` for projections: ``max eig((I-Q) P (I-Q)) <= tol``."""
    if P.rank == 0:
        return True
    comp = np.eye(P.dim) - Q.mat
    return float(eigh(comp @ P.mat @ comp).eigenvalues[0]) <= tol


def compress(M, basis: np.ndarray) -> np.ndarray:
    """``V* M V`` for a basis ``V`` (re-symmetrized)."""
    return hermitian(basis.conj().T @ np.asarray(M) @ basis)


def embed(M, basis: np.ndarray) -> np.ndarray:
    """``V M V*``: inverse of `compress` on the range of ``V``."""
    return hermitian(basis @ np.asarray(M) @ basis.conj().T)


def range_basis(M, rel_tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of ``range(M)`` for a general matrix via SVD."""
    m = np.asarray(M, dtype=complex)
    if m.size == 0 or m.shape[1] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    return u[:, s > rel_tol * max(1.0, s[0])]


def loewner_min_eig(M) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(eigh(M).eigenvalues[-1])


def max_abs(M) -> float:
    """Entrywise max-norm."""
    return float(np.max(np.abs(np.asarray(M))))


# ----------------------------------------------------------------------
# JSON schema: {"dim": n, "entries": [[[re, im], ...], ...]}
# ----------------------------------------------------------------------


def matrix_to_obj(M) -> dict:
    m = np.asarray(M.mat if isinstance(M, PsdMat) else M, dtype=complex)
    return {
        "dim": int(m.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }


def matrix_from_obj(obj: dict, check_tol: float = HERMITIAN_LOAD_TOL) -> np.ndarray:
    """Parse the matrix schema; validate Hermiticity and symmetrize."""
    try:
        n = int(obj["dim"])
        rows = obj["entries"]
        m = np.array([[complex(c[0], c[1]) for c in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidInput(f"malformed matrix JSON: {exc}") from exc
    if n < 1 or m.shape != (n, n):
        raise InvalidInput(f"entries do not form a {n}x{n} matrix")
    return hermitian(m, check_tol=check_tol)


def dumps_matrix(M, **extra) -> str:
    obj = matrix_to_obj(M)
    obj.update(extra)
    return json.dumps(obj, sort_keys=True)


def load_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_obj(obj)
