"""Two-variable quasi matrix means of positive semidefinite matrices.

Each quasi mean has the form ``M_{alpha,p}(A, B) = M_alpha(A^p, B^p)^{1/p}``
for a base mean ``M_alpha``. Singular inputs follow the support convention:
``A^0`` is the support projection, and negative powers use the generalized
inverse. Means that are defined only as a regularized limit (harmonic,
geometric, Kubo-Ando) are evaluated through exact support reductions where
these exist, otherwise through a regularization ladder.

The result support is tracked structurally. Final ``1/p`` roots are taken on
that known subspace, so large powers of badly conditioned inputs do not lose
genuine eigenvalues to the relative support cut.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import InvalidInput, NonConvergence, NumericalDomain, SupportViolation
from .linalg import (
    PsdMat,
    Projection,
    as_psd,
    compress,
    eigh,
    embed,
    glog,
    gpower,
    hermitian,
    matrix_to_obj,
    max_abs,
    proj_join,
    proj_meet,
    range_basis,
    support,
    support_leq,
)

LADDER = (1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
LADDER_RTOL = 1e-6
GEO_MP_COND = 1e3
GEO_MP_DPS = 40
GEO_MP_COND_C = 1e6


class MeanKind(str, enum.Enum):
    ARITHMETIC = "arithmetic"
    HARMONIC = "harmonic"
    GEOMETRIC = "geometric"
    SPECTRAL_GEOMETRIC = "spectral_geometric"
    SPECTRAL_GEOMETRIC_TILDE = "spectral_geometric_tilde"
    RENYI = "renyi"
    LOG_EUCLIDEAN = "log_euclidean"
    KUBO_ANDO = "kubo_ando"

    @classmethod
    def parse(cls, name: str) -> "MeanKind":
        key = name.strip().lower().replace("-", "_")
        kind = _ALIASES.get(key)
        if kind is None:
            try:
                return cls(key)
            except ValueError:
                raise InvalidInput(f"unknown mean kind {name!r}") from None
        return kind

    @property
    def short(self) -> str:
        return _SHORT[self]


_SHORT = {
    MeanKind.ARITHMETIC: "arith",
    MeanKind.HARMONIC: "harm",
    MeanKind.GEOMETRIC: "geo",
    MeanKind.SPECTRAL_GEOMETRIC: "sg",
    MeanKind.SPECTRAL_GEOMETRIC_TILDE: "sgt",
    MeanKind.RENYI: "renyi",
    MeanKind.LOG_EUCLIDEAN: "le",
    MeanKind.KUBO_ANDO: "ka",
}
_ALIASES = {v: k for k, v in _SHORT.items()}
_ALIASES.update({"a": MeanKind.ARITHMETIC, "h": MeanKind.HARMONIC, "g": MeanKind.GEOMETRIC,
                 "r": MeanKind.RENYI, "sg~": MeanKind.SPECTRAL_GEOMETRIC_TILDE,
                 "sgtilde": MeanKind.SPECTRAL_GEOMETRIC_TILDE})


@dataclass(frozen=True)
class MeanSpec:
    """Which mean to evaluate and with which parameters.

    ``p`` is ignored for the log-Euclidean mean, and ``rep_fn`` is used only
    for Kubo-Ando means.
    """

    kind: MeanKind
    alpha: float
    p: float = 1.0
    rep_fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", MeanKind.parse(self.kind) if isinstance(self.kind, str) else self.kind)
        if not (0.0 <= self.alpha <= 1.0):
            raise InvalidInput(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (self.p > 0 and np.isfinite(self.p)):
            raise InvalidInput(f"p must be positive, got {self.p}")
        if self.kind is MeanKind.KUBO_ANDO and self.rep_fn is None:
            raise InvalidInput("Kubo-Ando mean needs a representing function")

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind.value, "alpha": self.alpha, "p": self.p})

    @classmethod
    def from_json(cls, text: str) -> "MeanSpec":
        obj = json.loads(text)
        return cls(MeanKind.parse(obj["kind"]), float(obj["alpha"]), float(obj.get("p", 1.0)))

    def label(self) -> str:
        if self.kind is MeanKind.LOG_EUCLIDEAN:
            return f"le[{self.alpha:g}]"
        return f"{self.kind.short}[{self.alpha:g},{self.p:g}]"


@dataclass
class MeanResult:
    """A mean value together with its support and any regularization trace."""

    value: PsdMat
    support_note: Projection
    regularization_trace: list[tuple[float, np.ndarray]] | None = None

    def to_obj(self) -> dict:
        obj = matrix_to_obj(self.value)
        if self.regularization_trace is not None:
            obj["regularization_trace"] = [
                {"eps": float(e), "value": matrix_to_obj(v)} for e, v in self.regularization_trace
            ]
        return obj


def _result(value: PsdMat, trace=None) -> MeanResult:
    return MeanResult(value, support(value), trace)


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------


def _root_on(M, r: float, basis: np.ndarray) -> PsdMat:
    """``M^r`` computed on the subspace spanned by ``basis`` (zero elsewhere).

    Every eigenvalue of the compressed block is kept, after clipping rounding
    noise at zero, because the caller knows the block carries the support.
    """
    n = np.asarray(M).shape[0]
    if basis.shape[1] == 0:
        return PsdMat(np.zeros((n, n)))
    w, v = eigh(compress(M, basis))
    w = np.clip(w, 0.0, None)
    out = np.zeros_like(w)
    out[w > 0] = w[w > 0] ** r
    return _from_cols(out, basis @ v, n)


def _from_cols(w: np.ndarray, u: np.ndarray, n: int) -> PsdMat:
    """PsdMat from eigenpairs on a subspace, completed by a kernel basis."""
    k = u.shape[1]
    if k < n:
        q, _ = np.linalg.qr(np.hstack([u, np.eye(n, dtype=complex)]))
        # columns of q beyond k span the orthogonal complement of range(u)
        kern = q[:, k:n]
        u = np.hstack([u, kern])
        w = np.concatenate([w, np.zeros(n - k)])
    return PsdMat.from_spectrum(w, u, keep_positive=True)


def _pow_block(m: np.ndarray, r: float) -> np.ndarray:
    """Generalized power of a Hermitian PSD block, clipping rounding noise."""
    P = PsdMat(m, check=False)
    return gpower(P, r).mat


def _pd_block_pow(m: np.ndarray, r: float) -> np.ndarray:
    """Power of a block known to be positive definite (eigenvalues clipped at tiny)."""
    w, v = eigh(m)
    top = max(float(w[0]), 1e-300)
    w = np.clip(w, top * 1e-300, None)
    return hermitian((v * w**r) @ v.conj().T)


def _blk_pow(m: np.ndarray, r: float, full: bool) -> np.ndarray:
    return _pd_block_pow(m, r) if full else _pow_block(m, r)


def _pd_geo(a: np.ndarray, b: np.ndarray, alpha: float, b_full: bool = False) -> np.ndarray:
    """``a #_alpha b`` for positive definite ``a`` and PSD ``b``.

    ``b_full`` marks ``b`` as invertible so no support cut is applied inside.
    """
    if alpha == 0:
        return hermitian(a)
    if alpha == 1:
        return hermitian(b)
    w = np.linalg.eigvalsh(a)
    if w[0] <= 0 or w[-1] > GEO_MP_COND * w[0]:
        return _pd_geo_mp(a, b, alpha, b_full)
    ah = _pd_block_pow(a, 0.5)
    aih = _pd_block_pow(a, -0.5)
    c = hermitian(aih @ b @ aih)
    wc = np.abs(np.linalg.eigvalsh(c))
    top = max(float(wc.max()), 1e-300)
    # small eigenvalues of c carry absolute rounding error that c**alpha amplifies
    lo = 1e-14 * top if not b_full else 0.0
    if np.any((wc > lo) & (wc < top / GEO_MP_COND_C)):
        return _pd_geo_mp(a, b, alpha, b_full)
    return hermitian(ah @ _blk_pow(c, alpha, b_full) @ ah)


def _pd_geo_mp(a: np.ndarray, b: np.ndarray, alpha: float, b_full: bool) -> np.ndarray:
    """`_pd_geo` in extended precision for badly conditioned ``a``.

    Without ``b_full`` the eigenvalues of the congruence below ``1e-30`` of
    the largest are treated as the kernel of ``b``.
    """
    real = bool(np.all(a.imag == 0) and np.all(b.imag == 0))
    with mpmath.workdps(GEO_MP_DPS):
        A = _mp_mat(a, real)
        Ah = _mp_fun(A, mpmath.sqrt, real)
        Aih = _mp_fun(A, lambda x: 1 / mpmath.sqrt(x), real)
        C = Aih * _mp_mat(b, real) * Aih
        C = (C + (C.T if real else C.transpose_conj())) / 2
        if b_full:
            def f(x):
                return mpmath.power(x, alpha)
        else:
            top = max(abs(x) for x in (mpmath.eigsy(C, eigvals_only=True) if real
                                       else mpmath.eighe(C, eigvals_only=True)))
            floor = top * mpmath.mpf(10) ** -30

            def f(x):
                return mpmath.power(x, alpha) if x > floor else mpmath.mpf(0)
        G = Ah * _mp_fun(C, f, real) * Ah
        return hermitian(_mp_to_np(G, real))


def _mp_mat(m: np.ndarray, real: bool):
    if real:
        return mpmath.matrix(np.real(m).tolist())
    return mpmath.matrix([[mpmath.mpc(z.real, z.imag) for z in row] for row in m])


def _check_alpha(alpha: float) -> None:
    if not (0.0 <= alpha <= 1.0):
        raise InvalidInput(f"alpha must lie in [0, 1], got {alpha}")


def _check_p(p: float) -> None:
    if not (p > 0 and np.isfinite(p)):
        raise InvalidInput(f"p must be positive, got {p}")


def _prep(A, B):
    A, B = as_psd(A), as_psd(B)
    if A.dim != B.dim:
        raise InvalidInput(f"dimension mismatch: {A.dim} vs {B.dim}")
    return A, B


# ----------------------------------------------------------------------
# arithmetic, Renyi, log-Euclidean: direct formulas
# ----------------------------------------------------------------------


def arithmetic_quasi(A, B, alpha: float, p: float) -> PsdMat:
    """Matrix power mean ``((1-alpha) A^p + alpha B^p)^{1/p}``.

    Parameters
    ----------
    A, B : PsdMat or array_like
    alpha : float
        Weight in [0, 1].
    p : float
        Positive exponent.

    Returns
    -------
    PsdMat
        Supported on ``s(A) v s(B)`` for ``0 < alpha < 1``.
    """
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    if alpha == 0:
        return A
    if alpha == 1:
        return B
    M = (1 - alpha) * gpower(A, p).mat + alpha * gpower(B, p).mat
    basis = proj_join(support(A), support(B)).basis
    return _root_on(M, 1.0 / p, basis)


def renyi_mean(A, B, alpha: float, p: float) -> PsdMat:
    """Renyi mean ``(A^{(1-alpha)p/2} B^{alpha p} A^{(1-alpha)p/2})^{1/p}``."""
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    ah = gpower(A, (1 - alpha) * p / 2).mat
    M = hermitian(ah @ gpower(B, alpha * p).mat @ ah)
    # range(A^a B^b A^a) = A^a range(B), with A^0 the support projection
    basis = range_basis(ah @ support(B).basis)
    return _root_on(M, 1.0 / p, basis)


def log_euclidean(A, B, alpha: float) -> PsdMat:
    """Log-Euclidean mean ``P0 exp((1-alpha) P0 log A P0 + alpha P0 log B P0)``.

    ``P0`` is the meet of the supports and the logarithms are generalized
    (zero on the kernel). For singular inputs ``alpha`` must lie strictly
    inside (0, 1).
    """
    _check_alpha(alpha)
    A, B = _prep(A, B)
    full = A.rank == A.dim and B.rank == B.dim
    if not full and alpha in (0.0, 1.0):
        raise InvalidInput("log-Euclidean mean of singular inputs needs 0 < alpha < 1")
    basis = proj_meet(support(A), support(B)).basis
    n = A.dim
    if basis.shape[1] == 0:
        return PsdMat(np.zeros((n, n)))
    L = (1 - alpha) * compress(glog(A), basis) + alpha * compress(glog(B), basis)
    w, v = eigh(L)
    return _from_cols(np.exp(w), basis @ v, n)


# ----------------------------------------------------------------------
# harmonic
# ----------------------------------------------------------------------


def _shorted(M: np.ndarray, U: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Shorted operator of PSD ``M`` onto ``range(U)``, expressed in ``U`` coordinates."""
    m11 = compress(M, U)
    if W.shape[1] == 0:
        return m11
    m12 = U.conj().T @ M @ W
    m22 = PsdMat(compress(M, W), check=False)
    return hermitian(m11 - m12 @ gpower(m22, -1).mat @ m12.conj().T)


def _harm_base(Ap: PsdMat, Bp: PsdMat, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """``A !_alpha B`` for PSD inputs as (matrix, support basis)."""
    meet = proj_meet(support(Ap), support(Bp))
    U = meet.basis
    n = Ap.dim
    if U.shape[1] == 0:
        return np.zeros((n, n), dtype=complex), U
    W = range_basis(np.eye(n) - meet.mat)
    sa = _shorted(Ap.mat, U, W)
    sb = _shorted(Bp.mat, U, W)
    inv = (1 - alpha) * _pd_block_pow(sa, -1) + alpha * _pd_block_pow(sb, -1)
    return embed(_pd_block_pow(inv, -1), U), U


def _harm_eps(Ap: np.ndarray, Bp: np.ndarray, alpha: float, eps: float) -> np.ndarray:
    n = Ap.shape[0]
    ai = np.linalg.inv(Ap + eps * np.eye(n))
    bi = np.linalg.inv(Bp + eps * np.eye(n))
    return hermitian(np.linalg.inv(hermitian((1 - alpha) * ai + alpha * bi)))


def _ladder(fn: Callable[[float], np.ndarray], ladder: Sequence[float] = LADDER,
            rtol: float = LADDER_RTOL) -> tuple[np.ndarray, list]:
    """Evaluate ``fn`` down a decade ladder and Richardson-extrapolate linearly.

    Convergence is declared when the last two extrapolated values differ by
    less than ``rtol * max(1, |value|)``.
    """
    trace = [(eps, fn(eps)) for eps in ladder]
    rich = []
    for (e0, v0), (e1, v1) in zip(trace, trace[1:]):
        ratio = e0 / e1
        rich.append((ratio * v1 - v0) / (ratio - 1))
    if len(rich) < 2:
        return rich[-1] if rich else trace[-1][1], trace
    gap = max_abs(rich[-1] - rich[-2])
    if gap > rtol * max(1.0, max_abs(rich[-1])):
        raise NonConvergence(f"regularization ladder did not settle (last gap {gap:.3e})")
    return rich[-1], trace


def harmonic_quasi(A, B, alpha: float, p: float, method: str = "auto") -> MeanResult:
    """Quasi harmonic mean ``(A^p !_alpha B^p)^{1/p}``.

    Parameters
    ----------
    method : {"auto", "ladder"}
        ``"auto"`` uses the exact shorted-operator form of the regularized
        limit; ``"ladder"`` evaluates the regularization ladder with linear
        Richardson extrapolation and attaches its trace.
    """
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    if alpha == 0:
        return _result(A)
    if alpha == 1:
        return _result(B)
    Ap, Bp = gpower(A, p), gpower(B, p)
    if method == "ladder":
        val, trace = _ladder(lambda e: _harm_eps(Ap.mat, Bp.mat, alpha, e))
        basis = proj_meet(support(A), support(B)).basis
        return _result(_root_on(val, 1.0 / p, basis), trace)
    if method != "auto":
        raise InvalidInput(f"unknown method {method!r}")
    if Ap.is_pd() and Bp.is_pd():
        inv = (1 - alpha) * gpower(Ap, -1).mat + alpha * gpower(Bp, -1).mat
        M = _pd_block_pow(inv, -1)
        return _result(_root_on(M, 1.0 / p, np.eye(A.dim, dtype=complex)))
    M, basis = _harm_base(Ap, Bp, alpha)
    return _result(_root_on(M, 1.0 / p, basis))


# ----------------------------------------------------------------------
# geometric
# ----------------------------------------------------------------------


def _mp_herm(w: np.ndarray, v: np.ndarray, real: bool):
    """Exact-rank mpmath matrix ``sum w_i v_i v_i*`` over strictly positive ``w``."""
    n = v.shape[0]
    M = mpmath.zeros(n, n)
    for k in np.flatnonzero(w > 0):
        col = v[:, k]
        lam = mpmath.mpf(float(w[k]))
        for i in range(n):
            ci = mpmath.mpf(col[i].real) if real else mpmath.mpc(col[i].real, col[i].imag)
            for j in range(n):
                cj = mpmath.mpf(col[j].real) if real else mpmath.mpc(col[j].real, -col[j].imag)
                M[i, j] += lam * ci * cj
    return M


def _mp_fun(M, f, real: bool):
    if real:
        E, Q = mpmath.eigsy(M)
        Qh = Q.T
    else:
        E, Q = mpmath.eighe(M)
        Qh = Q.transpose_conj()
    n = M.rows
    D = mpmath.zeros(n, n)
    for i in range(n):
        D[i, i] = f(mpmath.re(E[i]))
    return Q * D * Qh


def _mp_to_np(M, real: bool) -> np.ndarray:
    n = M.rows
    if real:
        return np.array([[float(mpmath.re(M[i, j])) for j in range(n)] for i in range(n)], dtype=complex)
    return np.array(
        [[complex(float(mpmath.re(M[i, j])), float(mpmath.im(M[i, j]))) for j in range(n)] for i in range(n)]
    )


def _geo_crossed(a: PsdMat, b: PsdMat, alpha: float) -> tuple[np.ndarray, list]:
    """``a #_alpha b`` for singular blocks with crossed supports.

    The regularized error decays like ``eps**min(alpha, 1-alpha)``, so the
    limit is taken in extended precision at ``eps`` small enough that this
    decay reaches double-precision resolution. The regularized matrix has
    condition number about ``eps**-2`` and rounding noise in its smallest
    eigenvalues is raised to the power ``alpha``, so the working precision
    is twice the exponent of ``eps``.
    """
    real = bool(np.all(np.abs(a.mat.imag) == 0) and np.all(np.abs(b.mat.imag) == 0))
    m = min(alpha, 1 - alpha)
    trace = []
    prev = None
    for digits in (17, 20, 24):
        e_exp = int(np.ceil(digits / m))
        with mpmath.workdps(2 * e_exp + 30):
            eps = mpmath.mpf(10) ** (-e_exp)
            n = a.dim
            Ae = _mp_herm(a.eigenvalues, a.eigenvectors, real) + eps * mpmath.eye(n)
            Be = _mp_herm(b.eigenvalues, b.eigenvectors, real) + eps * mpmath.eye(n)
            Ah = _mp_fun(Ae, mpmath.sqrt, real)
            Aih = _mp_fun(Ae, lambda x: 1 / mpmath.sqrt(x), real)
            C = Aih * Be * Aih
            C = (C + (C.T if real else C.transpose_conj())) / 2
            G = Ah * _mp_fun(C, lambda x: mpmath.power(x, alpha) if x > 0 else mpmath.mpf(0), real) * Ah
            val = hermitian(_mp_to_np(G, real))
        trace.append((float(10.0 ** (-min(e_exp, 300))), val))
        if prev is not None and max_abs(val - prev) <= 1e-10 * max(1.0, max_abs(val)):
            return val, trace
        prev = val
    raise NonConvergence("extended-precision ladder for the geometric mean did not settle")


def _geo_base(Ap: PsdMat, Bp: PsdMat, alpha: float) -> tuple[np.ndarray, np.ndarray, list | None]:
    """``A #_alpha B`` for PSD inputs as (matrix, support basis, trace)."""
    n = Ap.dim
    if alpha == 0:
        return Ap.mat, Ap.support_basis, None
    if alpha == 1:
        return Bp.mat, Bp.support_basis, None
    meet = proj_meet(support(Ap), support(Bp)).basis
    if meet.shape[1] == 0:
        return np.zeros((n, n), dtype=complex), meet, None
    J = proj_join(support(Ap), support(Bp)).basis
    a = compress(Ap.mat, J)
    b = compress(Bp.mat, J)
    pa = PsdMat(a, check=False)
    pb = PsdMat(b, check=False)
    if pa.rank == pa.dim:
        return embed(_pd_geo(a, b, alpha, pb.rank == pb.dim), J), meet, None
    if pb.rank == pb.dim:
        return embed(_pd_geo(b, a, 1 - alpha), J), meet, None
    val, trace = _geo_crossed(pa, pb, alpha)
    return embed(val, J), meet, trace


def geometric_quasi(A, B, alpha: float, p: float) -> MeanResult:
    """Quasi geometric mean ``(A^p #_alpha B^p)^{1/p}``.

    The regularized limit is reduced to the joint support. There, if either
    argument is invertible the closed formula is exact; otherwise an
    extended-precision ladder is used and its trace is attached.
    """
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    Ap, Bp = gpower(A, p), gpower(B, p)
    M, basis, trace = _geo_base(Ap, Bp, alpha)
    return _result(_root_on(M, 1.0 / p, basis), trace)


# ----------------------------------------------------------------------
# spectral geometric means
# ----------------------------------------------------------------------


def _sg_blocks(A: PsdMat, B: PsdMat, p: float):
    if not support_leq(support(B), support(A)):
        raise SupportViolation("support condition s(B) <= s(A) fails")
    V = A.support_basis
    a = compress(gpower(A, p).mat, V)
    b = compress(gpower(B, p).mat, V)
    return V, a, b


def spectral_geometric(A, B, alpha: float, p: float) -> MeanResult:
    """Quasi spectral geometric mean ``F_alpha(A^p, B^p)^{1/p}``.

    ``F_alpha(a, b) = (a^{-1} # b)^alpha a (a^{-1} # b)^alpha`` evaluated on
    the support of ``A``; requires ``s(B) <= s(A)``.

    Raises
    ------
    SupportViolation
        If ``s(B)`` is not contained in ``s(A)``.
    """
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    n = A.dim
    if B.rank == 0:
        return _result(PsdMat(np.zeros((n, n))))
    V, a, b = _sg_blocks(A, B, p)
    full = B.rank == A.rank
    ah = _pd_block_pow(a, 0.5)
    aih = _pd_block_pow(a, -0.5)
    mid = _blk_pow(hermitian(ah @ b @ ah), 0.5, full)
    M = hermitian(aih @ mid @ aih)  # a^{-1} # b
    Ma = _blk_pow(M, alpha, full)
    F = hermitian(Ma @ a @ Ma)
    return _result(_root_on(embed(F, V), 1.0 / p, B.support_basis))


def spectral_geometric_tilde(A, B, alpha: float, p: float) -> MeanResult:
    """Tilde spectral geometric mean ``F~_alpha(A^p, B^p)^{1/p}``.

    ``F~_alpha(a, b) = (a^{-1} #_alpha b)^{1/2} a^{2(1-alpha)} (a^{-1} #_alpha b)^{1/2}``
    on the support of ``A``; requires ``s(B) <= s(A)``.
    """
    _check_alpha(alpha)
    _check_p(p)
    A, B = _prep(A, B)
    n = A.dim
    if alpha == 0:
        return _result(A)
    if B.rank == 0:
        return _result(PsdMat(np.zeros((n, n))))
    V, a, b = _sg_blocks(A, B, p)
    full = B.rank == A.rank
    ainv = _pd_block_pow(a, -1)
    M = _pd_geo(ainv, b, alpha, full)
    Mh = _blk_pow(M, 0.5, full)
    F = hermitian(Mh @ _pd_block_pow(a, 2 * (1 - alpha)) @ Mh)
    return _result(_root_on(embed(F, V), 1.0 / p, B.support_basis))


# ----------------------------------------------------------------------
# Kubo-Ando
# ----------------------------------------------------------------------


def _ka_pd(a: np.ndarray, b: np.ndarray, f) -> np.ndarray:
    ah = _pd_block_pow(a, 0.5)
    aih = _pd_block_pow(a, -0.5)
    c = hermitian(aih @ b @ aih)
    w, v = eigh(c)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(np.clip(w, 1e-300, None)), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise NumericalDomain("representing function is not finite on the spectrum")
    return hermitian(ah @ ((v * fw) @ v.conj().T) @ ah)


def kubo_ando(A, B, f: Callable[[np.ndarray], np.ndarray]) -> MeanResult:
    """Kubo-Ando mean ``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}``.

    ``f`` must be operator monotone with ``f(1) = 1``; this is not checked.
    For singular inputs the mean is the limit of the regularized pair. It is
    computed on the joint support by a linear Richardson ladder and raises
    `NonConvergence` when the ladder does not settle.
    """
    A, B = _prep(A, B)
    n = A.dim
    if A.is_pd() and B.is_pd():
        return _result(PsdMat(_ka_pd(A.mat, B.mat, f), check=False))
    J = proj_join(support(A), support(B)).basis
    a = compress(A.mat, J)
    b = compress(B.mat, J)
    k = J.shape[1]
    if k == 0:
        return _result(PsdMat(np.zeros((n, n))))
    eye = np.eye(k)
    val, trace = _ladder(lambda e: _ka_pd(a + e * eye, b + e * eye, f))
    trace = [(e, embed(v, J)) for e, v in trace]
    return _result(PsdMat(embed(val, J), check=False), trace)


# ----------------------------------------------------------------------
# dispatch and continuity
# ----------------------------------------------------------------------


def evaluate(spec: MeanSpec, A, B) -> PsdMat:
    """Evaluate ``spec`` on ``(A, B)`` and return the value."""
    k, a, p = spec.kind, spec.alpha, spec.p
    if k is MeanKind.ARITHMETIC:
        return arithmetic_quasi(A, B, a, p)
    if k is MeanKind.HARMONIC:
        return harmonic_quasi(A, B, a, p).value
    if k is MeanKind.GEOMETRIC:
        return geometric_quasi(A, B, a, p).value
    if k is MeanKind.SPECTRAL_GEOMETRIC:
        return spectral_geometric(A, B, a, p).value
    if k is MeanKind.SPECTRAL_GEOMETRIC_TILDE:
        return spectral_geometric_tilde(A, B, a, p).value
    if k is MeanKind.RENYI:
        return renyi_mean(A, B, a, p)
    if k is MeanKind.LOG_EUCLIDEAN:
        return log_euclidean(A, B, a)
    return kubo_ando(A, B, spec.rep_fn).value


@dataclass
class ContinuityReport:
    """Gaps ``|M(A+eps, B+eps) - M(A, B)|_max`` down an epsilon ladder."""

    eps: list[float]
    gaps: list[float]
    monotone: bool
    final_gap: float


def epsilon_continuity_check(spec: MeanSpec, A, B, eps_ladder: Sequence[float] = LADDER) -> ContinuityReport:
    """Compare the mean at shifted inputs with its value at ``(A, B)``."""
    A, B = _prep(A, B)
    target = evaluate(spec, A, B).mat
    n = A.dim
    gaps = []
    for eps in eps_ladder:
        val = evaluate(spec, A.mat + eps * np.eye(n), B.mat + eps * np.eye(n)).mat
        gaps.append(max_abs(val - target))
    mono = all(g1 <= g0 * (1 + 1e-6) + 1e-13 for g0, g1 in zip(gaps, gaps[1:]))
    return ContinuityReport(list(eps_ladder), gaps, mono, gaps[-1])


def representing_function(kind: MeanKind | str, alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    """Representing function of the weighted arithmetic, geometric or harmonic mean."""
    kind = MeanKind.parse(kind) if isinstance(kind, str) else kind
    if kind is MeanKind.ARITHMETIC:
        return lambda x: (1 - alpha) + alpha * x
    if kind is MeanKind.GEOMETRIC:
        return lambda x: x**alpha
    if kind is MeanKind.HARMONIC:
        return lambda x: 1.0 / ((1 - alpha) + alpha / x)
    raise InvalidInput(f"no built-in representing function for {kind.value}")
