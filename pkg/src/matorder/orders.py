"""Matrix orderings between positive semidefinite matrices.

Every decision returns an `OrderVerdict` carrying a signed margin in the
natural scale of the ordering. A verdict holds when ``margin >= -tol``;
verdicts with ``|margin| <= tol`` are flagged as boundary cases.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import InvalidInput
from .linalg import (
    PsdMat,
    as_psd,
    compress,
    eigh,
    glog,
    gpower,
    hermitian,
    support,
    support_leq,
)
from .means import _pd_block_pow, _pd_geo, _pow_block

REL_TOL = 1e-9
NEAR_MP_COND = 1e3
LOG_DET_TOL = 1e-8


class OrderKind(str, enum.Enum):
    LOEWNER = "loewner"
    CHAOTIC = "chao"
    NEAR = "near"
    EIGEN = "eigen"
    WEAK_MAJOR = "w"
    WEAK_LOG_MAJOR = "wlog"
    LOG_MAJOR = "log"
    TRACE = "trace"

    @classmethod
    def parse(cls, name: str) -> "OrderKind":
        key = name.strip().lower()
        kind = _ORDER_ALIASES.get(key)
        if kind is None:
            try:
                return cls(key)
            except ValueError:
                raise InvalidInput(f"unknown order {name!r}") from None
        return kind


_ORDER_ALIASES = {
    "le": OrderKind.LOEWNER,
    "chaotic": OrderKind.CHAOTIC,
    "lambda": OrderKind.EIGEN,
    "eig": OrderKind.EIGEN,
    "weak": OrderKind.WEAK_MAJOR,
    "weak_major": OrderKind.WEAK_MAJOR,
    "weak_log_major": OrderKind.WEAK_LOG_MAJOR,
    "log_major": OrderKind.LOG_MAJOR,
    "tr": OrderKind.TRACE,
}

# strongest to weakest
CHAIN = (
    OrderKind.LOEWNER,
    OrderKind.CHAOTIC,
    OrderKind.NEAR,
    OrderKind.EIGEN,
    OrderKind.WEAK_LOG_MAJOR,
    OrderKind.WEAK_MAJOR,
    OrderKind.TRACE,
)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class OrderVerdict:
    """Outcome of one ordering test ``X <| Y``."""

    order: OrderKind
    holds: bool
    margin: float
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def boundary(self) -> bool:
        return abs(self.margin) <= self.tol

    def to_obj(self) -> dict:
        return _jsonable(
            {
                "order": self.order.value,
                "holds": self.holds,
                "margin": float(self.margin),
                "boundary": self.boundary,
                "detail": self.detail,
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)


def _verdict(kind: OrderKind, margin: float, tol: float, **detail) -> OrderVerdict:
    return OrderVerdict(kind, bool(margin >= -tol), float(margin), float(tol), detail)


def _pair(X, Y) -> tuple[PsdMat, PsdMat]:
    X, Y = as_psd(X), as_psd(Y)
    if X.dim != Y.dim:
        raise InvalidInput(f"dimension mismatch: {X.dim} vs {Y.dim}")
    return X, Y


def decision_tol(X: PsdMat, Y: PsdMat, rel: float = REL_TOL) -> float:
    """``rel * max(1, largest eigenvalue of X or Y)``."""
    return rel * max(1.0, X.lmax, Y.lmax)


def loewner_le(X, Y) -> OrderVerdict:
    """``X <= Y``: margin is ``min eig(Y - X)``."""
    X, Y = _pair(X, Y)
    m = float(eigh(Y.mat - X.mat).eigenvalues[-1])
    return _verdict(OrderKind.LOEWNER, m, decision_tol(X, Y))


def chaotic_le(X, Y) -> OrderVerdict:
    """Chaotic order: ``s(X) <= s(Y)`` and ``s(X) log X s(X) <= s(X) log Y s(X)``.

    The margin is the smallest eigenvalue of the compressed log difference on
    ``range(s(X))``; it is ``-inf`` when the support condition fails.
    """
    X, Y = _pair(X, Y)
    sx, sy = support(X), support(Y)
    if not support_leq(sx, sy):
        return _verdict(OrderKind.CHAOTIC, -math.inf, REL_TOL, support_ok=False)
    V = sx.basis
    if V.shape[1] == 0:
        return _verdict(OrderKind.CHAOTIC, math.inf, REL_TOL, support_ok=True, empty=True)
    lx, ly = compress(glog(X), V), compress(glog(Y), V)
    scale = max(1.0, float(np.max(np.abs(eigh(lx).eigenvalues))), float(np.max(np.abs(eigh(ly).eigenvalues))))
    m = float(eigh(ly - lx).eigenvalues[-1])
    return _verdict(OrderKind.CHAOTIC, m, REL_TOL * scale, support_ok=True)


def _near_top_mp(X: PsdMat, Y: PsdMat) -> float:
    """Largest eigenvalue of ``X # Y^{-1}`` in extended precision.

    Works in the eigenbasis of ``Y``, where ``Y`` is diagonal, and treats the
    stored spectral data of both matrices as exact.
    """
    keep = Y.eigenvalues > 0
    wy, V = Y.eigenvalues[keep], Y.eigenvectors[:, keep]
    cond = float(wy[0] / wy[-1])
    dps = 30 + int(math.ceil(math.log10(max(cond, 10.0))))
    r = wy.size
    with mpmath.workdps(dps):
        C = V.conj().T @ X.eigenvectors  # coordinates of X's eigenvectors
        D = mpmath.zeros(r, r)
        yh = [mpmath.sqrt(mpmath.mpf(float(w))) for w in wy]
        for k in np.flatnonzero(X.eigenvalues > 0):
            lam = mpmath.mpf(float(X.eigenvalues[k]))
            col = [mpmath.mpc(c.real, c.imag) for c in C[:, k]]
            for i in range(r):
                for j in range(r):
                    D[i, j] += lam * yh[i] * col[i] * mpmath.conj(col[j]) * yh[j]
        E, Q = mpmath.eighe(D)
        S = Q * mpmath.diag([mpmath.sqrt(max(mpmath.re(e), 0)) for e in E]) * Q.transpose_conj()
        for i in range(r):
            for j in range(r):
                S[i, j] = S[i, j] / (yh[i] * yh[j])
        top = max(mpmath.re(e) for e in mpmath.eighe(S, eigvals_only=True))
        return float(top)


def _near_matrix(X: PsdMat, Y: PsdMat) -> np.ndarray:
    """``X # Y^{-1}`` compressed to ``range(s(Y))``, assuming ``s(X) <= s(Y)``."""
    V = Y.support_basis
    yinv = _pd_block_pow(compress(Y.mat, V), -1)
    x = compress(X.mat, V)
    return _pd_geo(yinv, x, 0.5, X.rank == Y.rank)


def near_le(X, Y) -> OrderVerdict:
    """Near order: ``s(X) <= s(Y)`` and ``X # Y^{-1} <= I``.

    Margin is ``1 - max eig(X # Y^{-1})`` (``-inf`` on support failure).
    """
    X, Y = _pair(X, Y)
    if not support_leq(support(X), support(Y)):
        return _verdict(OrderKind.NEAR, -math.inf, REL_TOL, support_ok=False)
    if X.rank == 0:
        return _verdict(OrderKind.NEAR, 1.0, REL_TOL, support_ok=True)
    wy = Y.eigenvalues[Y.eigenvalues > 0]
    if wy[0] > NEAR_MP_COND * wy[-1]:
        top = _near_top_mp(X, Y)
    else:
        top = float(eigh(_near_matrix(X, Y)).eigenvalues[0])
    return _verdict(OrderKind.NEAR, 1.0 - top, REL_TOL, support_ok=True, max_eig=top)


def near_riccati(X, Y) -> float:
    """Independent near-order margin ``min eig(Y - (Y^{1/2} X Y^{1/2})^{1/2})``.

    Its sign agrees with `near_le` for positive definite pairs.
    """
    X, Y = _pair(X, Y)
    yh = _pd_block_pow(Y.mat, 0.5)
    inner = _pow_block(hermitian(yh @ X.mat @ yh), 0.5)
    return float(eigh(Y.mat - inner).eigenvalues[-1])


def eigen_le(X, Y) -> OrderVerdict:
    """Entrywise order of descending eigenvalues."""
    X, Y = _pair(X, Y)
    d = Y.eigenvalues - X.eigenvalues
    i = int(np.argmin(d))
    return _verdict(OrderKind.EIGEN, float(d[i]), decision_tol(X, Y), index=i + 1)


def weak_major(X, Y) -> OrderVerdict:
    """Weak majorization: leading partial sums of ``lambda(X)`` bounded by those of ``lambda(Y)``."""
    X, Y = _pair(X, Y)
    d = np.cumsum(Y.eigenvalues) - np.cumsum(X.eigenvalues)
    k = int(np.argmin(d))
    return _verdict(OrderKind.WEAK_MAJOR, float(d[k]), decision_tol(X, Y) * X.dim, k=k + 1)


def _log_partial(w: np.ndarray) -> np.ndarray:
    """Cumulative sums of ``log w``; ``-inf`` once a zero eigenvalue enters."""
    with np.errstate(divide="ignore"):
        lw = np.where(w > 0, np.log(np.where(w > 0, w, 1.0)), -np.inf)
    return np.cumsum(lw)


def _wlog_margins(X: PsdMat, Y: PsdMat) -> tuple[np.ndarray, float]:
    lx, ly = _log_partial(X.eigenvalues), _log_partial(Y.eigenvalues)
    out = np.empty_like(lx)
    for k in range(lx.size):
        if lx[k] == -np.inf:
            out[k] = np.inf
        elif ly[k] == -np.inf:
            out[k] = -np.inf
        else:
            out[k] = ly[k] - lx[k]
    finite = [abs(v) for v in np.concatenate([lx, ly]) if np.isfinite(v)]
    tol = REL_TOL * max([1.0] + finite)
    return out, tol


def weak_log_major(X, Y) -> OrderVerdict:
    """Weak log-majorization, decided on log partial sums.

    Zero eigenvalues make a partial product exactly 0: a zero product for
    ``X`` always passes, and a zero product for ``Y`` against a positive one
    for ``X`` fails with margin ``-inf``.
    """
    X, Y = _pair(X, Y)
    d, tol = _wlog_margins(X, Y)
    k = int(np.argmin(d))
    return _verdict(OrderKind.WEAK_LOG_MAJOR, float(d[k]), tol, k=k + 1)


def log_major(X, Y) -> OrderVerdict:
    """Log-majorization: weak log-majorization plus ``det X = det Y``.

    Determinants are compared in log scale with tolerance ``1e-8`` when both
    matrices are invertible; if either is singular both must be.
    """
    X, Y = _pair(X, Y)
    d, tol = _wlog_margins(X, Y)
    k = int(np.argmin(d))
    wl = float(d[k])
    full_x, full_y = X.rank == X.dim, Y.rank == Y.dim
    if full_x and full_y:
        gap = abs(float(np.sum(np.log(X.eigenvalues)) - np.sum(np.log(Y.eigenvalues))))
    elif not full_x and not full_y:
        gap = 0.0
    else:
        gap = math.inf
    tol = max(tol, LOG_DET_TOL)
    return _verdict(OrderKind.LOG_MAJOR, min(wl, -gap), tol, k=k + 1, log_det_gap=gap)


def trace_le(X, Y) -> OrderVerdict:
    """``Tr X <= Tr Y``."""
    X, Y = _pair(X, Y)
    m = float(np.sum(Y.eigenvalues) - np.sum(X.eigenvalues))
    return _verdict(OrderKind.TRACE, m, decision_tol(X, Y) * X.dim)


_DISPATCH = {
    OrderKind.LOEWNER: loewner_le,
    OrderKind.CHAOTIC: chaotic_le,
    OrderKind.NEAR: near_le,
    OrderKind.EIGEN: eigen_le,
    OrderKind.WEAK_MAJOR: weak_major,
    OrderKind.WEAK_LOG_MAJOR: weak_log_major,
    OrderKind.LOG_MAJOR: log_major,
    OrderKind.TRACE: trace_le,
}


def decide(order: OrderKind | str, X, Y) -> OrderVerdict:
    """Dispatch on ``order``."""
    kind = OrderKind.parse(order) if isinstance(order, str) else order
    return _DISPATCH[kind](X, Y)


def chaotic_criterion(X, Y, p: float = 1e-3) -> float:
    """Margin ``1 - max eig(X^p # Y^{-p})`` of the small-power chaotic test.

    For positive definite pairs, ``X <=_chao Y`` holds iff this is
    nonnegative for every small ``p > 0``.
    """
    X, Y = _pair(X, Y)
    xp = gpower(X, p).mat
    yinv = gpower(Y, -p).mat
    return 1.0 - float(eigh(_pd_geo(xp, yinv, 0.5, True)).eigenvalues[0])


def log_shift_le(X, Y, t: float) -> float:
    """``min eig(log(tI + Y) - log(tI + X))``."""
    X, Y = _pair(X, Y)
    n = X.dim
    lx = glog(PsdMat(X.mat + t * np.eye(n)))
    ly = glog(PsdMat(Y.mat + t * np.eye(n)))
    return float(eigh(ly - lx).eigenvalues[-1])


@dataclass
class ChainReport:
    """All chain orderings for one pair plus any implication violations."""

    verdicts: dict[OrderKind, OrderVerdict]
    violations: list[tuple[OrderKind, OrderKind]]

    @property
    def consistent(self) -> bool:
        return not self.violations

    def to_obj(self) -> dict:
        return {
            "verdicts": [self.verdicts[k].to_obj() for k in CHAIN],
            "chain_consistent": self.consistent,
            "violations": [[a.value, b.value] for a, b in self.violations],
        }


def implication_chain(X, Y) -> ChainReport:
    """Evaluate the seven chain orderings and flag broken implications.

    A violation is recorded when a stronger ordering holds away from its
    boundary band while a weaker one fails beyond its own band.
    """
    X, Y = _pair(X, Y)
    verdicts = {k: _DISPATCH[k](X, Y) for k in CHAIN}
    violations = []
    for i, strong in enumerate(CHAIN):
        vs = verdicts[strong]
        if not vs.holds or vs.boundary:
            continue
        for weak in CHAIN[i + 1 :]:
            if not verdicts[weak].holds:
                violations.append((strong, weak))
    return ChainReport(verdicts, violations)
