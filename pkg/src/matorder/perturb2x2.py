"""Second-order perturbation expansions for 2x2 matrix families.

Two families are used. The rotated pair is ``A0 = diag(1, x)`` and
``B_t = R_t diag(1, y) R_t^T``. The tilted pair is ``A0 = diag(2, 0)`` with
``B_t`` the rank-one projection onto ``(cos t, sin t)``. Means of such pairs
have the normal form

    [[a + t^2 c11, t c12], [t c12, b + t^2 c22]] + o(t^2),

and the closed-form coefficients below are checked against
`numeric_coeff_oracle`, an independent finite-difference extractor.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import mpmath
import numpy as np

from .errors import DegenerateBase, InvalidInput, OracleUnstable
from .linalg import PsdMat

DEGEN_TOL = 1e-8
FD_STEPS = (1e-3, 5e-4, 2.5e-4)
DET_STEPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Family2x2:
    """A one-parameter pair ``(A0, B_theta)``.

    Parameters
    ----------
    kind : {"rotated", "tilted"}
    x, y : float
        Positive parameters of the rotated family (ignored for "tilted").
    """

    kind: str = "rotated"
    x: float = 1.0
    y: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rotated", "tilted"):
            raise InvalidInput(f"unknown family {self.kind!r}")
        if self.kind == "rotated" and not (self.x > 0 and self.y > 0):
            raise InvalidInput("rotated family needs x > 0 and y > 0")

    def matrices(self, theta: float) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(theta), math.sin(theta)
        if self.kind == "tilted":
            return np.diag([2.0, 0.0]), np.array([[c * c, c * s], [c * s, s * s]])
        a0 = np.diag([1.0, self.x])
        r = np.array([[c, -s], [s, c]])
        return a0, r @ np.diag([1.0, self.y]) @ r.T


def family_eval(fam: Family2x2, theta: float) -> tuple[PsdMat, PsdMat]:
    """Exact ``(A0, B_theta)`` for the family."""
    a0, bt = fam.matrices(theta)
    return PsdMat(a0), PsdMat(bt)


@dataclass
class EntryExpansion:
    """Constant, linear and quadratic coefficients of a 2x2 family."""

    const: np.ndarray
    lin: np.ndarray
    quad: np.ndarray
    err: np.ndarray | None = None


def btheta_expansion(y: float) -> EntryExpansion:
    """Expansion of the rotated ``B_theta`` around ``theta = 0``."""
    d = 1.0 - y
    return EntryExpansion(
        const=np.diag([1.0, y]),
        lin=np.array([[0.0, d], [d, 0.0]]),
        quad=np.diag([-d, d]),
    )


# ----------------------------------------------------------------------
# Daleckii-Krein second-order expansion
# ----------------------------------------------------------------------


class ScalarFn(NamedTuple):
    """A scalar function with its derivative."""

    f: Callable[[float], float]
    df: Callable[[float], float]


def power_fn(r: float) -> ScalarFn:
    return ScalarFn(lambda t: t**r, lambda t: r * t ** (r - 1))


EXP_FN = ScalarFn(math.exp, math.exp)
LOG_FN = ScalarFn(math.log, lambda t: 1.0 / t)


def _scale(*vals: float) -> float:
    return max(1.0, *(abs(v) for v in vals))


def daleckii_expand(a: float, b: float, x11: float, x22: float, x12: float,
                    f: ScalarFn | tuple) -> tuple[float, float, float]:
    """Coefficients of ``f(X_theta)`` for ``X_theta`` in the 2x2 normal form.

    With ``X_theta = [[a + t^2 x11, t x12], [t x12, b + t^2 x22]]``,
    ``f(X_theta) = [[f(a) + t^2 y11, t y12], [t y12, f(b) + t^2 y22]] + o(t^2)``.

    Returns
    -------
    (y11, y22, y12)

    Raises
    ------
    DegenerateBase
        If ``a`` and ``b`` coincide within tolerance.
    """
    fn, dfn = f
    if abs(a - b) < DEGEN_TOL * _scale(a, b):
        raise DegenerateBase(f"base eigenvalues coincide: a={a}, b={b}")
    d = a - b
    fa, fb, da, db = fn(a), fn(b), dfn(a), dfn(b)
    y11 = da * x11 + (da * d - fa + fb) / d**2 * x12**2
    y22 = db * x22 + (fa - fb - db * d) / d**2 * x12**2
    y12 = (fa - fb) / d * x12
    return y11, y22, y12


# ----------------------------------------------------------------------
# closed-form coefficient sets
# ----------------------------------------------------------------------


@dataclass
class CoeffSet:
    """θ-expansion coefficients ``(c11, c22, c12)`` around ``diag(a, b)``."""

    lemma_tag: str
    c11: float
    c22: float
    c12: float
    const: tuple[float, float]
    params: dict = field(default_factory=dict)

    def as_expansion(self) -> EntryExpansion:
        return EntryExpansion(
            const=np.diag(self.const),
            lin=np.array([[0.0, self.c12], [self.c12, 0.0]]),
            quad=np.diag([self.c11, self.c22]),
        )


def _guard(value: float, scale: float, what: str) -> None:
    if abs(value) < DEGEN_TOL * max(1.0, scale):
        raise DegenerateBase(f"degenerate base: {what} = {value:.3e}")


def coeffs_arithmetic(alpha: float, p: float, x: float, y: float) -> CoeffSet:
    """Coefficients of the quasi arithmetic mean of the rotated family."""
    s = (1 - alpha) * x**p + alpha * y**p
    zeta = 1 - s
    _guard(zeta, s, "1 - ((1-alpha) x^p + alpha y^p)")
    r = s ** (1 / p)
    u11 = (-alpha * (1 - alpha) * (1 - x**p) * (1 - y**p) / (p * zeta)
           - alpha**2 * (1 - y**p) ** 2 * (1 - r) / zeta**2)
    u22 = (alpha * (1 - alpha) * (1 - x**p) * (1 - y**p) * s ** (1 / p - 1) / (p * zeta)
           + alpha**2 * (1 - y**p) ** 2 * (1 - r) / zeta**2)
    u12 = alpha * (1 - y**p) * (1 - r) / zeta
    return CoeffSet("arith", u11, u22, u12, (1.0, r), dict(alpha=alpha, p=p, x=x, y=y))


def coeffs_log_euclidean(alpha: float, x: float, y: float) -> CoeffSet:
    """Coefficients of the log-Euclidean mean of the rotated family."""
    g = x ** (1 - alpha) * y**alpha
    L = math.log(g)
    _guard(L, 1.0, "log(x^(1-alpha) y^alpha)")
    lx, ly = math.log(x), math.log(y)
    v11 = alpha * (1 - alpha) * lx * ly / L - alpha**2 * (1 - g) * ly**2 / L**2
    v22 = -alpha * (1 - alpha) * g * lx * ly / L + alpha**2 * (1 - g) * ly**2 / L**2
    v12 = alpha * (1 - g) * ly / L
    return CoeffSet("le", v11, v22, v12, (1.0, g), dict(alpha=alpha, x=x, y=y))


def _guard_x(x: float) -> None:
    _guard(1 - x, x, "1 - x")


def coeffs_renyi(alpha: float, p: float, x: float) -> CoeffSet:
    """Coefficients of the Renyi mean of the rotated family with ``y = x``."""
    _guard_x(x)
    D = x ** ((1 - alpha) * p / 2) - x ** ((1 + alpha) * p / 2)
    den = p * (1 - x**p) ** 2
    z11 = -(1 - x ** (alpha * p)) / p + (1 - p + p * x - x**p) * D**2 / den
    z22 = (x ** (1 - alpha * p) - x) / p + (p + (1 - p) * x - x ** (1 - p)) * D**2 / den
    z12 = (1 - x) * D / (1 - x**p)
    return CoeffSet("renyi", z11, z22, z12, (1.0, x), dict(alpha=alpha, p=p, x=x))


def coeffs_geometric(alpha: float, p: float, x: float) -> CoeffSet:
    """Coefficients of the quasi geometric mean of the rotated family with ``y = x``."""
    _guard_x(x)
    z11 = alpha * (1 - alpha) * (x**p - x ** (-p)) / (2 * p) - alpha**2 * (1 - x)
    z22 = alpha * (1 - alpha) * (x ** (1 - p) - x ** (1 + p)) / (2 * p) + alpha**2 * (1 - x)
    return CoeffSet("geo", z11, z22, alpha * (1 - x), (1.0, x), dict(alpha=alpha, p=p, x=x))


def coeffs_arithmetic_equal(alpha: float, q: float, x: float) -> CoeffSet:
    """Coefficients of the quasi arithmetic mean of the rotated family with ``y = x``."""
    _guard_x(x)
    w11 = alpha * (1 - alpha) * (x**q - 1) / q - alpha**2 * (1 - x)
    w22 = alpha * (1 - alpha) * (x ** (1 - q) - x) / q + alpha**2 * (1 - x)
    return CoeffSet("arith_eq", w11, w22, alpha * (1 - x), (1.0, x), dict(alpha=alpha, q=q, x=x))


def trace_coeff_arithmetic_equal(alpha: float, q: float, x: float) -> float:
    """θ² coefficient of ``Tr A_{alpha,q}(A0, B_theta)`` with ``y = x``."""
    return alpha * (1 - alpha) / q * (-1 - x + x**q + x ** (1 - q))


# ----------------------------------------------------------------------
# determinant gaps
# ----------------------------------------------------------------------


def det_gap_arith_arith(alpha: float, p: float, q: float, x: float, y: float) -> float:
    """θ² coefficient of ``det(A_{alpha,q} - A_{alpha,p})`` on the rotated family."""
    sp = (1 - alpha) * x**p + alpha * y**p
    sq = (1 - alpha) * x**q + alpha * y**q
    zp, zq = 1 - sp, 1 - sq
    _guard(zp, sp, "zeta_p")
    _guard(zq, sq, "zeta_q")
    rp, rq = sp ** (1 / p), sq ** (1 / q)
    t1 = alpha * (1 - alpha) * (
        (1 - x**p) * (1 - y**p) / (p * zp) - (1 - x**q) * (1 - y**q) / (q * zq)
    ) * (rq - rp)
    t2 = alpha**2 * ((1 - y**p) / zp - (1 - y**q) / zq) ** 2 * (1 - rp) * (1 - rq)
    return t1 - t2


def det_gap_le_arith(alpha: float, p: float, x: float, y: float) -> float:
    """θ² coefficient of ``det(A_{alpha,p} - LE_alpha)`` on the rotated family."""
    s = (1 - alpha) * x**p + alpha * y**p
    zeta = 1 - s
    _guard(zeta, s, "zeta_p")
    g = x ** (1 - alpha) * y**alpha
    L = math.log(g)
    _guard(L, 1.0, "log(x^(1-alpha) y^alpha)")
    r = s ** (1 / p)
    lx, ly = math.log(x), math.log(y)
    t1 = -alpha * (1 - alpha) * ((1 - x**p) * (1 - y**p) / (p * zeta) + lx * ly / L) * (r - g)
    t2 = alpha**2 * ((1 - y**p) / zeta - ly / L) ** 2 * (1 - g) * (1 - r)
    return t1 - t2


def det_gap_tilted(alpha: float, p: float, q: float) -> float:
    """θ² coefficient of ``det(A_{alpha,q} - A_{alpha,p})`` on the tilted family."""
    if not (0 < p < 1 and 0 < q < 1):
        raise InvalidInput("tilted determinant gap needs 0 < p, q < 1")
    cp = alpha + (1 - alpha) * 2**p
    cq = alpha + (1 - alpha) * 2**q
    return -(cp ** (1 / p)) * cq ** (1 / q) * (alpha / cp - alpha / cq) ** 2


def eig_expand(a: float, b: float, x11: float, x22: float, x12: float) -> tuple[float, float]:
    """θ² corrections of the two eigenvalues of the 2x2 normal form.

    Returned in descending order of the base values ``a`` and ``b``.
    """
    if abs(a - b) < DEGEN_TOL * _scale(a, b):
        raise DegenerateBase(f"base eigenvalues coincide: a={a}, b={b}")
    if a > b:
        return x11 + x12**2 / (a - b), x22 - x12**2 / (a - b)
    return x22 + x12**2 / (b - a), x11 - x12**2 / (b - a)


# ----------------------------------------------------------------------
# oracles
# ----------------------------------------------------------------------


def _real(m) -> np.ndarray:
    return np.real(np.asarray(m.mat if isinstance(m, PsdMat) else m, dtype=complex))


def numeric_coeff_oracle(matrix_fn: Callable[[float], np.ndarray], order: int = 2,
                         steps: Iterable[float] = FD_STEPS) -> EntryExpansion:
    """Central-difference estimate of the θ and θ² coefficients at θ = 0.

    Two rounds of Richardson extrapolation are applied over the halving step
    sequence. The residual between the last two extrapolants is reported as
    ``err``.

    Raises
    ------
    OracleUnstable
        If the residual exceeds ``1e-3`` of the coefficient scale.
    """
    h = list(steps)
    if len(h) != 3:
        raise InvalidInput("oracle expects three halving steps")
    f0 = _real(matrix_fn(0.0))
    lin_d, quad_d = [], []
    for hh in h:
        fp, fm = _real(matrix_fn(hh)), _real(matrix_fn(-hh))
        lin_d.append((fp - fm) / (2 * hh))
        quad_d.append((fp - 2 * f0 + fm) / (2 * hh * hh))

    def rich(d):
        r1a = (4 * d[1] - d[0]) / 3
        r1b = (4 * d[2] - d[1]) / 3
        r2 = (16 * r1b - r1a) / 15
        return r2, np.abs(r2 - r1b)

    lin, lin_err = rich(lin_d)
    quad, quad_err = rich(quad_d)
    floor = 1e-6 * max(1.0, float(np.max(np.abs(f0))))
    chk = [(lin, lin_err)] + ([(quad, quad_err)] if order >= 2 else [])
    for val, err in chk:
        scale = max(float(np.max(np.abs(val))), floor)
        if float(np.max(err)) > 1e-3 * scale:
            raise OracleUnstable(f"Richardson residual {np.max(err):.3e} vs scale {scale:.3e}")
    if order < 2:
        quad = np.full_like(quad, np.nan)
    return EntryExpansion(const=f0, lin=lin, quad=quad, err=np.maximum(lin_err, quad_err))


def det_gap_oracle(delta_fn: Callable[[float], np.ndarray], steps: Iterable[float] = DET_STEPS) -> float:
    """Estimate ``lim det(delta(θ))/θ²`` by Richardson in θ² over halving steps.

    ``det(delta)`` is even in θ for the families here, so ``det/θ²`` expands
    in powers of θ². The residual between the two highest extrapolants is
    checked against ``1e-3`` of the estimate, floored by the matrix scale.
    """
    t = list(steps)
    mats = [_real(delta_fn(th)) for th in t]
    table = [[float(np.linalg.det(m)) / th**2 for m, th in zip(mats, t)]]
    while len(table[-1]) > 1:
        prev = table[-1]
        k = len(table)
        fac = 4.0**k
        table.append([(fac * b - a) / (fac - 1) for a, b in zip(prev, prev[1:])])
    best = table[-1][0]
    resid = abs(best - table[-2][-1])
    mag = max(1.0, float(np.max(np.abs(mats[0]))))
    if resid > 1e-3 * max(abs(best), 1e-4 * mag**2):
        raise OracleUnstable(f"determinant Richardson residual {resid:.3e}")
    return best


def _mp_arith_tilted(alpha, p, c, s):
    M = mpmath.matrix([[(1 - alpha) * mpmath.mpf(2) ** p + alpha * c * c, alpha * c * s],
                       [alpha * c * s, alpha * s * s]])
    E, Q = mpmath.eigsy(M)
    D = mpmath.diag([mpmath.power(E[i], 1 / p) if E[i] > 0 else mpmath.mpf(0) for i in range(2)])
    return Q * D * Q.T


def det_gap_tilted_oracle(alpha: float, p: float, q: float, target_err: float = 1e-12) -> float:
    """Direct extended-precision estimate of the tilted determinant gap.

    The tilted family is not twice differentiable at θ = 0 for ``p < 1``: the
    remainder of ``det/θ²`` decays like ``θ^(2/max(p, q) - 2)``. The estimate
    therefore evaluates at a single θ small enough for that remainder to drop
    below ``target_err``, in enough digits to resolve it.
    """
    if not (0 < p < 1 and 0 < q < 1):
        raise InvalidInput("tilted determinant gap needs 0 < p, q < 1")
    expo = 2.0 / max(p, q) - 2.0
    k = int(math.ceil(-math.log10(target_err) / expo))
    with mpmath.workdps(2 * k + 40):
        th = mpmath.mpf(10) ** (-k)
        c, s = mpmath.cos(th), mpmath.sin(th)
        a = mpmath.mpf(alpha)
        D = _mp_arith_tilted(a, mpmath.mpf(q), c, s) - _mp_arith_tilted(a, mpmath.mpf(p), c, s)
        det = D[0, 0] * D[1, 1] - D[0, 1] * D[1, 0]
        return float(det / th**2)


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------


REL_FLOOR = 1e-3
CSV_COLUMNS = ("lemma_tag", "parameters", "entry", "closed_form", "oracle", "abs_err", "rel_err")


def compare_coeffs(cs: CoeffSet, oracle: EntryExpansion) -> list[dict]:
    """Rows comparing a closed-form set with oracle estimates."""
    pairs = [
        ("const11", cs.const[0], oracle.const[0, 0]),
        ("const22", cs.const[1], oracle.const[1, 1]),
        ("c11", cs.c11, oracle.quad[0, 0]),
        ("c22", cs.c22, oracle.quad[1, 1]),
        ("c12", cs.c12, oracle.lin[0, 1]),
    ]
    params = ";".join(f"{k}={v:g}" for k, v in cs.params.items())
    rows = []
    for name, cf, orc in pairs:
        ae = abs(cf - orc)
        rows.append(dict(lemma_tag=cs.lemma_tag, parameters=params, entry=name,
                         closed_form=cf, oracle=float(orc), abs_err=ae,
                         rel_err=ae / max(abs(cf), REL_FLOOR)))
    return rows


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{r[k]:.12g}" if isinstance(r[k], float) else r[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


# ----------------------------------------------------------------------
# lemma dispatch
# ----------------------------------------------------------------------

LEMMAS = ("3.3", "3.4", "3.5", "4.2", "4.6", "4.13")


def _rotated_mean(kind: str, alpha: float, p: float, x: float, y: float) -> Callable[[float], np.ndarray]:
    from .means import MeanKind, MeanSpec, evaluate

    fam = Family2x2("rotated", x, y)
    spec = MeanSpec(MeanKind.parse(kind), alpha, p)

    def fn(theta):
        A, B = fam.matrices(theta)
        return evaluate(spec, A, B).mat

    return fn


def expand_lemma(tag: str, alpha: float, p: float = 1.0, q: float | None = None,
                 x: float = 2.0, y: float | None = None) -> list[dict]:
    """Closed form against oracle for one lemma, as CSV-ready rows.

    ``"3.3"`` quasi arithmetic (x, y), ``"3.4"`` log-Euclidean (x, y),
    ``"3.5"`` Renyi (y = x), ``"4.13"`` quasi geometric (y = x),
    ``"4.6"`` quasi arithmetic with y = x and exponent ``q``, and ``"4.2"``
    the tilted determinant gap between exponents ``p`` and ``q``.
    """
    y = x if y is None else y
    q = p if q is None else q
    if tag == "3.3":
        cs = coeffs_arithmetic(alpha, p, x, y)
        fn = _rotated_mean("arith", alpha, p, x, y)
    elif tag == "3.4":
        cs = coeffs_log_euclidean(alpha, x, y)
        fn = _rotated_mean("le", alpha, 1.0, x, y)
    elif tag == "3.5":
        cs = coeffs_renyi(alpha, p, x)
        fn = _rotated_mean("renyi", alpha, p, x, x)
    elif tag in ("4.13", "4.17"):
        cs = coeffs_geometric(alpha, p, x)
        fn = _rotated_mean("geo", alpha, p, x, x)
    elif tag == "4.6":
        cs = coeffs_arithmetic_equal(alpha, q, x)
        fn = _rotated_mean("arith", alpha, q, x, x)
    elif tag == "4.2":
        cf = det_gap_tilted(alpha, p, q)
        orc = det_gap_tilted_oracle(alpha, p, q)
        ae = abs(cf - orc)
        return [dict(lemma_tag="tilted_det", parameters=f"alpha={alpha:g};p={p:g};q={q:g}", entry="det",
                     closed_form=cf, oracle=orc, abs_err=ae, rel_err=ae / max(abs(cf), REL_FLOOR))]
    else:
        raise InvalidInput(f"unknown lemma {tag!r}; expected one of {', '.join(LEMMAS)}")
    return compare_coeffs(cs, numeric_coeff_oracle(fn))
