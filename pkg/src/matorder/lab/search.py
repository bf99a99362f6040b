"""Deterministic counterexample search over structured 2x2 families.

Each left-hand mean has an ordered list of families. Every family is swept
over a logarithmic parameter grid, ordered from moderate to extreme values
so that the least extreme witness is found first. A seeded random search
over 2x2 and 3x3 positive definite pairs follows when the sweep is
exhausted. A witness is accepted only when its margin is below ``-10`` times
the decision tolerance. Failing to find one is reported as inconclusive.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from ..errors import MatOrderError
from ..linalg import PsdMat, gpower, matrix_from_obj, matrix_to_obj
from ..means import MeanKind, _pd_geo
from ..orders import OrderVerdict
from .claims import InequalityClaim
from .ensembles import random_unitary

WITNESS_SCHEMA = 1
GUARD = 10.0
THETAS = (1e-1, 1e-2, 1e-3)


def _grid(lo_exp: int = -8, hi_exp: int = 8) -> list[float]:
    vals = {0.5, 2.0}
    vals.update(10.0**k for k in range(lo_exp, hi_exp + 1))
    return sorted(vals, key=lambda v: (abs(math.log10(v)), v))


GRID = _grid()
SMALL = [v for v in GRID if v < 1]


@dataclass
class Witness:
    """A pair violating a claim, with the construction that produced it."""

    A: np.ndarray
    B: np.ndarray
    claim: InequalityClaim
    margin: float
    construction: str
    params: dict = field(default_factory=dict)

    def verdict(self) -> OrderVerdict:
        return self.claim.evaluate(self.A, self.B)

    def reverify(self) -> bool:
        """True when re-evaluation fails again with margin within 10%."""
        v = self.verdict()
        if v.holds or not v.margin < -GUARD * v.tol:
            return False
        if math.isinf(self.margin) or math.isinf(v.margin):
            return math.isinf(self.margin) and math.isinf(v.margin)
        return abs(v.margin - self.margin) <= 0.1 * abs(self.margin)

    def to_obj(self) -> dict:
        m = self.margin
        return {
            "schema": WITNESS_SCHEMA,
            "claim": self.claim.to_string(),
            "A": matrix_to_obj(self.A),
            "B": matrix_to_obj(self.B),
            "margin": m if math.isfinite(m) else ("-inf" if m < 0 else "inf"),
            "construction": self.construction,
            "params": self.params,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)

    @classmethod
    def from_obj(cls, obj: dict) -> "Witness":
        m = obj["margin"]
        margin = float(m) if not isinstance(m, str) else float(m.replace("inf", "Infinity"))
        return cls(
            matrix_from_obj(obj["A"]),
            matrix_from_obj(obj["B"]),
            InequalityClaim.parse(obj["claim"]),
            margin,
            obj.get("construction", ""),
            obj.get("params", {}),
        )


@dataclass
class NotFound:
    """Search exhausted without a witness. This is evidence, not proof."""

    claim: InequalityClaim
    grid_points: int
    random_trials: int
    best_margin: float

    def to_obj(self) -> dict:
        return {
            "claim": self.claim.to_string(),
            "found": False,
            "grid_points": self.grid_points,
            "random_trials": self.random_trials,
            "best_margin": self.best_margin,
            "note": "inconclusive: no witness within budget",
        }


def save_witnesses(path: str, witnesses) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for w in witnesses:
            fh.write(w.to_json() + "\n")


def load_witnesses(path: str) -> list[Witness]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Witness.from_obj(json.loads(line)))
    return out


# ----------------------------------------------------------------------
# families
# ----------------------------------------------------------------------

Candidate = tuple[np.ndarray, np.ndarray, dict, str]


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def _a0(x: float) -> np.ndarray:
    return np.diag([1.0, x])


def _bt(y: float, theta: float) -> np.ndarray:
    r = _rot(theta)
    return r @ np.diag([1.0, y]) @ r.T


def _proj(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]])


def fam_diagonal(claim) -> Iterator[Candidate]:
    pairs = [((1, 1), (4, 9)), ((1, 4), (9, 1)), ((1e-2, 1), (1e2, 1)), ((1, 1e-2), (1e-2, 1))]
    for a, b in pairs:
        yield np.diag(a).astype(float), np.diag(b).astype(float), {"a": a, "b": b}, "commuting diagonal pair"


def fam_tilted(claim) -> Iterator[Candidate]:
    for th in THETAS:
        yield np.diag([2.0, 0.0]), _proj(th), {"theta": th}, "tilted rank-one family"


def _rot_family(pairs, label) -> Iterator[Candidate]:
    for x, y in pairs:
        for th in THETAS:
            yield _a0(x), _bt(y, th), {"x": x, "y": y, "theta": th}, label


def fam_xy2(claim):
    return _rot_family(((y * y, y) for y in SMALL), "rotated family, x=y^2, y small")


def fam_yx(claim):
    return _rot_family(((x, x) for x in GRID if x != 1), "rotated family, y=x")


def fam_free(claim):
    return _rot_family(((x, y) for x in GRID for y in GRID), "rotated family, free grid")


def fam_rank1(claim) -> Iterator[Candidate]:
    for x in SMALL:
        for th in THETAS:
            yield _a0(x), _proj(th), {"x": x, "theta": th}, "diag(1,x) against rank-one projection"


def _sg_pair(x, y, th, p):
    X, Y = _a0(x), _bt(y, th)
    A = gpower(PsdMat(Y), 1 / p).mat
    B = gpower(PsdMat(X @ Y @ X), 1 / p).mat
    return A, B


def fam_sg(claim) -> Iterator[Candidate]:
    p = claim.lhs.p
    for y in SMALL:
        for x in GRID:
            for th in THETAS:
                A, B = _sg_pair(x, y, th, p)
                yield A, B, {"x": x, "y": y, "theta": th}, "A=Y^(1/p), B=(XYX)^(1/p), X=diag(1,x), Y=B_theta(y)"


def _sgt_pair(x, y, th, p, alpha):
    X, Y = _bt(y, th), _a0(x)
    yinv = np.diag([1.0, 1.0 / x])
    Bp = _pd_geo(yinv, X, 1.0 / alpha, True) if alpha > 0 else X
    A = gpower(PsdMat(Y), 1 / p).mat
    B = gpower(PsdMat(Bp), 1 / p).mat
    return A, B


def fam_sgt_line(claim) -> Iterator[Candidate]:
    alpha, p = claim.alpha, claim.lhs.p
    if not 0 < alpha < 1:
        return
    for x in GRID:
        if x == 1:
            continue
        y = x ** (2 * alpha - 1)
        for th in THETAS:
            try:
                A, B = _sgt_pair(x, y, th, p, alpha)
            except (MatOrderError, FloatingPointError, np.linalg.LinAlgError):
                continue
            yield A, B, {"x": x, "y": y, "theta": th}, "A=Y^(1/p), B=(Y^-1 #_(1/alpha) X)^(1/p), X=B_theta(y), Y=diag(1,x), y=x^(2alpha-1)"


def fam_sgt_free(claim) -> Iterator[Candidate]:
    alpha, p = claim.alpha, claim.lhs.p
    if not 0 < alpha < 1:
        return
    for y in SMALL:
        for x in GRID:
            for th in THETAS:
                try:
                    A, B = _sgt_pair(x, y, th, p, alpha)
                except (MatOrderError, FloatingPointError, np.linalg.LinAlgError):
                    continue
                yield A, B, {"x": x, "y": y, "theta": th}, "A=Y^(1/p), B=(Y^-1 #_(1/alpha) X)^(1/p), X=B_theta(y), Y=diag(1,x)"


FAMILIES: dict[MeanKind, tuple[Callable, ...]] = {
    MeanKind.ARITHMETIC: (fam_diagonal, fam_tilted, fam_xy2, fam_yx, fam_free),
    MeanKind.LOG_EUCLIDEAN: (fam_diagonal, fam_xy2, fam_yx, fam_free),
    MeanKind.RENYI: (fam_diagonal, fam_yx, fam_free, fam_tilted),
    MeanKind.GEOMETRIC: (fam_diagonal, fam_rank1, fam_yx, fam_free, fam_tilted),
    MeanKind.HARMONIC: (fam_diagonal, fam_yx, fam_free),
    MeanKind.SPECTRAL_GEOMETRIC: (fam_diagonal, fam_sg, fam_yx, fam_free),
    MeanKind.SPECTRAL_GEOMETRIC_TILDE: (fam_diagonal, fam_sgt_line, fam_yx, fam_sgt_free, fam_sg, fam_free),
}


FAMILY_BY_NAME: dict[str, Callable] = {
    "diagonal": fam_diagonal,
    "tilted": fam_tilted,
    "xy2": fam_xy2,
    "yx": fam_yx,
    "free": fam_free,
    "rank1": fam_rank1,
    "sg": fam_sg,
    "sgt_line": fam_sgt_line,
    "sgt_free": fam_sgt_free,
}


def _try(claim: InequalityClaim, A, B) -> OrderVerdict | None:
    try:
        return claim.evaluate(A, B)
    except (MatOrderError, np.linalg.LinAlgError, FloatingPointError, OverflowError):
        return None


def _is_witness(v: OrderVerdict | None) -> bool:
    return v is not None and v.margin < -GUARD * v.tol


def find_counterexample(
    claim: InequalityClaim,
    grid_budget: int = 10_000,
    random_budget: int = 10_000,
    seed: int = 7,
    families: tuple[str, ...] | None = None,
) -> Witness | NotFound:
    """Search for ``(A, B)`` with ``lhs(A, B) <| rhs(A, B)`` failing.

    Parameters
    ----------
    claim : InequalityClaim
    grid_budget : int
        Maximum structured-family evaluations (each candidate and its swap
        count separately).
    random_budget : int
        Maximum random 2x2/3x3 trials after the structured sweep.
    seed : int
    families : tuple of str, optional
        Restrict the structured sweep to these named families (see
        ``FAMILY_BY_NAME``) instead of the default list for the mean.

    Returns
    -------
    Witness or NotFound
    """
    best = math.inf
    used = 0
    if families is None:
        fams = FAMILIES.get(claim.lhs.kind, (fam_diagonal, fam_free))
    else:
        fams = tuple(FAMILY_BY_NAME[f] for f in families)
    for fam in fams:
        for A, B, params, label in fam(claim):
            for swap in (False, True):
                if used >= grid_budget:
                    break
                used += 1
                a, b = (B, A) if swap else (A, B)
                v = _try(claim, a, b)
                if v is None:
                    continue
                best = min(best, v.margin)
                if _is_witness(v):
                    w = Witness(a, b, claim, v.margin, label + (" (arguments swapped)" if swap else ""),
                                dict(params, swapped=swap))
                    if w.reverify():
                        return w
    trials = 0
    for i in range(random_budget):
        rng = np.random.default_rng([seed, 0x5EA2C4, i])
        n = 2 if i % 2 == 0 else 3
        mats = []
        for _ in range(2):
            u = random_unitary(rng, n)
            w_ = np.exp(rng.uniform(np.log(1e-4), np.log(1e4), n))
            mats.append((u * w_) @ u.conj().T)
        trials += 1
        v = _try(claim, mats[0], mats[1])
        if v is None:
            continue
        best = min(best, v.margin)
        if _is_witness(v):
            w = Witness(mats[0], mats[1], claim, v.margin, "seeded random positive definite pair",
                        {"trial": i, "dim": n})
            if w.reverify():
                return w
    return NotFound(claim, used, trials, best)
