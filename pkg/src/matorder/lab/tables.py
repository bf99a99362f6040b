"""Sufficient and necessary conditions for ``M_{alpha,p} <| A_{alpha,q}``.

Each table fixes the left-hand mean and lists, for six orderings, a
sufficient predicate (the inequality holds for all pairs) and a necessary
predicate (when it is false, some pair violates the inequality). ``None``
marks an unknown sufficient condition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..errors import InvalidInput
from ..means import MeanKind
from ..orders import OrderKind

Pred = Callable[[float, float, float], bool]
EPS = 1e-12

TABLE_ORDERS = (
    OrderKind.LOEWNER,
    OrderKind.CHAOTIC,
    OrderKind.NEAR,
    OrderKind.EIGEN,
    OrderKind.WEAK_MAJOR,
    OrderKind.TRACE,
)


@dataclass(frozen=True)
class ConditionRow:
    """One ordering's conditions.

    Attributes
    ----------
    sufficient : callable or None
        ``(alpha, p, q) -> bool``; ``None`` when no sufficient condition is known.
    necessary : callable
        ``(alpha, p, q) -> bool``; ``False`` means a counterexample exists.
    status : {"exact", "gap", "none", "open"}
    """

    order: OrderKind
    sufficient: Pred | None
    necessary: Pred
    status: str
    sufficient_text: str
    necessary_text: str

    def suff(self, alpha: float, p: float, q: float) -> bool | None:
        return None if self.sufficient is None else bool(self.sufficient(alpha, p, q))

    def nec(self, alpha: float, p: float, q: float) -> bool:
        return bool(self.necessary(alpha, p, q))


@dataclass(frozen=True)
class ConditionTable:
    section_tag: str
    lhs: MeanKind
    rows: tuple[ConditionRow, ...]

    def row(self, order: OrderKind) -> ConditionRow:
        for r in self.rows:
            if r.order is order:
                return r
        raise KeyError(order)


def _le(a: float, b: float) -> bool:
    return a <= b + EPS


def _never(alpha, p, q) -> bool:
    return False


def _always(alpha, p, q) -> bool:
    return True


def _pq(alpha, p, q) -> bool:
    return _le(p, q)


def _row(order, suff, nec, status, st, nt) -> ConditionRow:
    return ConditionRow(order, suff, nec, status, st, nt)


def _none_row(order) -> ConditionRow:
    return _row(order, _never, _never, "none", "none", "none")


def _t41() -> ConditionTable:
    def loew(a, p, q):
        return abs(p - q) <= EPS or (_le(1, p) and p < q) or (_le(0.5, p) and p < 1 and _le(1, q))

    txt = "p=q or 1<=p<q or 1/2<=p<1<=q"
    rows = [_row(OrderKind.LOEWNER, loew, loew, "exact", txt, txt)]
    rows += [_row(o, _pq, _pq, "exact", "p<=q", "p<=q") for o in TABLE_ORDERS[1:]]
    return ConditionTable("4.1", MeanKind.ARITHMETIC, tuple(rows))


def _t42() -> ConditionTable:
    rows = [_row(OrderKind.LOEWNER, _never, _never, "none", "none", "never")]
    rows += [_row(o, _always, _always, "exact", "arbitrary q", "arbitrary q") for o in TABLE_ORDERS[1:]]
    return ConditionTable("4.2", MeanKind.LOG_EUCLIDEAN, tuple(rows))


def _t43() -> ConditionTable:
    def lam_s(a, p, q):
        return _le(p / 2, q)

    def lam_n(a, p, q):
        return _le(a * (1 - a) * p, q)

    def special(a, p):
        return abs(a - 0.5) <= EPS and abs(p - 1) <= EPS

    def tr_s(a, p, q):
        if special(a, p):
            return _le(0.25, q)
        return _le(1, q) or lam_s(a, p, q)

    def tr_n(a, p, q):
        if special(a, p):
            return _le(0.25, q)
        return _le(1, q) or lam_n(a, p, q)

    rows = [_none_row(o) for o in TABLE_ORDERS[:3]]
    rows += [
        _row(OrderKind.EIGEN, lam_s, lam_n, "gap", "p/2<=q", "alpha(1-alpha)p<=q"),
        _row(OrderKind.WEAK_MAJOR, lam_s, lam_n, "gap", "p/2<=q", "alpha(1-alpha)p<=q"),
        _row(OrderKind.TRACE, tr_s, tr_n, "gap",
             "q>=1 or p/2<=q (q>=1/4 at alpha=1/2, p=1)",
             "q>=1 or alpha(1-alpha)p<=q (q>=1/4 at alpha=1/2, p=1)"),
    ]
    return ConditionTable("4.3", MeanKind.RENYI, tuple(rows))


def _t44() -> ConditionTable:
    def loew(a, p, q):
        return _le(1, p) and _le(p, q)

    rows = [_row(OrderKind.LOEWNER, loew, loew, "exact", "1<=p<=q", "1<=p<=q")]
    rows += [_row(o, _pq, _pq, "exact", "p<=q", "p<=q")
             for o in (OrderKind.CHAOTIC, OrderKind.NEAR, OrderKind.EIGEN)]
    rows += [_row(o, _always, _always, "exact", "arbitrary", "arbitrary")
             for o in (OrderKind.WEAK_MAJOR, OrderKind.TRACE)]
    return ConditionTable("4.4", MeanKind.GEOMETRIC, tuple(rows))


def _t45() -> ConditionTable:
    def near_n(a, p, q):
        return _le(1 + max(a * (q - 1), (1 - a) * (q - 1)), q / p)

    def lam_n(a, p, q):
        return _le(max(a, 1 - a), q / p)

    def w_s(a, p, q):
        return _le(p / q, 2 * min(a, 1 - a))

    def tr_s(a, p, q):
        return _le(1, q) or w_s(a, p, q)

    def tr_n(a, p, q):
        return _le(1, q) or _le(p, 2 * q)

    rows = [_none_row(OrderKind.LOEWNER), _none_row(OrderKind.CHAOTIC)]
    rows += [
        _row(OrderKind.NEAR, None, near_n, "open", "?", "q/p>=1+max{alpha(q-1),(1-alpha)(q-1)}"),
        _row(OrderKind.EIGEN, None, lam_n, "open", "?", "q/p>=max{alpha,1-alpha}"),
        _row(OrderKind.WEAK_MAJOR, w_s, lam_n, "gap", "p/q<=2min{alpha,1-alpha}", "q/p>=max{alpha,1-alpha}"),
        _row(OrderKind.TRACE, tr_s, tr_n, "gap", "q>=1 or p/q<=2min{alpha,1-alpha}", "q>=1 or p<=2q"),
    ]
    return ConditionTable("4.5", MeanKind.SPECTRAL_GEOMETRIC, tuple(rows))


def _t46() -> ConditionTable:
    def half(a):
        return abs(a - 0.5) <= EPS

    def near_s(a, p, q):
        # no sufficient condition away from alpha = 1/2; unknown at 1/2
        return None if half(a) else False

    def near_n(a, p, q):
        return half(a)

    def lam_n(a, p, q):
        return _le(p, q / (1 - a)) if a < 1 else True

    def w_s(a, p, q):
        return _le(p, 2 * a * q)

    def tr_s(a, p, q):
        return _le(1, q) or w_s(a, p, q)

    def tr_n(a, p, q):
        return _le(1, q) or lam_n(a, p, q)

    near_row = _NearTildeRow(OrderKind.NEAR, near_s, near_n, "open",
                             "none for alpha!=1/2", "alpha=1/2")
    rows = [_none_row(OrderKind.LOEWNER), _none_row(OrderKind.CHAOTIC), near_row]
    rows += [
        _row(OrderKind.EIGEN, None, lam_n, "open", "?", "p<=q/(1-alpha)"),
        _row(OrderKind.WEAK_MAJOR, w_s, lam_n, "gap", "p<=2alpha q", "p<=q/(1-alpha)"),
        _row(OrderKind.TRACE, tr_s, tr_n, "gap", "q>=1 or p<=2alpha q", "q>=1 or p<=q/(1-alpha)"),
    ]
    return ConditionTable("4.6", MeanKind.SPECTRAL_GEOMETRIC_TILDE, tuple(rows))


class _NearTildeRow(ConditionRow):
    """Row whose sufficient predicate itself may be unknown pointwise."""

    def suff(self, alpha, p, q):
        return self.sufficient(alpha, p, q)


_BUILDERS = {"4.1": _t41, "4.2": _t42, "4.3": _t43, "4.4": _t44, "4.5": _t45, "4.6": _t46}
SECTIONS = tuple(_BUILDERS)


def condition_tables() -> list[ConditionTable]:
    """All six tables in section order."""
    return [b() for b in _BUILDERS.values()]


def condition_table(section_tag: str) -> ConditionTable:
    try:
        return _BUILDERS[section_tag]()
    except KeyError:
        raise InvalidInput(f"unknown table {section_tag!r}; expected one of {', '.join(SECTIONS)}") from None


# Extra results checked outside the tables.
def sg_log_major_renyi(alpha: float, p: float, q: float) -> bool:
    """Sufficient condition for ``SG_{alpha,p} <_log R_{alpha,q}``."""
    return _le(p / q, min(alpha, 1 - alpha))


def sgt_log_major_renyi(alpha: float, p: float, q: float) -> bool:
    """Sufficient condition for ``SG~_{alpha,p} <_log R_{alpha,q}``."""
    return _le(p, alpha * q)
