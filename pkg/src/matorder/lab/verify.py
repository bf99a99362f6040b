"""Ensemble verification, table reproduction and limit checks."""

from __future__ import annotations

import csv
import dataclasses
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import InvalidInput, MatOrderError
from ..linalg import PsdMat, as_psd, gpower, max_abs
from ..means import MeanKind, MeanSpec, evaluate, kubo_ando, log_euclidean
from ..orders import OrderKind, decide
from .claims import InequalityClaim
from .ensembles import EnsembleConfig
from .search import GUARD, NotFound, Witness, find_counterexample
from .tables import TABLE_ORDERS, ConditionTable, condition_table

DEFAULT_ALPHAS = (0.3, 0.5, 0.7)
DEFAULT_EXPONENTS = (0.3, 0.5, 0.75, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class Grid:
    """Parameter grid for table reproduction."""

    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    ps: tuple[float, ...] = DEFAULT_EXPONENTS
    qs: tuple[float, ...] = DEFAULT_EXPONENTS


# ----------------------------------------------------------------------
# ensemble verification
# ----------------------------------------------------------------------


@dataclass
class VerifyReport:
    """Outcome of checking a claim on every ensemble sample."""

    claim: InequalityClaim
    samples: int
    violations: int
    min_margin: float
    margins: list[float]
    skipped: int = 0
    witness: Witness | None = None

    @property
    def no_violation(self) -> bool:
        return self.violations == 0

    def summary(self) -> str:
        if self.no_violation:
            return f"no violation found in {self.samples} samples (min margin {self.min_margin:.3e})"
        return f"{self.violations} violations in {self.samples} samples (min margin {self.min_margin:.3e})"


def _ensemble_for(claim: InequalityClaim, ens: EnsembleConfig) -> EnsembleConfig:
    if claim.needs_nested_support and not ens.nested:
        return dataclasses.replace(ens, nested=True)
    return ens


def verify_inequality(claim: InequalityClaim, ens: EnsembleConfig | None = None) -> VerifyReport:
    """Evaluate ``claim`` on every ensemble sample.

    A sample counts as a violation when its margin is below ``-10`` times
    the decision tolerance. The first violating sample becomes the witness.
    """
    ens = _ensemble_for(claim, ens or EnsembleConfig())
    margins: list[float] = []
    violations = skipped = 0
    witness = None
    for i in range(ens.count):
        A, B = ens.sample(i)
        try:
            v = claim.evaluate(A, B)
        except MatOrderError:
            skipped += 1
            continue
        margins.append(v.margin)
        if v.margin < -GUARD * v.tol:
            violations += 1
            if witness is None:
                witness = Witness(A, B, claim, v.margin, "ensemble sample", {"index": i, "seed": ens.seed})
    return VerifyReport(claim, len(margins), violations, min(margins, default=math.inf), margins, skipped, witness)


# ----------------------------------------------------------------------
# table reproduction
# ----------------------------------------------------------------------


@dataclass
class TableCell:
    section: str
    order: OrderKind
    alpha: float
    p: float
    q: float
    sufficient: bool | None
    necessary: bool
    outcome: str
    margin: float
    construction: str = ""

    @property
    def mismatch(self) -> bool:
        return self.outcome.startswith("mismatch")


@dataclass
class TableReport:
    table: ConditionTable
    grid: Grid
    cells: list[TableCell] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    inconsistent: list[tuple] = field(default_factory=list)

    @property
    def mismatches(self) -> list[TableCell]:
        return [c for c in self.cells if c.mismatch]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "order", "alpha", "p", "q", "sufficient", "necessary",
                    "status", "outcome", "margin", "construction"])
        for c in self.cells:
            suff = "?" if c.sufficient is None else int(c.sufficient)
            w.writerow([c.section, c.order.value, f"{c.alpha:g}", f"{c.p:g}", f"{c.q:g}", suff,
                        int(c.necessary), self.table.row(c.order).status, c.outcome,
                        _fmt(c.margin), c.construction])
        return buf.getvalue()

    def summary(self) -> str:
        """Human-readable layout: one block per ordering and alpha."""
        mark = {"verified": "✓", "witness": "✗"}
        lines = [f"Table {self.table.section_tag}: {self.table.lhs.value}_(alpha,p) vs arithmetic_(alpha,q)",
                 "cells: ✓ no violation found, ✗ counterexample found, ? not resolved, ! mismatch"]
        for row in self.table.rows:
            lines.append("")
            lines.append(f"[{row.order.value}] sufficient: {row.sufficient_text} | "
                         f"necessary: {row.necessary_text} | status: {row.status}")
            for a in self.grid.alphas:
                lines.append(f"  alpha={a:g}   q: " + " ".join(f"{q:>5g}" for q in self.grid.qs))
                for p in self.grid.ps:
                    cells = []
                    for q in self.grid.qs:
                        c = self._cell(row.order, a, p, q)
                        ch = "!" if c is not None and c.mismatch else mark.get(c.outcome if c else "", "?")
                        cells.append(f"{ch:>5}")
                    lines.append(f"    p={p:<6g}    " + " ".join(cells))
        n = len(self.mismatches)
        lines.append("")
        lines.append(f"mismatches: {n}")
        return "\n".join(lines)

    def _cell(self, order, a, p, q):
        for c in self.cells:
            if c.order is order and c.alpha == a and c.p == p and c.q == q:
                return c
        return None


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    if math.isnan(x):
        return ""
    return f"{x:.6e}"


def _safe_eval(spec: MeanSpec, A, B) -> PsdMat | None:
    try:
        return evaluate(spec, A, B)
    except MatOrderError:
        return None


def reproduce_table(
    section_tag: str,
    grid: Grid | None = None,
    ens: EnsembleConfig | None = None,
    explore: bool = False,
    search_budget: tuple[int, int] = (10_000, 10_000),
) -> TableReport:
    """Check every cell of a condition table on a parameter grid.

    Where the sufficient predicate holds, the ensemble must show no
    violation. Where the necessary predicate fails, a counterexample must be
    found. Other cells are left unresolved unless ``explore`` is set, in
    which case the ensemble is run there too and recorded as evidence.
    """
    table = condition_table(section_tag)
    grid = grid or Grid()
    nested = table.lhs in (MeanKind.SPECTRAL_GEOMETRIC, MeanKind.SPECTRAL_GEOMETRIC_TILDE)
    ens = ens or EnsembleConfig()
    if nested and not ens.nested:
        ens = dataclasses.replace(ens, nested=True)
    samples = [ens.sample(i) for i in range(ens.count)]
    report = TableReport(table, grid)
    weakest_first = tuple(reversed(TABLE_ORDERS))

    for a in grid.alphas:
        lhs_cache = {p: [_safe_eval(MeanSpec(table.lhs, a, p), A, B) for A, B in samples] for p in grid.ps}
        rhs_cache = {q: [_safe_eval(MeanSpec(MeanKind.ARITHMETIC, a, q), A, B) for A, B in samples]
                     for q in grid.qs}
        for p in grid.ps:
            for q in grid.qs:
                found: list[Witness] = []
                cells = {}
                for order in weakest_first:
                    row = table.row(order)
                    s, n = row.suff(a, p, q), row.nec(a, p, q)
                    if s and not n:
                        report.inconsistent.append((order.value, a, p, q))
                    claim = InequalityClaim(MeanSpec(table.lhs, a, p), MeanSpec(MeanKind.ARITHMETIC, a, q), order)
                    if s or (explore and n):
                        mm, bad = _ensemble_margin(order, lhs_cache[p], rhs_cache[q])
                        if bad and s:
                            outcome = "mismatch: violation of sufficient condition"
                        elif s:
                            outcome = "verified"
                        else:
                            outcome = "evidence: violation" if bad else "evidence: none found"
                        cells[order] = TableCell(section_tag, order, a, p, q, s, n, outcome, mm)
                    elif not n:
                        w = _reuse(claim, found)
                        if w is None:
                            res = find_counterexample(claim, *search_budget, seed=ens.seed)
                            w = res if isinstance(res, Witness) else None
                        if w is None:
                            cells[order] = TableCell(section_tag, order, a, p, q, s, n,
                                                     "mismatch: no counterexample found", math.nan)
                        else:
                            found.append(w)
                            report.witnesses.append(w)
                            cells[order] = TableCell(section_tag, order, a, p, q, s, n, "witness",
                                                     w.margin, w.construction)
                    else:
                        cells[order] = TableCell(section_tag, order, a, p, q, s, n, "unresolved", math.nan)
                report.cells.extend(cells[o] for o in TABLE_ORDERS)
    return report


def _ensemble_margin(order: OrderKind, lhs: list, rhs: list) -> tuple[float, bool]:
    mm, bad = math.inf, False
    for X, Y in zip(lhs, rhs):
        if X is None or Y is None:
            continue
        v = decide(order, X, Y)
        mm = min(mm, v.margin)
        if v.margin < -GUARD * v.tol:
            bad = True
    return mm, bad


def _reuse(claim: InequalityClaim, found: list[Witness]) -> Witness | None:
    """A witness for a weaker ordering also refutes every stronger one."""
    for w in found:
        try:
            v = claim.evaluate(w.A, w.B)
        except MatOrderError:
            continue
        if v.margin < -GUARD * v.tol:
            return Witness(w.A, w.B, claim, v.margin, w.construction, dict(w.params))
    return None


# ----------------------------------------------------------------------
# Lie-Trotter-Kato limit
# ----------------------------------------------------------------------

LTK_LADDER = (1.0, 0.5, 0.1, 0.01, 1e-3, 1e-4)


@dataclass
class LtkReport:
    p_ladder: list[float]
    gaps: list[float]
    final_gap: float
    tol: float
    monotone_tail: bool

    @property
    def converged(self) -> bool:
        return self.final_gap <= self.tol

    @property
    def ratios(self) -> list[float]:
        return [g / p for g, p in zip(self.gaps, self.p_ladder)]


def _derivative_at_one(f: Callable) -> float:
    h = 1e-5
    return float((f(np.array([1 + h])) - f(np.array([1 - h])))[0] / (2 * h))


def ltk_verify(
    spec: MeanSpec | Callable,
    A,
    B,
    p_ladder: Sequence[float] = LTK_LADDER,
    tol: float = 1e-3,
    alpha: float | None = None,
) -> LtkReport:
    """Distance from ``M_{alpha,p}(A, B)`` to the log-Euclidean mean along ``p``.

    Parameters
    ----------
    spec : MeanSpec or callable
        A mean kind with its weight (``spec.p`` is ignored), or a Kubo-Ando
        representing function whose weight is taken as ``f'(1)``.
    """
    A, B = as_psd(A), as_psd(B)
    if isinstance(spec, MeanSpec):
        a = spec.alpha
        if spec.kind is MeanKind.KUBO_ANDO:
            f = spec.rep_fn

            def at(p):
                return _ka_quasi(A, B, f, p)
        else:
            def at(p):
                return evaluate(dataclasses.replace(spec, p=p), A, B)
    elif callable(spec):
        f = spec
        a = alpha if alpha is not None else _derivative_at_one(f)

        def at(p):
            return _ka_quasi(A, B, f, p)
    else:
        raise InvalidInput("spec must be a MeanSpec or a representing function")
    if not 0 < a < 1 and not (A.is_pd() and B.is_pd()):
        raise InvalidInput("limit target needs 0 < alpha < 1 for singular inputs")
    target = log_euclidean(A, B, a).mat
    gaps = [max_abs(at(p).mat - target) for p in p_ladder]
    tail = gaps[-3:]
    mono = all(g1 <= g0 + 1e-12 for g0, g1 in zip(tail, tail[1:]))
    return LtkReport(list(p_ladder), gaps, gaps[-1], tol, mono)


def _ka_quasi(A: PsdMat, B: PsdMat, f, p: float) -> PsdMat:
    val = kubo_ando(gpower(A, p), gpower(B, p), f).value
    return gpower(val, 1.0 / p)


# ----------------------------------------------------------------------
# equality cases
# ----------------------------------------------------------------------


@dataclass
class EqualityDiagnosis:
    trace_gap: float
    mean_gap: float
    input_gap: float
    violation: bool


def equality_cases(meanA: MeanSpec, meanB: MeanSpec, A, B, tol: float = 1e-9) -> EqualityDiagnosis:
    """Check that equal traces of two comparable means force ``A = B``.

    ``trace_gap = Tr meanB(A, B) - Tr meanA(A, B)``. A violation is flagged
    when the trace gap or the mean gap vanishes while ``A`` and ``B`` differ.
    """
    A, B = as_psd(A), as_psd(B)
    X, Y = evaluate(meanA, A, B), evaluate(meanB, A, B)
    scale = max(1.0, A.lmax, B.lmax)
    tg = float(np.sum(Y.eigenvalues) - np.sum(X.eigenvalues))
    mg = max_abs(Y.mat - X.mat)
    ig = max_abs(A.mat - B.mat)
    differ = ig > 1e-6 * scale
    violation = differ and (abs(tg) <= tol * scale or mg <= tol * scale)
    return EqualityDiagnosis(tg, mg, ig, violation)
