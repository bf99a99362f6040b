"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines are printed even with output capture on) or
directly with ``python tests/test_acceptance.py``.
"""

import itertools
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest
import scipy.linalg as sla

from matorder.errors import DegenerateBase
from matorder.lab import (
    EnsembleConfig,
    InequalityClaim,
    Witness,
    find_counterexample,
    ltk_verify,
    reproduce_table,
    verify_inequality,
)
from matorder.lab.ensembles import random_unitary
from matorder.means import MeanKind, MeanSpec, evaluate, representing_function
from matorder.orders import chaotic_criterion, chaotic_le, implication_chain, loewner_le
from matorder.perturb2x2 import expand_lemma

GUARD = 10.0


def _claim(text):
    return InequalityClaim.parse(text)


def _witness(text, families=None, bound=0.0):
    w = find_counterexample(_claim(text), families=families)
    ok = isinstance(w, Witness) and w.reverify() and w.margin < bound
    return ok, (f"{text} margin {w.margin:.2e}" if isinstance(w, Witness) else f"{text} not found")


def _clean(text, ens):
    rep = verify_inequality(_claim(text), ens)
    return rep.no_violation, f"{text}: {rep.violations}/{rep.samples}"


def _pd(rng, n, lo=-1.0, hi=1.0):
    u = random_unitary(rng, n)
    return u @ np.diag(10 ** rng.uniform(lo, hi, n)) @ u.conj().T


# ----------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    ens = EnsembleConfig(count=200, profile="full", spectrum=(1e-3, 1e3), seed=1)
    worst = math.inf
    for i, (A, B) in enumerate(ens.samples()):
        alpha = (0.3, 0.5, 0.7)[i % 3]
        h, g, a = (evaluate(MeanSpec(k, alpha), A, B) for k in
                   (MeanKind.HARMONIC, MeanKind.GEOMETRIC, MeanKind.ARITHMETIC))
        worst = min(worst, loewner_le(h, g).margin, loewner_le(g, a).margin)
    dt = time.perf_counter() - t0
    return worst >= -1e-9 and dt < 5, f"min margin {worst:.2e}, {dt:.1f}s"


_TABLE_41 = {}


def _table_41():
    if "rep" not in _TABLE_41:
        t0 = time.perf_counter()
        _TABLE_41["rep"] = reproduce_table("4.1", ens=EnsembleConfig(seed=7))
        _TABLE_41["dt"] = time.perf_counter() - t0
    return _TABLE_41["rep"], _TABLE_41["dt"]


def criterion_2():
    t0 = time.perf_counter()
    rep, dt_table = _table_41()
    ok1, d1 = _witness("arith:loewner:0.5:0.3:1", families=("xy2",))
    ok2, d2 = _witness("arith:loewner:0.5:0.4:0.8", families=("tilted",))
    dt = dt_table + time.perf_counter() - t0
    ok = not rep.mismatches and not rep.inconsistent and ok1 and ok2 and dt < 120
    return ok, f"{len(rep.cells)} cells, {len(rep.mismatches)} mismatches; {d1}; {d2}; {dt:.1f}s"


def criterion_3():
    parts = [_witness(f"le:loewner:0.5:1:{q}", bound=-1e-8) for q in (0.5, 1, 2)]
    parts += [_clean(f"le:chao:0.5:1:{q}", EnsembleConfig(count=200, profile="mixed")) for q in (0.5, 1, 2)]
    return all(ok for ok, _ in parts), "; ".join(d for _, d in parts)


def criterion_4():
    parts = [_witness("renyi:near:0.5:1:1")]
    parts += [_clean("renyi:eigen:0.5:1:0.5", EnsembleConfig(count=200)),
              _clean("renyi:eigen:0.3:1.5:1", EnsembleConfig(count=200))]
    ens = EnsembleConfig(count=500)
    low = verify_inequality(_claim("renyi:trace:0.5:1:0.2"), ens)
    parts.append((not low.no_violation, f"q=0.2: {low.violations}/500 violations"))
    parts += [_clean(f"renyi:trace:0.5:1:{q}", ens) for q in (0.25, 0.3)]
    return all(ok for ok, _ in parts), "; ".join(d for _, d in parts)


def criterion_5():
    pq = [(1, 1), (1, 1.5), (1, 2), (1.5, 1.5), (1.5, 2), (2, 2)]
    parts = [_clean(f"geo:loewner:0.5:{p}:{q}", EnsembleConfig(count=200)) for p, q in pq]
    parts += [_witness("geo:loewner:0.5:0.5:1", families=("rank1",)),
              _witness("geo:loewner:0.5:2:1", families=("yx",))]
    parts += [_witness(f"geo:loewner:{a}:{p}:1") for a in (0.3, 0.7) for p in (0.5, 2)]
    return all(ok for ok, _ in parts), "; ".join(d for _, d in parts)


def criterion_6():
    parts = [_witness("sg:chao:0.5:1:1", bound=-1e-6),
             _clean("sg:wlog:0.5:0.9:1", EnsembleConfig(count=200))]
    return all(ok for ok, _ in parts), "; ".join(d for _, d in parts)


def criterion_7():
    parts = [_witness("sgt:near:0.25:1:1", families=("sgt_line",))]
    parts += [_clean(f"sgt:log:{a}:{p}:1:renyi", EnsembleConfig(count=200)) for a, p in ((0.5, 0.5), (0.7, 0.5))]
    return all(ok for ok, _ in parts), "; ".join(d for _, d in parts)


def criterion_8():
    t0 = time.perf_counter()
    al, ex, xs = (0.2, 0.5, 0.8), (0.3, 0.7, 1.0, 1.5, 2.5), (0.1, 0.5, 2.0, 8.0)
    jobs = [("3.3", dict(alpha=a, p=p, x=x, y=y)) for a, p, x, y in itertools.product(al, ex, xs, xs)]
    jobs += [("3.4", dict(alpha=a, x=x, y=y)) for a, x, y in itertools.product(al, xs, xs)]
    jobs += [(t, dict(alpha=a, p=p, x=x)) for t in ("3.5", "4.13") for a, p, x in itertools.product(al, ex, xs)]
    jobs += [("4.6", dict(alpha=a, q=q, x=x)) for a, q, x in itertools.product(al, ex, xs)]
    jobs += [("4.2", dict(alpha=a, p=p, q=q)) for a, p, q in itertools.product(al, (0.3, 0.4, 0.6), (0.5, 0.8))]
    points, worst, seen = 0, 0.0, set()
    for tag, kw in jobs:
        try:
            rows = expand_lemma(tag, **kw)
        except DegenerateBase:
            continue
        points += 1
        seen.add(tag)
        worst = max(worst, max(r["rel_err"] for r in rows))
    dt = time.perf_counter() - t0
    ok = points >= 300 and worst <= 1e-4 and len(seen) == 6 and dt < 30
    return ok, f"{points} points, worst rel err {worst:.1e}, {dt:.1f}s"


# The gap is first order in p with a constant that grows with the spread of
# log-spectra, so an absolute bound at p = 1e-4 needs bounded spectra.
LTK_SPREAD = 0.6


def _ltk_pair(i):
    """Pairs 0-9 positive definite; 10-19 rank deficient with a proper
    nonzero common support and a nested partner for the SG family."""
    rng = np.random.default_rng(1000 + i)
    lo, hi = -LTK_SPREAD, LTK_SPREAD
    if i < 10:
        n = int(rng.integers(2, 5))
        return _pd(rng, n, lo, hi), _pd(rng, n, lo, hi), None
    n = 3 if i < 15 else 4
    u = random_unitary(rng, n)
    A = u[:, : n - 1] @ np.diag(10 ** rng.uniform(lo, hi, n - 1)) @ u[:, : n - 1].conj().T
    w = np.linalg.qr(np.column_stack([u[:, 0], random_unitary(rng, n)[:, : n - 2]]))[0]
    B = w @ np.diag(10 ** rng.uniform(lo, hi, n - 1)) @ w.conj().T
    v = u[:, : n - 2]
    Bn = v @ np.diag(10 ** rng.uniform(lo, hi, n - 2)) @ v.conj().T
    return A, B, Bn


def criterion_9():
    t0 = time.perf_counter()
    alpha = 0.4
    kinds = ("arith", "harm", "geo", "renyi", "le", "sg", "sgt", "ka")
    worst = dict.fromkeys(kinds, 0.0)
    ratio = {"harm": 0.0, "geo": 0.0}
    for i in range(20):
        A, B, Bn = _ltk_pair(i)
        for k in kinds:
            if k == "ka":
                if Bn is not None:
                    continue
                spec = representing_function("geo", alpha)
            else:
                spec = MeanSpec(MeanKind.parse(k), alpha)
            b = Bn if (k in ("sg", "sgt") and Bn is not None) else B
            rep = ltk_verify(spec, A, b)
            worst[k] = max(worst[k], rep.final_gap)
            if k in ratio:
                ratio[k] = max(ratio[k], max(rep.ratios))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-3 and max(ratio.values()) < 100 and dt < 30
    gaps = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"gaps {gaps}; max gap/p H {ratio['harm']:.2f} G {ratio['geo']:.2f}; {dt:.1f}s"


def criterion_10():
    t0 = time.perf_counter()
    broken = 0
    for i in range(10_000):
        rng = np.random.default_rng([99, i])
        n = int(rng.integers(2, 5))
        X = _pd(rng, n, -2, 2)
        if i % 3 == 0:
            Y = _pd(rng, n, -2, 2)
        elif i % 3 == 1:
            Y = X + _pd(rng, n, -3, 1)
        else:
            Y = X @ X if rng.random() < 0.5 else 2 * X + 0.1 * _pd(rng, n, -2, 0)
        broken += not implication_chain(X, Y).consistent
    agree = disagree = skipped = 0
    for i in range(500):
        rng = np.random.default_rng([5, i])
        n = int(rng.integers(2, 5))
        X = _pd(rng, n)
        u = random_unitary(rng, n)
        Y = sla.expm(sla.logm(X) + u @ np.diag(rng.uniform(-0.3, 1, n)) @ u.conj().T)
        Y = (Y + Y.conj().T) / 2
        v, c = chaotic_le(X, Y), chaotic_criterion(X, Y)
        if abs(v.margin) <= GUARD * v.tol or abs(c) <= 1e-9:
            skipped += 1
        elif (c >= 0) == v.holds:
            agree += 1
        else:
            disagree += 1
    dt = time.perf_counter() - t0
    ok = broken == 0 and disagree == 0
    return ok, f"{broken} chain violations in 10000; chaotic criterion {agree} agree, {disagree} disagree, {skipped} in guard band; {dt:.1f}s"


def criterion_11():
    cmd = [sys.executable, "-m", "matorder.cli", "table", "4.1", "--seed", "7", "--format", "csv"]
    env = dict(os.environ)
    env.pop("MATORDER_SEED", None)
    outs = [subprocess.run(cmd, capture_output=True, env=env).stdout for _ in range(2)]
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    return ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def _line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n - 1]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failed += not ok
        print(_line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
