import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matorder.errors import InvalidInput
from matorder.linalg import PsdMat
from matorder.means import arithmetic_quasi, geometric_quasi
from matorder.orders import (
    CHAIN,
    OrderKind,
    chaotic_criterion,
    chaotic_le,
    decide,
    decision_tol,
    eigen_le,
    implication_chain,
    log_major,
    log_shift_le,
    loewner_le,
    near_le,
    near_riccati,
    trace_le,
    weak_log_major,
    weak_major,
)

from conftest import psd_pairs, rand_psd, rand_unitary

GUARD = 10


def _band(v):
    return abs(v.margin) > GUARD * v.tol


def test_loewner_examples(rng):
    X = rand_psd(rng, 3)
    v = loewner_le(X, X)
    assert v.holds and abs(v.margin) < 1e-12
    v = loewner_le(np.eye(2), np.diag([2.0, 0.5]))
    assert not v.holds and v.margin == pytest.approx(-0.5)


@given(psd_pairs())
def test_geometric_below_arithmetic(pair):
    A, B = pair
    assert loewner_le(geometric_quasi(A, B, 0.5, 1).value, arithmetic_quasi(A, B, 0.5, 1)).holds


def test_chaotic_examples():
    assert chaotic_le(np.diag([1.0, 2.0]), np.diag([3.0, 2.0])).holds
    v = chaotic_le(math.e * np.eye(2), np.eye(2))
    assert not v.holds and v.margin == pytest.approx(-1.0)
    # support failure
    assert chaotic_le(np.eye(2), np.diag([1.0, 0.0])).margin == -math.inf


def test_near_examples(rng):
    X = rand_psd(rng, 3, rank=2)
    assert near_le(X, X).holds
    v = near_le(np.array([[2.0]]), np.array([[8.0]]))
    assert v.margin == pytest.approx(1 - math.sqrt(2 / 8))


def test_near_ill_conditioned_self_comparison():
    X = np.diag([1.0, 1e-20, 0.0])
    u = rand_unitary(np.random.default_rng(0), 3)
    X = u @ X @ u.conj().T
    assert abs(near_le(X, X).margin) < 1e-8


def test_eigen_examples(rng):
    X = rand_psd(rng, 3)
    assert eigen_le(X, X).margin == 0
    v = eigen_le(np.diag([2.0, 0.0]), np.eye(2))
    assert not v.holds and v.detail["index"] == 1
    U = rand_unitary(rng, 3)
    Z = U @ X @ U.conj().T
    assert eigen_le(Z, X).holds and eigen_le(X, Z).holds


def test_majorization_reflexive(rng):
    X = rand_psd(rng, 4, rank=2)
    for f in (weak_major, weak_log_major, log_major, trace_le):
        v = f(X, X)
        assert v.holds and abs(v.margin) <= v.tol


def test_log_major_singular():
    assert log_major(np.diag([2.0, 0.0]), np.diag([4.0, 0.0])).holds
    assert not log_major(np.diag([1.0, 1.0]), np.diag([2.0, 0.0])).holds


def test_chain_examples(rng):
    X = rand_psd(rng, 3)
    Y = X + rand_psd(rng, 3)
    rep = implication_chain(X, Y)
    assert all(rep.verdicts[k].holds for k in CHAIN) and rep.consistent
    # only the trace ordering holds
    rep = implication_chain(np.diag([3.0, 0.1]), np.diag([1.6, 1.6]))
    assert rep.verdicts[OrderKind.TRACE].holds and not rep.verdicts[OrderKind.WEAK_MAJOR].holds
    assert rep.consistent
    obj = rep.to_obj()
    assert len(obj["verdicts"]) == 7


def test_decide_dispatch_and_errors():
    assert decide("le", np.eye(2), np.eye(2)).order is OrderKind.LOEWNER
    with pytest.raises(InvalidInput):
        OrderKind.parse("sideways")


def test_verdict_json_handles_infinity():
    v = chaotic_le(np.eye(2), np.diag([1.0, 0.0]))
    import json

    assert json.loads(v.to_json())["margin"] == "-inf"


@given(psd_pairs(hi=1e2))
def test_chain_never_violated(pair):
    assert implication_chain(*pair).consistent


@given(psd_pairs(), st.sampled_from([OrderKind.LOEWNER, OrderKind.CHAOTIC, OrderKind.NEAR, OrderKind.EIGEN]))
def test_inverse_antitone(pair, order):
    X, Y = pair
    v1 = decide(order, X, Y)
    v2 = decide(order, np.linalg.inv(Y), np.linalg.inv(X))
    if _band(v1) and _band(v2):
        assert v1.holds == v2.holds


@given(psd_pairs())
def test_chaotic_criterion_agrees(pair):
    X, Y = pair
    v = chaotic_le(X, Y)
    c = chaotic_criterion(X, Y)
    if abs(v.margin) > GUARD * v.tol and abs(c) > GUARD * 1e-9 * 1e-3:
        assert (c >= 0) == v.holds


@given(psd_pairs())
def test_loewner_implies_log_shift(pair):
    X, Y = pair
    Y = Y + X  # X <= Y
    v = loewner_le(X, Y)
    if v.margin > GUARD * v.tol:
        for t in (0.01, 0.1, 1.0, 10.0):
            assert log_shift_le(X, Y, t) >= -1e-9


@given(psd_pairs())
def test_near_riccati_sign(pair):
    X, Y = pair
    v = near_le(X, Y)
    r = near_riccati(X, Y)
    if abs(v.margin) > 1e-6 and abs(r) > 1e-6 * max(1, PsdMat(Y).lmax):
        assert (r >= 0) == v.holds


@st.composite
def triples(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    X = rand_psd(rng, 3)
    Y = X + rand_psd(rng, 3) * draw(st.sampled_from([0.0, 0.1, 1.0]))
    Z = Y + rand_psd(rng, 3) * draw(st.sampled_from([0.0, 0.1, 1.0]))
    return X, Y, Z


@given(triples(), st.sampled_from([OrderKind.LOEWNER, OrderKind.EIGEN, OrderKind.WEAK_MAJOR, OrderKind.TRACE]))
def test_transitive(tri, order):
    X, Y, Z = tri
    if decide(order, X, Y).holds and decide(order, Y, Z).holds:
        assert decide(order, X, Z).holds


@given(psd_pairs(full=False))
def test_all_reflexive(pair):
    X, _ = pair
    for k in CHAIN + (OrderKind.LOG_MAJOR,):
        assert decide(k, X, X).holds, k


def test_decision_tol_scale():
    X, Y = PsdMat(np.diag([1e3, 1.0])), PsdMat(np.eye(2))
    assert decision_tol(X, Y) == pytest.approx(1e-6)
