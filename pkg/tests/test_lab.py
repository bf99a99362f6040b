import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from matorder.errors import InvalidInput
from matorder.lab import (
    EnsembleConfig,
    Grid,
    InequalityClaim,
    NotFound,
    Witness,
    condition_table,
    condition_tables,
    equality_cases,
    find_counterexample,
    load_witnesses,
    ltk_verify,
    reproduce_table,
    save_witnesses,
    verify_inequality,
)
from matorder.lab.tables import SECTIONS, TABLE_ORDERS, sg_log_major_renyi, sgt_log_major_renyi
from matorder.linalg import support, support_leq
from matorder.means import MeanKind, MeanSpec, representing_function
from matorder.orders import OrderKind

from conftest import rand_psd

DENSE = [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9]
DENSE_PQ = [0.1, 0.25, 0.3, 0.5, 0.75, 0.9, 1.0, 1.2, 1.5, 2.0, 3.0]


# ---------------------------------------------------------------- claims


def test_claim_parse_round_trip():
    c = InequalityClaim.parse("sg:chao:0.5:1:1")
    assert c.lhs.kind is MeanKind.SPECTRAL_GEOMETRIC and c.order is OrderKind.CHAOTIC
    assert c.rhs.kind is MeanKind.ARITHMETIC and c.rhs.p == 1
    assert InequalityClaim.parse(c.to_string()) == c
    c = InequalityClaim.parse("sgt:log:0.3:0.2:1:renyi")
    assert c.rhs.kind is MeanKind.RENYI and c.to_string().endswith(":renyi")


@pytest.mark.parametrize("bad", ["bogus", "arith:loewner:0.5:1", "arith:loewner:x:1:1",
                                 "ka:loewner:0.5:1:1", "arith:sideways:0.5:1:1"])
def test_claim_parse_rejects(bad):
    with pytest.raises(InvalidInput):
        InequalityClaim.parse(bad)


def test_claim_requires_same_alpha():
    with pytest.raises(InvalidInput):
        InequalityClaim(MeanSpec(MeanKind.GEOMETRIC, 0.3), MeanSpec(MeanKind.ARITHMETIC, 0.5), OrderKind.LOEWNER)


# ---------------------------------------------------------------- ensembles


def test_ensemble_reproducible_and_index_local():
    e = EnsembleConfig(count=10, seed=3)
    a = list(e.samples())
    b = list(EnsembleConfig(count=20, seed=3).samples())[:10]
    for (A1, B1), (A2, B2) in zip(a, b):
        assert np.array_equal(A1, A2) and np.array_equal(B1, B2)
    assert not np.array_equal(EnsembleConfig(seed=4).sample(0)[0], a[0][0])


@given(st.integers(0, 500), st.sampled_from(["mixed", "nested", "aligned", "deficient"]))
def test_nested_profile_support(i, profile):
    A, B = EnsembleConfig(profile=profile, nested=True).sample(i)
    assert support_leq(support(B), support(A))


def test_ensemble_rejects_bad_config():
    with pytest.raises(InvalidInput):
        EnsembleConfig(profile="weird")
    with pytest.raises(InvalidInput):
        EnsembleConfig(spectrum=(0, 1))


# ---------------------------------------------------------------- tables


def test_table_examples():
    assert condition_table("4.1").row(OrderKind.LOEWNER).suff(0.5, 1, 2)
    near = condition_table("4.3").row(OrderKind.NEAR)
    assert near.status == "none"
    assert not any(near.suff(a, p, q) for a, p, q in itertools.product(DENSE, DENSE_PQ, DENSE_PQ))
    w = condition_table("4.6").row(OrderKind.WEAK_MAJOR)
    assert w.suff(0.5, 0.9, 1) and w.nec(0.5, 0.9, 1)
    with pytest.raises(InvalidInput):
        condition_table("4.9")


def test_tables_cover_all_sections_and_orders():
    tabs = condition_tables()
    assert [t.section_tag for t in tabs] == list(SECTIONS)
    for t in tabs:
        assert tuple(r.order for r in t.rows) == TABLE_ORDERS
        for r in t.rows:
            assert r.status in ("exact", "gap", "none", "open")


def test_tables_internally_consistent():
    for t in condition_tables():
        for r in t.rows:
            for a, p, q in itertools.product(DENSE, DENSE_PQ, DENSE_PQ):
                if r.suff(a, p, q):
                    assert r.nec(a, p, q), (t.section_tag, r.order, a, p, q)


def test_extra_log_major_conditions():
    assert sg_log_major_renyi(0.5, 0.5, 1) and not sg_log_major_renyi(0.3, 0.5, 1)
    assert sgt_log_major_renyi(0.5, 0.5, 1) and not sgt_log_major_renyi(0.5, 0.6, 1)


# ---------------------------------------------------------------- search


def test_search_le_loewner():
    w = find_counterexample(InequalityClaim.parse("le:loewner:0.5:1:1"))
    assert isinstance(w, Witness) and w.margin < 0 and w.reverify()


def test_search_sg_chaotic():
    w = find_counterexample(InequalityClaim.parse("sg:chao:0.5:1:1"))
    assert isinstance(w, Witness) and w.reverify()
    assert w.A.shape == (2, 2)


def test_search_equality_claim_not_found():
    r = find_counterexample(InequalityClaim.parse("arith:loewner:0.5:1:1"), 300, 300)
    assert isinstance(r, NotFound)
    assert r.to_obj()["note"].startswith("inconclusive")


def test_witness_store_round_trip(tmp_path):
    ws = [find_counterexample(InequalityClaim.parse(c)) for c in ("le:loewner:0.5:1:2", "renyi:near:0.5:1:1")]
    path = tmp_path / "w.jsonl"
    save_witnesses(str(path), ws)
    back = load_witnesses(str(path))
    assert len(back) == 2
    for w in back:
        assert w.reverify() and not w.verdict().holds


# ---------------------------------------------------------------- verification


def test_verify_geometric_sufficiency():
    rep = verify_inequality(InequalityClaim.parse("geo:loewner:0.5:1:2"),
                            EnsembleConfig(dims=(3,), count=200, profile="full"))
    assert rep.no_violation and rep.samples == 200


def test_verify_le_chaotic_with_deficient():
    rep = verify_inequality(InequalityClaim.parse("le:chao:0.5:1:0.5"), EnsembleConfig(count=200))
    assert rep.no_violation


def test_verify_renyi_eigen():
    rep = verify_inequality(InequalityClaim.parse("renyi:eigen:0.3:1.5:0.75"), EnsembleConfig(count=200))
    assert rep.no_violation


def test_verify_finds_violation():
    rep = verify_inequality(InequalityClaim.parse("arith:trace:0.5:2:1"), EnsembleConfig(count=50, profile="full"))
    assert not rep.no_violation and rep.witness is not None and rep.witness.reverify()


def test_verify_forces_nested_for_sg():
    rep = verify_inequality(InequalityClaim.parse("sg:w:0.5:0.9:1"), EnsembleConfig(count=40))
    assert rep.skipped == 0 and rep.no_violation


def test_reproduce_table_small_grid():
    grid = Grid(alphas=(0.5,), ps=(1.0,), qs=(0.5, 2.0))
    rep = reproduce_table("4.2", grid, EnsembleConfig(count=60))
    assert not rep.mismatches
    for c in rep.cells:
        if c.order is OrderKind.LOEWNER:
            assert c.outcome == "witness"
        else:
            assert c.outcome == "verified"
    text = rep.summary()
    assert "✗" in text and "✓" in text
    assert rep.to_csv() == reproduce_table("4.2", grid, EnsembleConfig(count=60)).to_csv()


# ---------------------------------------------------------------- LTK and equality


def test_ltk_trivial_cases(rng):
    A = rand_psd(rng, 3)
    rep = ltk_verify(MeanSpec(MeanKind.GEOMETRIC, 0.4), A, A)
    assert max(rep.gaps) < 1e-8
    D1, D2 = np.diag([1.0, 4.0, 2.0]), np.diag([9.0, 1.0, 0.5])
    for k in ("arith", "harm", "geo", "renyi", "sg", "sgt"):
        rep = ltk_verify(MeanSpec(MeanKind.parse(k), 0.4), D1, D2)
        if k in ("arith", "harm"):
            assert rep.converged
        else:
            assert max(rep.gaps) < 1e-8, k


def test_ltk_renyi_rank_deficient():
    rng = np.random.default_rng(11)
    u = np.linalg.qr(rng.standard_normal((3, 3)))[0][:, :2]
    A = u @ rand_psd(rng, 2, real=True) @ u.T
    B = u @ rand_psd(rng, 2, real=True) @ u.T
    rep = ltk_verify(MeanSpec(MeanKind.RENYI, 0.5), A, B)
    assert rep.converged and rep.monotone_tail and rep.final_gap <= 1e-3
    assert max(rep.ratios) < 10 * max(1.0, rep.ratios[0])


def test_ltk_kubo_ando_function():
    rng = np.random.default_rng(2)
    A, B = rand_psd(rng, 3), rand_psd(rng, 3)
    rep = ltk_verify(representing_function("harm", 0.3), A, B)
    assert rep.converged


def test_equality_cases():
    rng = np.random.default_rng(4)
    A = rand_psd(rng, 3)
    d = equality_cases(MeanSpec(MeanKind.ARITHMETIC, 0.5, 1), MeanSpec(MeanKind.ARITHMETIC, 0.5, 2), A, A)
    assert abs(d.trace_gap) < 1e-9 and d.mean_gap < 1e-9 and not d.violation
    for _ in range(20):
        A, B = rand_psd(rng, 3), rand_psd(rng, 3)
        d = equality_cases(MeanSpec(MeanKind.ARITHMETIC, 0.5, 1), MeanSpec(MeanKind.ARITHMETIC, 0.5, 2), A, B)
        assert d.trace_gap > 0 and not d.violation
        d = equality_cases(MeanSpec(MeanKind.RENYI, 0.5, 1), MeanSpec(MeanKind.ARITHMETIC, 0.5, 0.25), A, B)
        assert d.trace_gap > 0 and not d.violation


@pytest.mark.parametrize("section", ["4.2", "4.3", "4.4", "4.5", "4.6"])
def test_reproduce_full_table(section):
    rep = reproduce_table(section, ens=EnsembleConfig(seed=7))
    assert len(rep.cells) == 648
    assert not rep.mismatches and not rep.inconsistent
