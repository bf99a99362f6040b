import json

import numpy as np
import pytest

from matorder.cli import main
from matorder.lab import load_witnesses
from matorder.linalg import matrix_from_obj


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mean_geometric_diagonal(capsys):
    code, out, _ = run(capsys, "mean", "[[9,0],[0,1]]", "[[1,0],[0,4]]", "--kind", "geo", "--alpha", "0.5")
    assert code == 0
    m = matrix_from_obj(json.loads(out))
    assert np.allclose(m, np.diag([3.0, 2.0]))


def test_mean_from_file_pretty(capsys, tmp_path):
    f = tmp_path / "a.json"
    f.write_text("[[2, 0], [0, 2]]")
    code, out, _ = run(capsys, "mean", str(f), str(f), "--kind", "arith", "--format", "pretty")
    assert code == 0 and "2." in out


def test_mean_support_violation(capsys):
    code, _, err = run(capsys, "mean", "[[1,0],[0,0]]", "[[1,1],[1,1]]", "--kind", "sg")
    assert code == 2 and "SupportViolation" in err


def test_mean_bad_input(capsys):
    assert run(capsys, "mean", "nope.json", "[[1]]", "--kind", "arith")[0] == 2
    assert run(capsys, "mean", "[[1,2,3]]", "[[1]]", "--kind", "arith")[0] == 2
    assert run(capsys, "mean", "[[1,2],[3,4]]", "[[1,0],[0,1]]", "--kind", "arith")[0] == 2
    assert run(capsys, "mean", "[[1]]", "[[1]]", "--kind", "bogus")[0] == 2


def test_order_single_and_all(capsys):
    code, out, _ = run(capsys, "order", "[[1,0],[0,1]]", "[[2,0],[0,3]]", "--kind", "loewner")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = run(capsys, "order", "[[3,0],[0,1]]", "[[1,0],[0,3]]", "--kind", "all")
    assert code == 1
    code, out, _ = run(capsys, "order", "[[1,0],[0,1]]", "[[2,0],[0,3]]", "--kind", "all", "--format", "pretty")
    assert code == 0 and "chain consistent: True" in out


def test_order_of_means(capsys):
    code, out, _ = run(capsys, "order", "[[4,1],[1,1]]", "[[1,0],[0,3]]", "--kind", "loewner",
                       "--lhs-mean", "harm:0.5", "--rhs-mean", "arith:0.5")
    assert code == 0
    assert run(capsys, "order", "[[1]]", "[[1]]", "--kind", "loewner", "--lhs-mean", "harm")[0] == 2


def test_search_witness_and_store(capsys, tmp_path):
    store = tmp_path / "w.jsonl"
    code, out, _ = run(capsys, "search", "--claim", "sg:chao:0.5:1:1", "--store", str(store))
    assert code == 1 and json.loads(out)["found"] is True
    (w,) = load_witnesses(str(store))
    assert w.reverify()


def test_search_not_found(capsys):
    code, out, _ = run(capsys, "search", "--claim", "arith:loewner:0.5:1:1",
                       "--grid-budget", "200", "--random-budget", "200")
    assert code == 0 and "best_margin" in json.loads(out)


def test_search_bad_claim(capsys):
    assert run(capsys, "search", "--claim", "arith:loewner:0.5")[0] == 2


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("MATORDER_SEED", "oops")
    assert run(capsys, "search", "--claim", "sg:chao:0.5:1:1")[0] == 2
    monkeypatch.setenv("MATORDER_SEED", "3")
    assert run(capsys, "search", "--claim", "sg:chao:0.5:1:1")[0] == 1


def test_table_unknown_section(capsys):
    assert run(capsys, "table", "4.9")[0] == 2


def test_ltk(capsys):
    code, out, _ = run(capsys, "ltk", "[[2,1],[1,2]]", "[[1,0],[0,3]]", "--kind", "renyi", "--format", "json")
    assert code == 0 and json.loads(out)["converged"] is True


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "--lemma", "3.3", "--alpha", "0.3", "--p", "1.5")
    assert code == 0 and out.splitlines()[0].startswith("lemma_tag")
    code, _, err = run(capsys, "expand", "--lemma", "3.5", "--x", "1")
    assert code == 2 and "DegenerateBase" in err


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        main(["mean"])
    assert exc.value.code == 2
