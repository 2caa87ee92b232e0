import json
import subprocess
import sys
from pathlib import Path

import pytest

from patterntrees.cli import run_cli

DATA = Path(__file__).resolve().parent.parent / "data"


def d(name):
    return str(DATA / name)


def run(capsys, *argv):
    code = run_cli(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_yes_and_no(capsys):
    code, out, _ = run(capsys, "eval", d("ticket.rq"), d("ticket.facts"), '{"t":"1","s":"1","c":"E"}')
    assert code == 0 and out.startswith("yes")
    code, out, _ = run(capsys, "eval", d("ticket.rq"), d("ticket.facts"), '{"t":"1","s":"2","c":"F"}')
    assert code == 1 and out.startswith("no")


def test_eval_engines_agree(capsys):
    for engine in ("auto", "brute", "fpt"):
        code, out, _ = run(capsys, "eval", d("chain.json"), d("chain.facts"), '{"x":"a","w":"d"}',
                           "--engine", engine, "--json")
        assert code == 0 and json.loads(out)["answer"] is True


def test_eval_engine_not_applicable(capsys):
    code, _, err = run(capsys, "eval", d("chain.json"), d("chain.facts"), '{"x":"a"}', "--engine", "csts")
    assert code == 2 and "projection-free" in err
    code, _, err = run(capsys, "eval", d("ticket.rq"), d("ticket.facts"), '{"t":"1"}', "--engine", "fpt")
    assert code == 2


def test_eval_rejects_existential_binding(capsys):
    code, _, err = run(capsys, "eval", d("chain.json"), d("chain.facts"), '{"y":"b"}')
    assert code == 2 and "non-free" in err


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", d("ticket.rq"), d("ticket.facts"), "--json")
    assert code == 0
    assert json.loads(out) == {"answers": [{"c": "E", "s": "1", "t": "1"}]}


def test_analyze_report_keys(capsys):
    code, out, _ = run(capsys, "analyze", d("chain.json"), "--json")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) >= {"c", "flags", "condition_a", "condition_b", "condition_c", "csts", "notes"}
    assert rep["condition_c"]["max_treewidth"] == 1


def test_csts_and_extcore(capsys):
    code, out, _ = run(capsys, "csts", d("clique4.rq"), "--json")
    assert code == 0 and json.loads(out)["max_treewidth"] == 3
    code, out, _ = run(capsys, "extcore", d("folding.pair"), "--json")
    assert code == 0 and json.loads(out)["treewidth"] == 1


def test_ext(capsys):
    code, out, _ = run(capsys, "ext", d("folding.pair"), d("folding.facts"), '{"x":"p"}')
    assert code == 0 and out.strip() == "yes"
    code, out, _ = run(capsys, "ext", d("folding.pair"), d("folding.facts"), '{"x":"q"}', "--engine", "brute")
    assert code == 2  # a(q) is not a fact, so the anchor map is not a homomorphism


def test_treewidth(capsys):
    code, out, _ = run(capsys, "treewidth", d("c5.edges"), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["treewidth"] == 2 and rep["exact"] and rep["valid"]


def test_usage_errors(capsys):
    assert run(capsys, "eval")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "eval", "/no/such/file", d("ticket.facts"), "{}")[0] == 2
    assert run(capsys, "eval", d("ticket.rq"), d("ticket.facts"), "{bad json")[0] == 2


def test_budget_exit_code(capsys, tmp_path):
    many = tmp_path / "many.facts"
    many.write_text("".join(f"ticket({i}).\n" for i in range(20)))
    code, _, err = run(capsys, "solve", d("ticket.rq"), str(many))
    assert code == 3 and "budget" in err


def test_fuzz_subprocess():
    proc = subprocess.run([sys.executable, "-m", "patterntrees.cli", "fuzz", "--trials", "200", "--seed", "7"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert "divergences: 0" in proc.stdout
