import json
import re
from pathlib import Path

import numpy as np
import pytest

from superlin import fixtures
from superlin.cli import main
from superlin.embedding import classify, validate
from superlin.io import (DocumentError, emit_report, emit_system, parse_report,
                         parse_system)
from superlin.transform import minimal_visible_count, to_reduced_visible_form
from superlin.verify import cosimulate, generate_instance

from conftest import random_spec

GOLDEN = Path(__file__).parent / "golden"
NAMES = sorted(p.stem for p in GOLDEN.glob("*.json"))


@pytest.mark.parametrize("name", NAMES)
def test_golden_document_matches_fixture(name):
    text = (GOLDEN / f"{name}.json").read_text()
    assert emit_system(parse_system(text)) == text
    assert parse_system(text).allclose(getattr(fixtures, name)(), atol=0)


@pytest.mark.parametrize("seed", range(100))
def test_round_trip_generated(seed):
    L = generate_instance(random_spec(seed, scramble=seed % 2 == 1), seed).L
    text = emit_system(L)
    back = parse_system(text)
    assert back.allclose(L, atol=0)
    assert emit_system(back) == text


def test_optional_vectors_default_to_zero():
    doc = json.loads(emit_system(fixtures.ex1()))
    for k in ("C", "D", "E"):
        del doc[k]
    L = parse_system(json.dumps(doc))
    assert not L.E.any() and L.D.shape == (2,)


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d.pop("format_version"), "format_version"),
    (lambda d: d.update(format_version="2"), "format_version"),
    (lambda d: d.pop("A"), "A: missing"),
    (lambda d: d.update(extra=1), "extra: unknown"),
    (lambda d: d.update(G=[[1.0, 0.0], [0.0, 0.0]]), "G: expected shape (2, 1)"),
    (lambda d: d.update(B=[1.0]), "B: expected a list of length 2"),
    (lambda d: d.update(M=[["x"]]), "M[0][0]"),
    (lambda d: d.update(observables=[]), "observables: expected 1"),
    (lambda d: d["observables"][0][0].update(exps=[1]), "exps"),
])
def test_parse_errors_name_location(mutate, message):
    doc = json.loads(emit_system(fixtures.ex1()))
    mutate(doc)
    with pytest.raises(DocumentError, match=re.escape(message)):
        parse_system(json.dumps(doc))


def test_malformed_json_reports_line():
    with pytest.raises(DocumentError, match="line 2"):
        parse_system('{\n  "n": ,\n}')


def test_reports_round_trip():
    L = fixtures.ex2b()
    reports = [validate(L), validate(fixtures.ex1_broken()), classify(L),
               to_reduced_visible_form(L)[1], cosimulate(L, [0.1, 0.2], T=0.1, h=1e-2)]
    for rep in reports:
        text = emit_report(rep)
        assert emit_report(parse_report(text)) == text


# -- CLI ----------------------------------------------------------------------

def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("cmd", ["min-visible", "classify", "validate"])
def test_cli_golden(capsys, name, cmd):
    code, out, _ = run(capsys, cmd, GOLDEN / f"{name}.json")
    assert f"exit {code}\n{out}" == (GOLDEN / f"{name}.{cmd}.out").read_text()


def test_cli_reduce_and_realize(tmp_path, capsys):
    out = tmp_path / "red.json"
    code, stdout, _ = run(capsys, "reduce", GOLDEN / "ex2b.json", "--out", out)
    assert code == 0 and json.loads(stdout)["m_v_star"] == 1
    assert minimal_visible_count(parse_system(out.read_text())) == 1
    code, _, _ = run(capsys, "realize-min", GOLDEN / "ex2a.json", "--out", out)
    assert code == 0 and classify(parse_system(out.read_text())).m_v == 1


def test_cli_prune(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run(capsys, "prune", GOLDEN / "ex1_plus.json", "--out", out)[0] == 0
    assert parse_system(out.read_text()).allclose(fixtures.ex1(), atol=1e-12)


def test_cli_transform(tmp_path, capsys):
    pf = tmp_path / "P.json"
    pf.write_text('{"P": [[2.0]]}')
    out = tmp_path / "c.json"
    assert run(capsys, "transform", GOLDEN / "ex1.json", "--conjugate", pf, "--out", out)[0] == 0
    np.testing.assert_allclose(parse_system(out.read_text()).G, [[0.5], [0.0]])
    rs = tmp_path / "RS.json"
    rs.write_text('{"R": [[0.0, 1.0]], "S": [1.0]}')
    assert run(capsys, "transform", GOLDEN / "ex1.json", "--shift", rs, "--out", out)[0] == 0
    assert parse_system(out.read_text()).allclose(fixtures.ex1_prime(), atol=1e-12)
    pf.write_text('{"P": [[0.0]]}')
    code, _, err = run(capsys, "transform", GOLDEN / "ex1.json", "--conjugate", pf, "--out", out)
    assert code == 2 and "singular" in err


def test_cli_simulate(tmp_path, capsys):
    traj = tmp_path / "t.csv"
    code, out, _ = run(capsys, "simulate", GOLDEN / "ex1.json", "--x0", "1,1",
                       "--u", "pwc:0,0.5;0.5,-1", "--T", "1", "--h", "0.01", "--traj", traj)
    rep = json.loads(out)
    assert code == 0 and rep["max_state_gap"] <= 1e-6
    assert traj.read_text().splitlines()[0] == "t,x1,x2,z1,z2,z3"


def test_cli_gen(tmp_path, capsys):
    out = tmp_path / "g.json"
    code, stdout, _ = run(capsys, "gen", "--seed", 3, "--nx", 2, "--ny", 2, "--m", 4,
                          "--deg", 3, "--rank", 2, "--scramble", "--out", out)
    assert code == 0 and json.loads(stdout) == {"seed": 3, "true_m_v_star": 2}
    assert minimal_visible_count(parse_system(out.read_text())) == 2


@pytest.mark.parametrize("argv, code", [
    (["validate", "missing.json"], 2),
    (["simulate", str(GOLDEN / "ex1.json"), "--x0", "1"], 2),
    (["simulate", str(GOLDEN / "ex1.json"), "--x0", "1,1", "--u", "sin:1"], 2),
    (["gen", "--seed", "0", "--nx", "1", "--ny", "1", "--m", "2", "--deg", "3",
      "--rank", "2", "--out", "-"], 2),
    (["reduce", str(GOLDEN / "ex1_broken.json"), "--out", "-"], 1),
])
def test_cli_error_exit_codes(capsys, argv, code):
    assert main(argv) == code
    assert "error" in capsys.readouterr().err


def test_cli_bad_document(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": "1", "n": 2}')
    code, _, err = run(capsys, "classify", bad)
    assert code == 2 and "m: missing" in err


def test_cli_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["reduce"])
    assert exc.value.code == 2
