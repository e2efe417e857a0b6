import json
from pathlib import Path

import pytest

from cleanring.cli import main

GOLDEN = Path(__file__).parent / "golden"
MANIFEST = json.loads((GOLDEN / "manifest.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    for check in ("paper.fiftythree", "paper.diamond", "paper.correspondence", "paper.infrastructure"):
        assert check in out


def test_list_json(capsys):
    code, out, _ = run(capsys, "list", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == "cleanring.report/1"
    assert all(c["anchor"] for c in doc["checks"])


def test_run_correspondence_z4(capsys):
    code, out, _ = run(capsys, "run", "paper.correspondence", "--ring", "Z/4", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass"
    assert doc["details"]["rings"]["Z/4"]["inconsistent"] == []


def test_run_fiftythree(capsys):
    code, out, _ = run(capsys, "run", "paper.fiftythree", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass"
    assert "53" in json.dumps(doc["details"])


def test_run_bergman_witness(capsys):
    code, _, _ = run(capsys, "run", "paper.bergman-witness", "--radius", "2")
    assert code == 0


def test_unknown_check(capsys):
    code, _, err = run(capsys, "run", "paper.nope")
    assert code == 2 and "cleanring list" in err


def test_invalid_ring(capsys):
    code, _, err = run(capsys, "run", "paper.correspondence", "--ring", "Q7")
    assert code == 2 and "Q7" in err


def test_reduce_bundled(capsys):
    code, out, _ = run(capsys, "reduce", "--system", "ten-relations", "w*t")
    assert code == 0 and out.strip() == "r*a"
    code, out, _ = run(capsys, "reduce", "--system", "square-zero", "x^2")
    assert code == 0 and out.strip() == "0"


def test_reduce_file_with_trace(capsys, tmp_path):
    sysfile = tmp_path / "forced.sys"
    sysfile.write_text("field: F2\nvars: a r t w\nrule: a*r*a -> a\nrule: r*a*w -> w\n")
    code, out, _ = run(capsys, "reduce", "--system", str(sysfile), "a*r*a*w", "--trace")
    assert code == 0
    assert out.strip().splitlines()[-1] == "a*w"
    assert len(out.strip().splitlines()) > 1


def test_reduce_parse_error(capsys):
    code, _, err = run(capsys, "reduce", "--system", "square-zero", "x*q")
    assert code == 2 and "column" in err


def test_missing_system_file(capsys):
    code, _, err = run(capsys, "reduce", "--system", "/nonexistent.sys", "x")
    assert code == 2 and "bundled" in err


def test_diamond(capsys):
    code, out, _ = run(capsys, "diamond", "--system", "square-zero")
    assert code == 0 and "0 unresolved" in out


@pytest.mark.parametrize("expr,code_expected,text", [("1+x", 0, "1 - x"), ("x", 3, "no inverse")])
def test_invsearch(capsys, expr, code_expected, text):
    code, out, _ = run(capsys, "invsearch", "--system", "square-zero", expr, "--bound", "4")
    assert code == code_expected and text in out


def test_scan_json(capsys):
    code, out, _ = run(capsys, "scan", "--ring", "Z/6", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["size"] == 6 and all(row["clean"] for row in doc["elements"])


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "--ring", "M2(F2)", "--elem", "[[0,0],[1,1]]")
    assert code == 0 and "(6)=T" in out


def test_construct_precondition_failure(capsys):
    code, _, err = run(capsys, "construct", "zhang", "--elem", "e=[[0,1],[0,0]]", "--elem", "u=[[1,0],[0,1]]")
    assert code == 1 and "idempotent" in err


def test_construct_out_of_tier(capsys):
    code, _, err = run(capsys, "construct", "bergman-unit", "--elem", "A=symbol=t+1")
    assert code == 3 and "inconclusive" in err


def test_construct_bad_literal(capsys):
    code, _, _ = run(capsys, "construct", "bergman-unit", "--elem", "A=t+1")
    assert code == 2


@pytest.mark.parametrize("name", sorted(MANIFEST))
def test_golden_certificates(capsys, name):
    code, out, _ = run(capsys, *MANIFEST[name], "--json")
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / f"{name}.json").read_text())
