import json
from pathlib import Path

import pytest

from folalg.cli import main
from folalg.report import Report, Verdict

DATA = Path(__file__).parent / "data"


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


EXIT_CODES = [
    ("check-lie", "flat", 0),
    ("check-lie", "cyclic", 0),
    ("check-lie", "nonjacobi", 1),
    ("check-foliation", "flat", 0),
    ("check-foliation", "dirac16", 0),
    ("tangent", "dirac16", 0),
    ("tangent", "nonjacobi", 1),
    ("dual-poisson", "cyclic", 0),
    ("dual-poisson", "nonjacobi", 1),
    ("vaintrob", "dirac16", 0),
    ("bigraded", "deformation", 0),
    ("cohomology", "flat", 0),
    ("cohomology", "deformation", 0),
    ("charclass", "connections", 0),
    ("bott-vanishing", "bott", 0),
    ("check-courant", "twisted", 0),
    ("check-courant", "tbig_tf", 0),
    ("check-dirac", "dirac62", 0),
    ("check-dirac", "etheta", 1),
    ("check-courant-foliation", "etheta", 0),
    ("quotient", "tbig_tf", 0),
    ("quotient", "flat", 0),
    ("reduce", "reduce", 0),
    ("reduce", "reduce_bad", 1),
    ("exactness", "tbig_tf", 0),
    ("exactness", "dirac62", 1),
    ("check-lie", "bad_shape", 2),
    ("check-lie", "bad_var", 2),
    ("cohomology", "twisted", 2),
    ("check-courant", "flat", 2),
]


@pytest.mark.parametrize("suite, name, code", EXIT_CODES, ids=[f"{s}-{n}" for s, n, _ in EXIT_CODES])
def test_exit_codes(capsys, suite, name, code):
    assert run(capsys, suite, "--input", str(DATA / f"{name}.fol"))[0] == code


def test_text_report(capsys):
    code, out, _ = run(capsys, "check-lie", "--input", str(DATA / "nonjacobi.fol"))
    assert code == 1
    assert out.startswith("== Lie algebroid ==\noverall: fail\n")
    assert "[fail] jacobi: Jacobi identity on basis triples\n    residual (e1,e2,e3) e3: -1\n" in out


def test_json_report(capsys):
    code, out, _ = run(capsys, "check-lie", "--input", str(DATA / "nonjacobi.fol"), "--format", "json")
    doc = json.loads(out)
    assert doc["verdict"] == "fail" and code == 1
    check = next(c for c in doc["checks"] if c["id"] == "jacobi")
    assert set(check) == {"id", "label", "verdict", "residuals", "detail"}
    assert check["residuals"] == ["(e1,e2,e3) e3: -1"]


def test_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "check-foliation", "--input", str(DATA / "flat.fol"), "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["verdict"] == "pass"


def test_cohomology_slot_option(capsys):
    code, out, _ = run(capsys, "cohomology", "--input", str(DATA / "flat.fol"), "--slot", "0,1", "--poly-cap", "2")
    assert code == 0
    assert "0,1:dimension: 0" in out and "0,1:dim closed: 6" in out


def test_reduce_reports_hypothesis(capsys):
    code, out, _ = run(capsys, "reduce", "--input", str(DATA / "reduce_bad.fol"))
    assert code == 1
    assert "[fail] reduction-hypothesis" in out and "d/dx2" in out


def test_input_errors_go_to_stderr(capsys):
    code, out, err = run(capsys, "check-lie", "--input", str(DATA / "bad_var.fol"))
    assert code == 2 and out == ""
    assert "bad_var.fol:7:25: unknown variable 'z'" in err


def test_missing_block_message(capsys):
    code, _, err = run(capsys, "check-courant", "--input", str(DATA / "flat.fol"))
    assert code == 2 and "needs the 'courant' block" in err


@pytest.mark.parametrize("args", [["bogus", "--input", "x"], ["check-lie"], ["cohomology", "--input", "x", "--slot", "a,b"]])
def test_usage_errors(capsys, args):
    assert run(capsys, *args)[0] == 2


def test_repeated_runs_identical(capsys):
    outs = {run(capsys, "dual-poisson", "--input", str(DATA / "dirac16.fol"), "--format", "json")[1] for _ in range(3)}
    assert len(outs) == 1


def test_indeterminate_exit_code():
    report = Report("r")
    report.add("a", "a", True)
    report.add("b", "b", Verdict.INDETERMINATE, detail="membership undecided")
    assert report.verdict is Verdict.INDETERMINATE and report.exit_code == 3
    report.add("c", "c", False)
    assert report.exit_code == 1
