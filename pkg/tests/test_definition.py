from pathlib import Path

import pytest

from folalg.definition import DefinitionError, parse_definition, parse_definition_text, print_definition

DATA = Path(__file__).parent / "data"
GOOD = sorted(p for p in DATA.glob("*.fol") if not p.name.startswith("bad_"))


def test_flat_file_contents():
    d = parse_definition(DATA / "flat.fol")
    assert d.chart.transverse == ("x",) and d.chart.leaf == ("y",)
    A = d.lie_algebroid()
    assert A.rank == 2 and A.labels == ("dx", "dy")
    pair = d.foliated_pair()
    assert pair.p == 1 and pair.q == 1


@pytest.mark.parametrize("path", GOOD, ids=lambda p: p.stem)
def test_round_trip(path):
    d = parse_definition(path)
    text = print_definition(d)
    again = parse_definition_text(text, "printed")
    assert again == d
    assert print_definition(again) == text


def test_zero_anchor_may_be_omitted():
    d = parse_definition_text("chart {\n  transverse: x\n}\nalgebroid {\n  rank: 2\n  bracket 1 2: [1, 0]\n}\n")
    A = d.lie_algebroid()
    assert all(c.is_zero() for row in A.anchor for c in row)
    assert "anchor" not in print_definition(d)


def test_comments_and_multiline_matrices():
    text = "# c\nchart {\n  transverse: x  # base\n  leaf: y\n}\nalgebroid {\n  rank: 2\n  anchor: [1, 0;\n           0, 1]\n}\n"
    assert parse_definition_text(text).lie_algebroid().rank == 2


def diagnose(text):
    with pytest.raises(DefinitionError) as info:
        parse_definition_text(text, "t.fol")
    return str(info.value)


def test_shape_mismatch_is_located():
    with pytest.raises(DefinitionError, match=r"bad_shape.fol:7:11: anchor must be 3x2, got 2x2"):
        parse_definition(DATA / "bad_shape.fol")


def test_unknown_variable_is_located():
    with pytest.raises(DefinitionError, match=r"bad_var.fol:7:25: unknown variable 'z'"):
        parse_definition(DATA / "bad_var.fol")


@pytest.mark.parametrize(
    "text, message",
    [
        ("chart {\n  transverse: x\n}\nwidget {\n  a: 1\n}\n", "t.fol:4:1: unknown block 'widget'"),
        ("chart {\n  transverse: x\n}\nalgebroid {\n  rank: 1\n  colour: red\n}\n", "t.fol:6:3: unknown key 'colour' in block 'algebroid'"),
        ("chart {\n  transverse: x\n", "t.fol:1:1: block 'chart' is not closed"),
        ("algebroid {\n  rank: 1\n}\n", "t.fol:1:1: the first block must be 'chart'"),
        ("chart {\n  transverse: x\n}\nalgebroid {\n  anchor: [1]\n}\n", "t.fol:4:1: block 'algebroid' needs 'rank'"),
        ("chart {\n  transverse: x\n  leaf: x\n}\n", "t.fol:2:15: duplicate coordinate name 'x'"),
        ("chart {\n  transverse: x\n}\nalgebroid {\n  rank: 1\n  anchor: [x +* 1]\n}\n", "t.fol:6:15: expected a rational or a variable"),
    ],
)
def test_diagnostics(text, message):
    assert diagnose(text) == message


def test_missing_file():
    with pytest.raises(DefinitionError, match="nofile.fol: cannot read file"):
        parse_definition("nofile.fol")
