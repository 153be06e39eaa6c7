import pytest
from hypothesis import given, settings, strategies as st

import fixtures as F
from folalg.algebroid import (
    LieAlgebroid,
    aform,
    anchor_apply,
    bracket_sections,
    check_dsquared,
    check_lie_algebroid,
    d_A,
    jacobiator,
    tangent_bundle,
)
from folalg.ring import Chart


def sections(chart, rank, max_degree=1):
    names = chart.base
    coeff = st.lists(st.integers(-2, 2), min_size=len(names) + 1, max_size=len(names) + 1).map(
        lambda cs: sum((chart.var(n) * c for n, c in zip(names, cs[1:])), chart.const(cs[0]))
    )
    if max_degree > 1:
        coeff = st.tuples(coeff, coeff).map(lambda ab: ab[0] * ab[1])
    return st.tuples(*[coeff] * rank)


# -- anchor and bracket ---------------------------------------------------------


def test_anchor_identity():
    C = Chart.foliated(["x1"], ["y1"])
    TM = tangent_bundle(C)
    assert anchor_apply(TM, TM.section("x1", "y1")) == (C.poly("x1"), C.poly("y1"))
    assert anchor_apply(TM, TM.zero_section()) == (C.zero(), C.zero())


def test_anchor_linear_combination():
    C = Chart.foliated(["x1"], [])
    A = LieAlgebroid(C, 2, ((C.poly("x1"),), (C.zero(),)))
    assert anchor_apply(A, A.section("1", "5")) == (C.poly("x1"),)


def test_bracket_leibniz_example():
    TM = tangent_bundle(F.plane())
    assert bracket_sections(TM, TM.section("1", "0"), TM.section("0", "x")) == TM.section("0", "1")


def test_bracket_cyclic_lookup():
    A = F.cyclic()
    assert bracket_sections(A, A.basis(0), A.basis(1)) == A.basis(2)


def test_bracket_self_vanishes():
    A = F.dirac_algebroid()
    s = A.section("x1*y", "x2", "1 + y")
    assert all(c.is_zero() for c in A.bracket(s, s))


DIRAC = F.dirac_algebroid()
DC = DIRAC.chart


@settings(max_examples=30, deadline=None)
@given(sections(DC, 3), sections(DC, 3), sections(DC, 1, 2))
def test_bracket_antisymmetric_and_leibniz(s1, s2, f):
    f = f[0]
    A = DIRAC
    assert A.bracket(s1, s2) == tuple(-c for c in A.bracket(s2, s1))
    lhs = A.bracket(s1, tuple(f * c for c in s2))
    rhs = tuple(f * b + A.act(s1, f) * c for b, c in zip(A.bracket(s1, s2), s2))
    assert lhs == rhs


@settings(max_examples=30, deadline=None)
@given(sections(DC, 3), sections(DC, 3))
def test_anchor_morphism_on_random_sections(s1, s2):
    A = DIRAC
    assert A.anchor_apply(A.bracket(s1, s2)) == A.field_bracket(A.anchor_apply(s1), A.anchor_apply(s2))


@settings(max_examples=20, deadline=None)
@given(sections(DC, 3), sections(DC, 3), sections(DC, 3))
def test_jacobi_on_random_sections(s1, s2, s3):
    assert all(c.is_zero() for c in jacobiator(DIRAC, s1, s2, s3))


# -- axiom checks ------------------------------------------------------------


@pytest.mark.parametrize("chart", [Chart.foliated([], []), Chart.foliated(["x"], ["y"]), Chart.foliated(["x1", "x2"], ["y"])])
def test_tangent_bundle_passes(chart):
    assert check_lie_algebroid(tangent_bundle(chart)).passed


def test_cyclic_passes():
    assert check_lie_algebroid(F.cyclic()).passed


def test_dirac_algebroid_passes():
    assert check_lie_algebroid(F.dirac_algebroid()).passed


def test_non_jacobi_fails_with_residual():
    A = F.non_jacobi()
    report = check_lie_algebroid(A)
    assert report["jacobi"].verdict.value == "fail"
    assert report["anchor-morphism"].verdict.value == "pass"
    # [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2] = 0 + 0 - [e1, e2] = -e3
    assert jacobiator(A, A.basis(0), A.basis(1), A.basis(2)) == A.section("0", "0", "-1")
    assert report["jacobi"].residuals == ("(e1,e2,e3) e3: -1",)


def test_bad_anchor_fails_morphism():
    C = F.plane()
    z, one = C.zero(), C.one()
    A = LieAlgebroid(C, 2, ((one, z), (z, C.poly("x"))))
    report = check_lie_algebroid(A)
    assert report["anchor-morphism"].verdict.value == "fail"


# -- d_A -----------------------------------------------------------------------


def test_d_of_function_is_de_rham():
    TM = tangent_bundle(F.plane())
    f = TM.chart.poly("x^2*y + y^3")
    df = d_A(TM, aform(TM, 0, {(): f}))
    assert df[(0,)] == f.partial("x") and df[(1,)] == f.partial("y")
    assert d_A(TM, df).is_zero()


def test_cyclic_dual_form():
    A = F.cyclic()
    pt = A.chart
    e1 = aform(A, 1, {(0,): pt.one()})
    # d e*1 (e2, e3) = -e*1([e2, e3]) = -1; other pairs vanish
    assert d_A(A, e1) == aform(A, 2, {(1, 2): pt.const(-1)})


def test_d_of_top_degree_is_zero():
    A = F.cyclic()
    top = aform(A, 3, {(0, 1, 2): A.chart.one()})
    out = d_A(A, top)
    assert out.degree == 4 and out.is_zero()


@pytest.mark.parametrize(
    "A, cap, ok",
    [
        (tangent_bundle(F.plane()), 2, True),
        (F.cyclic(), 3, True),
        (F.dirac_algebroid(), 3, True),
        (F.non_jacobi(), 3, False),
    ],
    ids=["tangent", "cyclic", "dirac", "non-jacobi"],
)
def test_dsquared(A, cap, ok):
    assert check_dsquared(A, cap).passed is ok
