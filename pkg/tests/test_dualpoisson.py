import random

import pytest
from hypothesis import given, settings, strategies as st

import fixtures as F
from folalg.algebroid import check_lie_algebroid, tangent_bundle
from folalg.dualpoisson import (
    check_foliated_dual,
    check_poisson,
    dual_poisson,
    odd_field,
    split_data,
    vaintrob_conditions,
)
from folalg.ring import Chart, Multivector


def fail_ids(report):
    return [c.id for c in report.failures()]


def test_dual_of_tangent_line_is_canonical():
    C = Chart.foliated(["x"], [])
    M = dual_poisson(tangent_bundle(C))
    ch = M.chart
    expected = Multivector(ch, 2, {(ch.index("eta1"), ch.index("x")): ch.one()})
    assert M.bivector == expected
    assert check_poisson(M).passed


def test_dual_of_cyclic_is_lie_poisson():
    M = dual_poisson(F.cyclic())
    ch = M.chart
    i = ch.index
    v = ch.var
    expected = Multivector(
        ch, 2, {(i("eta1"), i("eta2")): v("eta3"), (i("eta2"), i("eta3")): v("eta1"), (i("eta3"), i("eta1")): v("eta2")}
    )
    assert M.bivector == expected
    assert check_poisson(M).passed


def test_linear_bracket_on_cyclic():
    A = F.cyclic()
    M = dual_poisson(A)
    assert M.bracket(M.linear(A.basis(0)), M.linear(A.basis(1))) == M.chart.var("eta3")


def test_dual_of_non_jacobi_fails():
    report = check_poisson(dual_poisson(F.non_jacobi()))
    assert fail_ids(report) == ["schouten-square"]
    assert report["schouten-square"].residuals == ("d/deta1^d/deta2^d/deta3: 2*eta3",)


DIRAC = F.dirac_algebroid()
DM = dual_poisson(DIRAC)
DC = DIRAC.chart


def coeff(chart):
    names = chart.base
    return st.lists(st.integers(-2, 2), min_size=len(names) + 1, max_size=len(names) + 1).map(
        lambda cs: sum((chart.var(n) * c for n, c in zip(names, cs[1:])), chart.const(cs[0]))
    )


@settings(max_examples=25, deadline=None)
@given(st.tuples(*[coeff(DC)] * 3), st.tuples(*[coeff(DC)] * 3), coeff(DC), coeff(DC))
def test_bracket_laws(s1, s2, f, g):
    M = DM
    assert M.bracket(M.linear(s1), M.linear(s2)) == M.linear(DIRAC.bracket(s1, s2))
    assert M.bracket(M.linear(s1), f) == DIRAC.act(s1, f).on(M.chart)
    assert M.bracket(f, g).is_zero()


@pytest.mark.parametrize("seed", range(10))
def test_axioms_iff_poisson_random(seed):
    rng = random.Random(seed)
    for _ in range(10):
        A = F.random_algebroid(rng)
        assert check_lie_algebroid(A).passed == check_poisson(dual_poisson(A)).passed


@pytest.mark.parametrize(
    "A", [tangent_bundle(F.plane()), F.cyclic(), F.non_jacobi(), F.dirac_algebroid(), F.extension_pair().A]
)
def test_axioms_iff_poisson_fixtures(A):
    assert check_lie_algebroid(A).passed == check_poisson(dual_poisson(A)).passed


# -- foliated dual ------------------------------------------------------------------


def test_flat_pair_lambda_and_restricted_brackets():
    pair = F.flat_pair()
    report = check_foliated_dual(pair)
    assert report.passed
    sd = split_data(pair)
    ch = sd.chart
    i = ch.index
    Lam = Multivector(ch, 2, {(i("zeta1"), i("x")): ch.one(), (i("eta1"), i("y")): ch.one()})
    assert report.data["Lambda"] == str(Lam)
    # {zeta, x} = 1, {x, x} = 0
    assert Lam.bracket_functions(ch.var("zeta1"), ch.var("x")) == ch.one()
    assert Lam.bracket_functions(ch.var("x"), ch.var("x")).is_zero()


def test_negative_pair_names_coefficient():
    report = check_foliated_dual(F.dual_negative_pair())
    assert report["coeff-alpha-s-foliated"].residuals == ("alpha^1_(1,2) = y",)
    assert "coeff-alpha-s-foliated" in fail_ids(report)


def test_vaintrob_flat_restriction_is_leafwise():
    pair = F.flat_pair()
    assert vaintrob_conditions(pair).passed
    W = odd_field(split_data(pair))
    assert str(W.restricted()) == "(1)*etabar1*d/dy"


ALL_PAIRS = {
    **F.passing_pairs(),
    "negative": F.dual_negative_pair(),
    "transverse-b": F.transverse_b_pair(),
    "bad-witness": F.bad_witness_pair(),
}


@pytest.mark.parametrize("name", sorted(ALL_PAIRS))
def test_foliated_dual_and_vaintrob_agree(name):
    pair = ALL_PAIRS[name]
    a = check_foliated_dual(pair).passed
    b = vaintrob_conditions(pair).passed
    assert a == b
    if name in F.passing_pairs():
        assert a
