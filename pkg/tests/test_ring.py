from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from folalg.ring import Chart, ChartError, DiffForm, Multivector, ParseError, Poly, field_bracket, schouten

CHART = Chart.foliated(["x1", "x2"], ["y1", "y2"])
NAMES = CHART.variables


@st.composite
def polys(draw, chart=CHART, max_terms=4, max_exp=2):
    n = len(chart.variables)
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_exp)] * n),
            st.fractions(min_value=-3, max_value=3, max_denominator=3),
            max_size=max_terms,
        )
    )
    return Poly(chart, terms)


def vector_fields(chart, dim):
    return st.lists(polys(chart, 2, 1), min_size=dim, max_size=dim)


@st.composite
def multivectors(draw, chart, degree):
    from itertools import combinations

    idx = list(combinations(range(len(chart.variables)), degree))
    chosen = draw(st.lists(st.sampled_from(idx), max_size=2, unique=True)) if idx else []
    return Multivector(chart, degree, {i: draw(polys(chart, 2, 1)) for i in chosen})


# -- parsing -------------------------------------------------------------


def test_parse_two_terms():
    p = CHART.poly("3/2*x1^2*y1 - x1")
    assert p.terms == {(2, 0, 1, 0): Fraction(3, 2), (1, 0, 0, 0): Fraction(-1)}


def test_parse_zero_has_no_terms():
    assert CHART.poly("0").terms == {}


def test_parse_collects_like_terms():
    assert CHART.poly("x1 + x1") == CHART.poly("2*x1")
    assert len(CHART.poly("x1 + x1").terms) == 1


def test_parse_whitespace_insignificant():
    assert CHART.poly(" x1 *y2 ^ 2-  1/3 ") == CHART.poly("x1*y2^2-1/3")


def test_parse_leading_minus():
    assert CHART.poly("-x1 + 2") == CHART.const(2) - CHART.var("x1")


@pytest.mark.parametrize(
    "text, reason",
    [
        ("z + 1", "unknown variable"),
        ("1/0", "malformed rational"),
        ("x1^", "malformed exponent"),
        ("x1^-2", "malformed exponent"),
        ("2*", "expected"),
        ("x1 x2", "unexpected"),
    ],
)
def test_parse_errors(text, reason):
    with pytest.raises(ParseError) as exc:
        CHART.poly(text)
    assert reason in str(exc.value)


@given(polys())
def test_print_parse_round_trip(p):
    assert CHART.poly(str(p)) == p


# -- ring laws -------------------------------------------------------------


@given(polys(), polys(), polys())
def test_distributive(p, q, r):
    assert (p + q) * r == p * r + q * r


@given(polys(), polys())
def test_commutative(p, q):
    assert p * q == q * p and p + q == q + p


@given(polys(), st.sampled_from(NAMES), st.sampled_from(NAMES))
def test_partials_commute(p, a, b):
    assert p.partial(a).partial(b) == p.partial(b).partial(a)


@given(polys(), polys(), st.sampled_from(NAMES))
def test_partial_leibniz(p, q, a):
    assert (p * q).partial(a) == p.partial(a) * q + p * q.partial(a)


def test_partial_examples():
    C = Chart.foliated(["x1"], ["y1"])
    assert C.poly("x1^2*y1").partial("x1") == C.poly("2*x1*y1")
    assert C.poly("x1^2").partial("y1") == C.zero()
    assert C.poly("x1*y1^2").partial("y1") == C.poly("2*x1*y1")


def test_partial_unknown_coordinate():
    with pytest.raises(ChartError):
        CHART.poly("x1").partial("z")


# -- foliated functions ---------------------------------------------------


def test_is_foliated_examples():
    C = Chart.foliated(["x1"], ["y1"])
    assert C.poly("x1^2 + 3").is_foliated()
    assert not C.poly("x1*y1").is_foliated()
    assert Chart.foliated(["x1"], []).poly("x1^3").is_foliated()


foliated_polys = polys().map(lambda p: p.at_zero(["y1", "y2"]))


@given(foliated_polys, foliated_polys, st.sampled_from(["x1", "x2"]))
def test_foliated_closed_under_operations(p, q, a):
    assert p.is_foliated() and q.is_foliated()
    assert (p + q).is_foliated()
    assert (p * q).is_foliated()
    assert p.partial(a).is_foliated()


# -- charts ----------------------------------------------------------------


def test_chart_rejects_duplicates():
    with pytest.raises(ChartError):
        Chart.foliated(["x"], ["x"])


def test_chart_allows_empty_groups():
    pt = Chart.foliated([], [])
    assert pt.base == () and pt.one().is_constant()


def test_promotion_along_extension():
    ext = CHART.extend(["eta1"], "eta")
    p = CHART.poly("x1") + ext.poly("eta1")
    assert p.chart == ext and p == ext.poly("x1 + eta1")


# -- Schouten bracket -------------------------------------------------------

ETA = Chart.foliated([], []).extend(["eta1", "eta2", "eta3"], "eta")


def test_constant_bivector_is_poisson():
    P = Multivector(ETA, 2, {(0, 1): ETA.const(2), (1, 2): ETA.const(-1)})
    assert schouten(P, P).is_zero()


def test_lie_poisson_cyclic_bivector():
    v = ETA.var
    P = Multivector(ETA, 2, {(0, 1): v("eta3"), (1, 2): v("eta1"), (2, 0): v("eta2")})
    assert schouten(P, P).is_zero()


def test_lie_poisson_jacobiator_brute_force():
    """[P, P] = 0 agrees with the Jacobi identity of the induced bracket on coordinates."""
    v = ETA.var
    P = Multivector(ETA, 2, {(0, 1): v("eta3"), (1, 2): v("eta1"), (2, 0): v("eta2")})
    fs = [v(n) for n in ETA.variables]
    br = P.bracket_functions
    for a in range(3):
        for b in range(3):
            for c in range(3):
                jac = br(fs[a], br(fs[b], fs[c])) + br(fs[b], br(fs[c], fs[a])) + br(fs[c], br(fs[a], fs[b]))
                assert jac.is_zero()


def test_non_poisson_bivector_detected():
    v = ETA.var
    P = Multivector(ETA, 2, {(0, 1): v("eta3"), (0, 2): v("eta1")})
    assert not schouten(P, P).is_zero()


PLANE3 = Chart.foliated(["x1", "x2"], ["y1"])


@settings(max_examples=40)
@given(vector_fields(PLANE3, 3), vector_fields(PLANE3, 3))
def test_schouten_on_fields_is_commutator(X, Y):
    names = PLANE3.variables
    mX = Multivector(PLANE3, 1, {(i,): c for i, c in enumerate(X)})
    mY = Multivector(PLANE3, 1, {(i,): c for i, c in enumerate(Y)})
    expected = field_bracket(X, Y, names)
    got = schouten(mX, mY)
    assert all(got[i] == expected[i] for i in range(3))


SMALL = Chart.foliated(["x1", "x2"], ["y1", "y2"])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.data())
def test_schouten_graded_antisymmetry(p, q, data):
    P = data.draw(multivectors(SMALL, p))
    Q = data.draw(multivectors(SMALL, q))
    sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
    assert schouten(P, Q) == schouten(Q, P) * sign


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(1, 2), st.data())
def test_schouten_graded_leibniz(p, q, r, data):
    """[P, Q ^ R] = [P, Q] ^ R + (-1)^((p-1)q) Q ^ [P, R]."""
    P = data.draw(multivectors(SMALL, p))
    Q = data.draw(multivectors(SMALL, q))
    R = data.draw(multivectors(SMALL, r))
    lhs = schouten(P, Q.wedge(R))
    rhs = schouten(P, Q).wedge(R) + Q.wedge(schouten(P, R)) * (1 if ((p - 1) * q) % 2 == 0 else -1)
    assert lhs == rhs


def test_schouten_field_example():
    C = Chart.foliated(["x"], ["y"])
    X = Multivector.field(C, {"x": C.one()})
    Y = Multivector.field(C, {"y": C.var("x")})
    assert schouten(X, Y) == Multivector.field(C, {"y": C.one()})


# -- forms ------------------------------------------------------------------


@given(polys(max_terms=3))
def test_d_squared_on_functions(f):
    assert DiffForm.function(f).d().d().is_zero()


@given(polys(max_terms=3), vector_fields(CHART, 4))
def test_cartan_on_functions(f, X):
    lie = DiffForm.function(f).lie(X)
    direct = sum((c * f.partial(n) for c, n in zip(X, NAMES)), CHART.zero())
    assert lie[()] == direct
