import pytest

import fixtures as F
from folalg.algebroid import AForm, d_A, tangent_bundle
from folalg.charclasses import (
    AConnection,
    BottError,
    FoliatedBundle,
    bott_connection,
    char_form,
    check_bott_vanishing,
    check_char_closed,
    check_transgression,
    curvature,
    delta_form,
)
from folalg.report import Verdict

LEAVES3 = F.leaves3_pair()
TM4 = LEAVES3.A


def all_zero(gamma):
    return all(c.is_zero() for m in gamma for row in m for c in row)


# -- Bott connections -----------------------------------------------------------


def test_bott_on_trivial_line_vanishes_along_b():
    pair = F.flat_pair()
    nabla = bott_connection(pair, FoliatedBundle("trivial", 1))
    assert all_zero(nabla.gamma)


def test_bott_on_complement_of_flat_pair_is_flat():
    pair = F.flat_pair()
    nabla = bott_connection(pair, FoliatedBundle("C", 1))
    R = curvature(pair.A, nabla)
    assert all(entry.is_zero() for row in R for entry in row)


def test_bott_on_dirac_complement_follows_frame():
    pair = F.dirac_pair()
    P = pair.chart.poly
    prime = [[[P("x1"), P("0")], [P("y"), P("1")]], [[P("0"), P("x2")], [P("0"), P("0")]]]
    nabla = bott_connection(pair, FoliatedBundle("C", 2), prime)
    # the adapted frame is (e2, e3, e1), so e1 carries nothing and e2, e3 carry nabla'
    assert all_zero([nabla.gamma[0]])
    assert nabla.gamma[1] == tuple(tuple(r) for r in prime[0])
    assert nabla.gamma[2] == tuple(tuple(r) for r in prime[1])
    R = curvature(pair.A, nabla)
    assert all(entry.evaluate([pair.B[0], pair.B[0]]).is_zero() for row in R for entry in row)


def test_bott_requires_foliated_frame():
    with pytest.raises(BottError):
        bott_connection(F.bad_witness_pair(), FoliatedBundle("C", 1))


# -- curvature and characteristic forms ------------------------------------------


def test_flat_connection_has_zero_curvature():
    A = tangent_bundle(F.plane())
    R = curvature(A, AConnection.zero(A, 2))
    assert all(entry.is_zero() for row in R for entry in row)


def test_line_curvature_is_d_of_connection_form():
    A = tangent_bundle(F.plane())
    nabla = F.connection(A, 1, [[["y"]], [["x^2"]]])
    R = curvature(A, nabla)
    # R(e1, e2) = d/dx(x^2) - d/dy(y)
    assert R[0][0][(0, 1)] == A.chart.poly("2*x - 1")


def test_char_form_of_zero_curvature():
    A = tangent_bundle(F.plane())
    assert char_form(curvature(A, AConnection.zero(A, 1)), 1).is_zero()


LINE = F.connection(TM4, 1, [None, [["y2"]], None, [["x"]]])


def test_scalar_char_form_is_power():
    R = curvature(TM4, LINE)
    omega = R[0][0]
    assert char_form(R, 2) == omega.wedge(omega)
    assert not char_form(R, 2).is_zero()


def test_line_char_form_closed():
    assert check_char_closed(TM4, LINE, 2).passed


# -- transgression -------------------------------------------------------------


def test_delta_of_equal_connections_vanishes():
    assert delta_form(TM4, LINE, LINE, 2).is_zero()


def test_delta_of_line_at_k1_is_difference_form():
    delta = delta_form(TM4, AConnection.zero(TM4, 1), LINE, 1)
    P = TM4.chart.poly
    assert delta == AForm(TM4.chart, 4, 1, {(1,): P("y2"), (3,): P("x")})


RANK2 = F.connection(
    TM4,
    2,
    [[["x", "y1"], ["0", "y2"]], [["1", "0"], ["y3", "x"]], [["0", "y1*y2"], ["x", "0"]], [["y1", "0"], ["0", "1"]]],
)

DIRAC = F.dirac_algebroid()
DIRAC2 = F.connection(DIRAC, 2, [[["x1", "y"], ["0", "1"]], [["y", "0"], ["x2", "x1"]], None])

CONNECTION_PAIRS = {
    "line": (TM4, AConnection.zero(TM4, 1), LINE),
    "rank2": (TM4, AConnection.zero(TM4, 2), RANK2),
    "dirac": (DIRAC, AConnection.zero(DIRAC, 2), DIRAC2),
}


@pytest.mark.parametrize("name", sorted(CONNECTION_PAIRS))
@pytest.mark.parametrize("k", [1, 2, 3])
def test_transgression(name, k):
    A, n0, n1 = CONNECTION_PAIRS[name]
    assert check_transgression(A, n0, n1, k).passed
    assert check_char_closed(A, n1, k).passed


def test_transgression_between_two_nonflat_connections():
    for k in (1, 2):
        assert check_transgression(TM4, LINE, F.connection(TM4, 1, [[["y3"]], None, [["x*y1"]], None]), k).passed


def test_transgression_detects_wrong_difference():
    A, n0, n1 = CONNECTION_PAIRS["line"]
    delta = delta_form(A, n0, n1, 1)
    wrong = delta + AForm(A.chart, 4, 1, {(0,): A.chart.poly("y1")})
    lhs = d_A(A, wrong)
    rhs = char_form(curvature(A, n1), 1) - char_form(curvature(A, n0), 1)
    assert not (lhs - rhs).is_zero()


# -- Bott vanishing ---------------------------------------------------------------


def test_vanishing_on_flat_pair():
    report = check_bott_vanishing(F.flat_pair(), FoliatedBundle("C", 1), 2)
    assert report.passed and report.verdict_of("bott-vanishing") is Verdict.PASS


def test_vanishing_not_claimed_at_codimension():
    report = check_bott_vanishing(F.flat_pair(), FoliatedBundle("C", 1), 1)
    assert report.verdict_of("bott-vanishing") is Verdict.NOT_APPLICABLE


def test_vanishing_on_dirac_pair():
    assert check_bott_vanishing(F.dirac_pair(), FoliatedBundle("C", 2), 3).passed


def test_vanishing_with_nonflat_transverse_part():
    P = LEAVES3.chart.poly
    prime = [[[P("y1*x + y2^2")]]]
    nabla = bott_connection(LEAVES3, FoliatedBundle("C", 1), prime)
    R = curvature(TM4, nabla)
    assert not all(e.is_zero() for row in R for e in row)
    assert check_bott_vanishing(LEAVES3, FoliatedBundle("C", 1), 2, prime).passed


def test_non_bott_connection_does_not_vanish():
    """The same power sum for a connection that is not Bott is nonzero."""
    assert not char_form(curvature(TM4, LINE), 2).is_zero()
