import pytest
from hypothesis import given, settings, strategies as st

import fixtures as F
from folalg.algebroid import LieAlgebroid
from folalg.cohomology import (
    BigradedComplex,
    DegreeClosureError,
    check_bigraded_identities,
    decompose_dA,
    dpp_cohomology,
    dpp_cohomology_dimension,
)
from folalg.foliation import FoliatedPair, check_foliation
from folalg.report import Verdict

FLAT = F.flat_pair()
CX = BigradedComplex(FLAT)
C = FLAT.chart


def test_function_splits_into_partials():
    f = C.poly("x^2*y + y^3 + x")
    dp, dpp, dpa = decompose_dA(FLAT, CX.form(0, 0, {((), ()): f}))
    assert dp.form[(0,)] == f.partial("x")
    assert dpp.form[(1,)] == f.partial("y")
    assert dpa.is_zero()


def test_dual_b_form_is_closed_in_flat_model():
    lam = CX.form(0, 1, {((), (0,)): C.one()})
    assert all(part.is_zero() for part in decompose_dA(FLAT, lam))


def test_foliated_c_form_is_dpp_closed():
    lam = CX.form(1, 0, {((0,), ()): C.poly("x^3 - 2*x")})
    assert CX.dpp(lam).is_zero()


DIRAC = F.dirac_pair()
DCX = BigradedComplex(DIRAC)
DC = DIRAC.chart


def coeff(chart):
    names = chart.base
    return st.lists(st.integers(-2, 2), min_size=len(names) + 1, max_size=len(names) + 1).map(
        lambda cs: sum((chart.var(n) * c for n, c in zip(names, cs[1:])), chart.const(cs[0]))
    )


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(DCX.types()), st.data())
def test_parts_sum_to_d(slot, data):
    s, r = slot
    coeffs = {}
    for idx in DCX.index_tuples(s, r):
        cs, bs = idx[:s], tuple(i - DCX.q for i in idx[s:])
        coeffs[(cs, bs)] = data.draw(coeff(DC)) * data.draw(coeff(DC))
    lam = DCX.form(s, r, coeffs)
    dp, dpp, dpa = DCX.decompose(lam)
    assert DCX.d(lam) == dp.form + dpp.form + dpa.form


@pytest.mark.parametrize("name", ["flat", "dirac", "extension", "leaves2"])
def test_bigraded_identities(name):
    assert check_bigraded_identities(F.passing_pairs()[name], 2).passed


def test_poincare_lemma_flat_slot():
    res = dpp_cohomology_dimension(FLAT, (0, 1), 2)
    assert res.dimension == 0
    assert dpp_cohomology(FLAT, (0, 1), 2).verdict_of("poincare-lemma") is Verdict.PASS


@pytest.mark.parametrize("s, expected", [(0, 6), (1, 12), (2, 6)])
def test_b_degree_zero_kernel_is_foliated_forms(s, expected):
    # d'' kills exactly the foliated coefficients: 6 monomials in x1, x2 of degree <= 2
    res = dpp_cohomology_dimension(DIRAC, (s, 0), 2)
    assert res.dim_closed == expected and res.dim_exact == 0


def non_minimal_pair():
    Cn = F.plane()
    z, one = Cn.zero(), Cn.one()
    A = LieAlgebroid(Cn, 3, ((z, one), (one, z), (z, z)))
    return FoliatedPair(A, [A.basis(0), A.basis(2)], [A.basis(1)])


def test_non_minimal_pair_gates_poincare_lemma():
    pair = non_minimal_pair()
    assert check_foliation(pair).passed and not pair.is_minimal()
    report = dpp_cohomology(pair, (0, 1), 2)
    assert report.verdict_of("poincare-lemma") is Verdict.NOT_APPLICABLE


def test_degree_closure_violation():
    Cn = F.plane()
    z, one = Cn.zero(), Cn.one()
    A = LieAlgebroid(Cn, 2, ((z, Cn.poly("y^2")), (one, z)))
    pair = FoliatedPair(A, [A.basis(0)], [A.basis(1)])
    with pytest.raises(DegreeClosureError, match="degree 2"):
        dpp_cohomology(pair, (0, 1), 2)


@pytest.mark.parametrize("name", ["flat", "dirac", "leaves2"])
@pytest.mark.parametrize("D", [1, 2])
def test_poincare_lemma_small(name, D):
    pair = F.passing_pairs()[name]
    for s in range(pair.q + 1):
        for r in range(1, pair.p + 1):
            assert dpp_cohomology_dimension(pair, (s, r), D).dimension == 0
