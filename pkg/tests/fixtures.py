"""Fixture builders shared by the unit and acceptance tests."""

from __future__ import annotations

import random
from pathlib import Path

from folalg.algebroid import LieAlgebroid, lie_algebra, tangent_bundle
from folalg.charclasses import AConnection
from folalg.courant import CourantFoliation, standard_courant, twisted_standard_courant
from folalg.foliation import FoliatedPair, TransversalLieAlgebroid, canonical_extension_pair, quotient_transversal
from folalg.ring import Chart, DiffForm

DATA = Path(__file__).parent / "data"


def polys(chart, rows):
    return tuple(tuple(chart.poly(str(c)) for c in row) for row in rows)


# -- Lie algebroids ------------------------------------------------------------


def plane():
    return Chart.foliated(["x"], ["y"])


def flat_pair() -> FoliatedPair:
    """(TM, TF) over {x; y}."""
    TM = tangent_bundle(plane())
    return FoliatedPair(TM, [TM.section("0", "1")], [TM.section("1", "0")])


def transverse_b_pair() -> FoliatedPair:
    """B = span{d/dx} with leaves along y: anchor of B is transverse."""
    TM = tangent_bundle(plane())
    return FoliatedPair(TM, [TM.section("1", "0")], [TM.section("0", "1")])


def bad_witness_pair() -> FoliatedPair:
    """Witness y d/dx is not B-foliated: [d/dy, y d/dx] = d/dx."""
    TM = tangent_bundle(plane())
    return FoliatedPair(TM, [TM.section("0", "1")], [TM.section("1", "0")], [TM.section("y", "0")])


def dirac_chart():
    return Chart.foliated(["x1", "x2"], ["y"])


def dirac_algebroid() -> LieAlgebroid:
    """D = F + graph(P), P = x1 d/dx1 ^ d/dx2, basis (d/dy, x1 d/dx2 + dx1, -x1 d/dx1 + dx2)."""
    D = dirac_chart()
    anchor = polys(D, [[0, 0, 1], [0, "x1", 0], ["-x1", 0, 0]])
    return LieAlgebroid(D, 3, anchor, {(1, 2): polys(D, [[0, 1, 0]])[0]})


def dirac_pair() -> FoliatedPair:
    A = dirac_algebroid()
    return FoliatedPair(A, [A.basis(0)], [A.basis(1), A.basis(2)])


EXTENSION_LIFT = [["0", "x1", "y"], ["-x1", "0", "x2*y"]]


def extension_pair() -> FoliatedPair:
    """Canonical extension of the Dirac quotient with a lift that moves along the leaves."""
    E = quotient_transversal(dirac_pair())
    D = dirac_chart()
    return canonical_extension_pair(E, polys(D, EXTENSION_LIFT))


def nu_plane() -> TransversalLieAlgebroid:
    C = plane()
    return TransversalLieAlgebroid(C, 1, ((C.one(),),), {})


def cyclic() -> LieAlgebroid:
    return lie_algebra({(0, 1): (0, 0, 1), (1, 2): (1, 0, 0), (2, 0): (0, 1, 0)}, 3)


def non_jacobi() -> LieAlgebroid:
    """[e1, e2] = e3, [e1, e3] = e1."""
    return lie_algebra({(0, 1): (0, 0, 1), (0, 2): (1, 0, 0)}, 3)


def dual_negative_pair() -> FoliatedPair:
    """Rank 3 over {x; y}: e1 -> d/dy spans B, [e2, e3] = y e2 is not foliated."""
    C = plane()
    z, one = C.zero(), C.one()
    A = LieAlgebroid(C, 3, ((z, one), (z, z), (z, z)), {(1, 2): (z, C.poly("y"), z)})
    return FoliatedPair(A, [A.basis(0)], [A.basis(1), A.basis(2)])


def leaves3_pair(q_names=("x",), leaf_names=("y1", "y2", "y3")) -> FoliatedPair:
    C = Chart.foliated(q_names, leaf_names)
    TM = tangent_bundle(C)
    k = len(q_names)
    B = [TM.basis(k + u) for u in range(len(leaf_names))]
    W = [TM.basis(a) for a in range(k)]
    return FoliatedPair(TM, B, W)


def passing_pairs() -> dict[str, FoliatedPair]:
    return {
        "flat": flat_pair(),
        "dirac": dirac_pair(),
        "extension": extension_pair(),
        "leaves2": leaves3_pair(("x",), ("y1", "y2")),
    }


def connection(A, rank, table) -> AConnection:
    """table[h][b][c] as strings; missing h are zero."""
    C = A.chart
    z = C.zero()
    gamma = []
    for h in range(A.rank):
        if h < len(table) and table[h] is not None:
            gamma.append(tuple(tuple(C.poly(str(c)) for c in row) for row in table[h]))
        else:
            gamma.append(tuple(tuple(z for _ in range(rank)) for _ in range(rank)))
    return AConnection(A, rank, tuple(gamma))


# -- random algebroids -------------------------------------------------------


def random_algebroid(rng: random.Random) -> LieAlgebroid:
    """r <= 3, m <= 2, coefficients affine with integer coefficients in [-2, 2]."""
    r = rng.randint(1, 3)
    m = rng.randint(0, 2)
    names = ["x1", "x2"][:m]
    C = Chart.foliated(names, ())
    density = rng.choice([0.15, 0.3, 0.5])

    def coeff():
        if rng.random() > density:
            return C.zero()
        p = C.const(rng.randint(-2, 2))
        for v in names:
            if rng.random() < 0.5:
                p = p + C.var(v) * rng.randint(-2, 2)
        return p

    anchor = tuple(tuple(coeff() for _ in range(m)) for _ in range(r))
    structure = {}
    for h in range(r):
        for k in range(h + 1, r):
            structure[(h, k)] = tuple(coeff() for _ in range(r))
    return LieAlgebroid(C, r, anchor, structure)


# -- Courant algebroids ------------------------------------------------------


def big_plane():
    return standard_courant(plane())


def tf_courant() -> CourantFoliation:
    """T F inside TM + T*M over {x; y}; frame (d/dx, d/dy, dx, dy)."""
    A = big_plane()
    return CourantFoliation(A, [A.section("0", "1", "0", "0")], [A.section("1", "0", "0", "0"), A.section("0", "0", "1", "0")])


def tf_splittings():
    fol = tf_courant()
    A = fol.A
    first = fol.with_splitting([A.section("1", "0", "0", "0"), A.section("0", "0", "1", "0")], [A.section("0", "0", "0", "1")])
    second = fol.with_splitting([A.section("1", "-1", "0", "0"), A.section("0", "0", "1", "0")], [A.section("0", "0", "1", "1")])
    return first, second


def e_theta() -> CourantFoliation:
    """B = {(Y, i(Y) theta)}, theta = dx ^ dy."""
    A = big_plane()
    return CourantFoliation(A, [A.section("0", "1", "-1", "0")], [A.section("1", "0", "0", "1"), A.section("0", "0", "1", "0")])


def dirac_span() -> CourantFoliation:
    A = big_plane()
    return CourantFoliation(A, [A.section("0", "1", "0", "0"), A.section("0", "0", "1", "0")], [])


def reduction_fixture() -> CourantFoliation:
    """M = {x1, x2; y}, B = span{(d/dy, 0), (0, dx1)}; frame (d1, d2, dy, dx1, dx2, dy)."""
    A = standard_courant(dirac_chart())
    s = A.section
    return CourantFoliation(A, [s("0", "0", "1", "0", "0", "0"), s("0", "0", "0", "1", "0", "0")], [s("0", "1", "0", "0", "0", "0"), s("0", "0", "0", "0", "1", "0")])


def volume_form(chart, coeff="1") -> DiffForm:
    return DiffForm(chart, 3, {(0, 1, 2): chart.poly(coeff)})


def twisted_tf() -> CourantFoliation:
    """T F inside the Phi-twisted TM + T*M over {x1, x2, x3; y}, Phi = x1 x2 dx1^dx2^dx3."""
    C = Chart.foliated(["x1", "x2", "x3"], ["y"])
    A = twisted_standard_courant(C, DiffForm(C, 3, {(0, 1, 2): C.poly("x1*x2")}))
    unit = [A.basis(i) for i in range(8)]
    return CourantFoliation(A, [unit[3]], [unit[i] for i in (0, 1, 2, 4, 5, 6)])
