"""The tangent Lie algebroid TA over TM and the tangent foliation (TA, TB).

For a chart (x, y) the tangent chart is (x, y, x_dot, y_dot), with x and
x_dot transverse.  TA has the basis (c_1..c_r, v_1..v_r), the complete and
vertical lifts of the basis of A.  Lifts of a section a = a^al e_al:

    a^C = a^al c_al + (x_dot^i d_i a^al) v_al,     a^V = a^al v_al,

and the algebroid structure is fixed by

    #c_al = (#e_al)^C,  #v_al = (#e_al)^V,
    [c_al, c_be] = [e_al, e_be]^C,  [c_al, v_be] = [e_al, e_be]^V,  [v_al, v_be] = 0.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .algebroid import LieAlgebroid, Section
from .foliation import FoliatedPair
from .report import Report
from .ring import BASE_TAGS, Chart, Poly

DOT = "_dot"


def dotted(name: str) -> str:
    return name + DOT


def tangent_chart(chart: Chart) -> Chart:
    """(x, y) -> (x, y, x_dot, y_dot), dotted names keep their group tag."""
    if any(tag not in BASE_TAGS for tag in chart.tags):
        raise ValueError("the tangent chart is built from a chart of base coordinates only")
    names = tuple(dotted(v) for v in chart.variables)
    return Chart(chart.variables + names, chart.tags + chart.tags)


def function_complete_lift(f: Poly, base: Sequence[str], tchart: Chart) -> Poly:
    """f^C = x_dot^i d f / d x^i."""
    f = f.on(tchart)
    out = tchart.zero()
    for name in base:
        d = f.partial(name)
        if not d.is_zero():
            out = out + tchart.var(dotted(name)) * d
    return out


def field_complete_lift(X: Sequence[Poly], base: Sequence[str], tchart: Chart) -> tuple[Poly, ...]:
    """X^C = X^i d_i + (x_dot^j d_j X^i) d/d x_dot^i, over tchart.base."""
    X = [c.on(tchart) for c in X]
    return tuple(X) + tuple(function_complete_lift(c, base, tchart) for c in X)


def field_vertical_lift(X: Sequence[Poly], tchart: Chart) -> tuple[Poly, ...]:
    return tuple(tchart.zero() for _ in X) + tuple(c.on(tchart) for c in X)


class TangentLift:
    """TA for a given A, with lifts of sections and the flip identity check."""

    def __init__(self, A: LieAlgebroid):
        self.A = A
        self.base = A.coords
        self.tchart = tangent_chart(A.chart)
        self.TA = self._build()

    def complete_lift(self, a: Sequence[Poly]) -> Section:
        if len(a) != self.A.rank:
            raise ValueError("section rank mismatch")
        return tuple(c.on(self.tchart) for c in a) + tuple(function_complete_lift(c, self.base, self.tchart) for c in a)

    def vertical_lift(self, a: Sequence[Poly]) -> Section:
        if len(a) != self.A.rank:
            raise ValueError("section rank mismatch")
        return tuple(self.tchart.zero() for _ in a) + tuple(c.on(self.tchart) for c in a)

    def _build(self) -> LieAlgebroid:
        A, tc, r = self.A, self.tchart, self.A.rank
        anchor = [field_complete_lift(A.anchor[h], self.base, tc) for h in range(r)]
        anchor += [field_vertical_lift(A.anchor[h], tc) for h in range(r)]
        structure = {}
        for h, k in combinations(range(r), 2):
            s = A.struct(h, k)
            if all(c.is_zero() for c in s):
                continue
            structure[(h, k)] = self.complete_lift(s)
            structure[(h, r + k)] = self.vertical_lift(s)
            structure[(k, r + h)] = tuple(-c for c in self.vertical_lift(s))
        labels = tuple(f"{l}^C" for l in A.labels) + tuple(f"{l}^V" for l in A.labels)
        return LieAlgebroid(tc, 2 * r, tuple(anchor), structure, labels)

    def check_flip(self) -> Report:
        """#_TA equals the flip of the differential of #_A, on a generic point of TA."""
        A, tc, r = self.A, self.tchart, self.A.rank
        xi = tc.fresh("xi", r)
        xid = tc.fresh("xidot", r)
        full = tc.extend(xi, "fiber").extend(xid, "fiber")
        X = [full.var(n) for n in xi]
        Xd = [full.var(n) for n in xid]
        # #_A on the generic element xi^al e_al of A (a map A -> TM)
        image = [sum((X[a] * A.anchor[a][i].on(full) for a in range(r)), full.zero()) for i in range(len(self.base))]
        # its differential along (x_dot, xi_dot), then the flip (x, v, x_dot, v_dot) -> (x, x_dot, v, v_dot)
        diff = []
        for comp in image:
            val = full.zero()
            for name in self.base:
                val = val + full.var(dotted(name)) * comp.partial(name)
            for a in range(r):
                val = val + Xd[a] * comp.partial(xi[a])
            diff.append(val)
        flipped = tuple(image) + tuple(diff)
        direct = self.TA.anchor_apply(tuple(X) + tuple(Xd))
        residuals = [
            f"d/d{name}: {a - b}" for name, a, b in zip(tc.base, direct, flipped) if not (a - b).is_zero()
        ]
        report = Report("tangent anchor and the flip")
        report.expect_zero("flip", "tangent anchor equals the flipped differential of the anchor", residuals)
        return report


def complete_lift(A: LieAlgebroid, a: Sequence[Poly]) -> Section:
    return TangentLift(A).complete_lift(a)


def vertical_lift(A: LieAlgebroid, a: Sequence[Poly]) -> Section:
    return TangentLift(A).vertical_lift(a)


def tangent_algebroid(A: LieAlgebroid) -> LieAlgebroid:
    return TangentLift(A).TA


def tangent_foliation(pair: FoliatedPair) -> FoliatedPair:
    """(TA, TB) with TB = span(b^C, b^V) and the lifted witness as complement."""
    T = TangentLift(pair.A)
    B = tuple(T.complete_lift(b) for b in pair.B) + tuple(T.vertical_lift(b) for b in pair.B)
    C = tuple(T.complete_lift(c) for c in pair.C) + tuple(T.vertical_lift(c) for c in pair.C)
    W = tuple(T.complete_lift(w) for w in pair.witness) + tuple(T.vertical_lift(w) for w in pair.witness)
    return FoliatedPair(T.TA, B, C, W)
