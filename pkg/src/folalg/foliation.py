"""Foliations of Lie algebroids and their constructions.

A foliated pair is a Lie algebroid A together with basis rows of a
subalgebroid B, rows of a complement C, and a witness basis of C made of
B-foliated sections (sections a with [b, a] in B for every b in B).  The
verifier checks bracket closure of B, that the anchor maps B onto the leaf
directions, and foliated generation through the witness.

Span membership is decided by Cramer's rule over the rational-function
field (see :mod:`folalg.linalg`); a rational but non-polynomial solution
is reported as indeterminate instead of being guessed either way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .algebroid import LieAlgebroid, Section, check_lie_algebroid
from .linalg import Membership, SpanSolver, generic_rank, vec_combination
from .report import Report, Verdict
from .ring import Chart, Poly, common_chart

PARAMETER = "parameter"


class QuotientError(ValueError):
    """The witness data does not descend to the quotient bundle."""


class IndeterminateMembership(ValueError):
    """Span membership has a rational but non-polynomial solution."""


class LiftError(ValueError):
    """A lift does not project onto the transversal anchor."""


def _rows(rows) -> tuple[Section, ...]:
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True, eq=False)
class FoliatedPair:
    A: LieAlgebroid
    B: tuple[Section, ...]
    C: tuple[Section, ...]
    witness: tuple[Section, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "B", _rows(self.B))
        object.__setattr__(self, "C", _rows(self.C))
        object.__setattr__(self, "witness", _rows(self.witness) if self.witness else _rows(self.C))
        r = self.A.rank
        for name in ("B", "C", "witness"):
            for row in getattr(self, name):
                if len(row) != r:
                    raise ValueError(f"{name} row has {len(row)} entries, rank is {r}")
        if len(self.B) + len(self.C) != r:
            raise ValueError(f"rank B + rank C = {len(self.B) + len(self.C)} differs from rank A = {r}")
        if len(self.witness) != len(self.C):
            raise ValueError("the witness basis must have rank C rows")

    @property
    def chart(self) -> Chart:
        return self.A.chart

    @property
    def p(self) -> int:
        return len(self.B)

    @property
    def q(self) -> int:
        return len(self.C)

    @property
    def n(self) -> int:
        return len(self.chart.leaf)

    @property
    def frame(self) -> tuple[Section, ...]:
        """Adapted frame: witness rows first, then B rows."""
        return self.witness + self.B

    def b_solver(self) -> SpanSolver:
        return _solver(self.B, self.chart)

    def frame_solver(self) -> SpanSolver:
        return _solver(self.B + self.witness, self.chart)

    def leaf_matrix(self) -> list[list[Poly]]:
        """beta^u_h: leaf components of the anchor on B."""
        idx = [self.A.coords.index(y) for y in self.chart.leaf]
        return [[self.A.anchor_apply(b)[i] for i in idx] for b in self.B]

    def split(self, a: Sequence[Poly]) -> tuple[tuple[Poly, ...], tuple[Poly, ...]]:
        """Coefficients of a in (B, witness): a = f^h b_h + g^s w_s (polynomial)."""
        res = self.frame_solver().solve(a)
        if res.status is not Membership.YES:
            raise QuotientError(f"section is not a polynomial combination of the adapted frame ({res.status.value})")
        coeffs = res.coefficients
        return coeffs[: self.p], coeffs[self.p:]

    def pr_C(self, a: Sequence[Poly]) -> Section:
        _, g = self.split(a)
        return tuple(vec_combination(g, self.witness, self.chart))

    def is_minimal(self) -> bool:
        return self.p == self.n and generic_rank(self.leaf_matrix(), self.chart) == self.n


def _solver(rows, chart) -> SpanSolver:
    return SpanSolver.build([list(r) for r in rows], chart)


def b_foliated_status(pair: FoliatedPair, a: Sequence[Poly], solver: SpanSolver | None = None) -> Membership:
    solver = solver or pair.b_solver()
    worst = Membership.YES
    for b in pair.B:
        st = solver.solve(pair.A.bracket(b, tuple(a))).status
        if st is Membership.NO:
            return st
        if st is Membership.INDETERMINATE:
            worst = st
    return worst


def is_B_foliated(pair: FoliatedPair, a: Sequence[Poly]) -> bool:
    st = b_foliated_status(pair, a)
    if st is Membership.INDETERMINATE:
        raise IndeterminateMembership("B-foliation of the section is undecidable over the polynomial ring")
    return st is Membership.YES


def _verdict(statuses: Sequence[Membership]) -> Verdict:
    if any(s is Membership.NO for s in statuses):
        return Verdict.FAIL
    if any(s is Membership.INDETERMINATE for s in statuses):
        return Verdict.INDETERMINATE
    return Verdict.PASS


def _fmt(labels, s) -> str:
    return "(" + ", ".join(str(c) for c in s) + ")"


def check_foliation(pair: FoliatedPair) -> Report:
    A, chart = pair.A, pair.chart
    report = Report("foliation of a Lie algebroid")
    r, p, q, n = A.rank, pair.p, pair.q, pair.n
    report.data.update({"rank A": str(r), "rank B": str(p), "rank C": str(q), "dim leaves": str(n)})

    rank_B = generic_rank([list(b) for b in pair.B], chart) if pair.B else 0
    report.add("B-rank", "B rows are pointwise independent", rank_B == p, [] if rank_B == p else [f"generic rank {rank_B} < {p}"])
    if rank_B < p:
        return report
    solver = pair.b_solver()

    statuses, residuals = [], []
    for h, k in combinations(range(p), 2):
        st = solver.solve(A.bracket(pair.B[h], pair.B[k])).status
        statuses.append(st)
        if st is not Membership.YES:
            residuals.append(f"[b{h + 1}, b{k + 1}] = {_fmt(A.labels, A.bracket(pair.B[h], pair.B[k]))}: {st.value}")
    report.add("B-closed", "B is closed under the bracket", _verdict(statuses), residuals)

    transverse_res = []
    idx = {name: i for i, name in enumerate(A.coords)}
    for h, b in enumerate(pair.B):
        image = A.anchor_apply(b)
        for x in chart.transverse:
            c = image[idx[x]]
            if not c.is_zero():
                transverse_res.append(f"#b{h + 1} d/d{x}: {c}")
    beta_rank = generic_rank(pair.leaf_matrix(), chart) if p and n else 0
    anchor_ok = not transverse_res and beta_rank == n
    if beta_rank != n:
        transverse_res.append(f"generic rank of leaf anchor block is {beta_rank}, leaves have dimension {n}")
    report.add("anchor-onto-leaves", "anchor maps B onto the leaf tangent bundle", anchor_ok, transverse_res)

    # complement and witness
    rank_BC = generic_rank([list(x) for x in pair.B + pair.C], chart)
    rank_BW = generic_rank([list(x) for x in pair.B + pair.witness], chart)
    comp_res = []
    if rank_BC != r:
        comp_res.append(f"B + C has generic rank {rank_BC} < {r}")
    if rank_BW != r:
        comp_res.append(f"B + witness has generic rank {rank_BW} < {r}")
    c_solver = _solver(pair.C, chart) if pair.C else None
    c_status = []
    for s, w in enumerate(pair.witness):
        if c_solver is None:
            continue
        st = c_solver.solve(w).status
        c_status.append(st)
        if st is not Membership.YES:
            comp_res.append(f"witness w{s + 1} not in C: {st.value}")
    comp_verdict = _verdict(c_status)
    if rank_BC != r or rank_BW != r:
        comp_verdict = Verdict.FAIL
    report.add("complement", "C complements B and the witness spans C", comp_verdict, comp_res)

    fol_status, fol_res = [], []
    for s, w in enumerate(pair.witness):
        st = b_foliated_status(pair, w, solver)
        fol_status.append(st)
        if st is not Membership.YES:
            fol_res.append(f"witness w{s + 1} = {_fmt(A.labels, w)} is not B-foliated ({st.value})")
    report.add("foliated-generation", "witness sections are B-foliated", _verdict(fol_status), fol_res)

    minimal = pair.is_minimal() if anchor_ok else False
    report.data["minimal"] = "yes" if minimal else "no"
    return report


# ---------------------------------------------------------------------------
# transversal-Lie algebroids


@dataclass(frozen=True, eq=False)
class TransversalLieAlgebroid:
    """Foliated bundle with anchor into the normal bundle (transverse coordinates)."""

    chart: Chart
    rank: int
    anchor: tuple[tuple[Poly, ...], ...]
    structure: Mapping[tuple[int, int], tuple[Poly, ...]] = field(default_factory=dict)

    def __post_init__(self):
        k = len(self.chart.transverse)
        if len(self.anchor) != self.rank or any(len(row) != k for row in self.anchor):
            raise ValueError("anchor of a transversal algebroid must be rank x (number of transverse coordinates)")

    def coefficients(self) -> list[tuple[str, Poly]]:
        out = []
        for i, row in enumerate(self.anchor):
            for x, c in zip(self.chart.transverse, row):
                out.append((f"anchor e{i + 1} d/d{x}", c))
        for (h, k), vec in sorted(self.structure.items()):
            for l, c in enumerate(vec):
                out.append((f"[e{h + 1},e{k + 1}] e{l + 1}", c))
        return out

    def transverse_chart(self) -> Chart:
        return Chart.foliated(self.chart.transverse, ())

    def projected(self) -> LieAlgebroid:
        """The same data as an algebroid over the transverse coordinates only."""
        T = self.transverse_chart()
        anchor = tuple(tuple(c.restrict(T) for c in row) for row in self.anchor)
        structure = {k: tuple(c.restrict(T) for c in v) for k, v in self.structure.items()}
        return LieAlgebroid(T, self.rank, anchor, structure)


def check_transversal_lie(E: TransversalLieAlgebroid) -> Report:
    report = Report("transversal-Lie algebroid axioms")
    nonfol = [f"{name}: {c}" for name, c in E.coefficients() if not c.is_foliated()]
    report.expect_zero("foliated-coefficients", "anchor and structure functions are foliated", nonfol)
    if nonfol:
        return report
    report.merge(check_lie_algebroid(E.projected()))
    return report


def quotient_transversal(pair: FoliatedPair) -> TransversalLieAlgebroid:
    A, chart = pair.A, pair.chart
    solver = pair.frame_solver()
    q, p = pair.q, pair.p
    structure = {}
    for s, t in combinations(range(q), 2):
        br = A.bracket(pair.witness[s], pair.witness[t])
        res = solver.solve(br)
        if res.status is not Membership.YES:
            raise QuotientError(f"[w{s + 1}, w{t + 1}] does not decompose polynomially in (B, witness)")
        coeffs = res.coefficients[p:]
        for l, c in enumerate(coeffs):
            if not c.is_foliated():
                raise QuotientError(f"projected structure function [w{s + 1},w{t + 1}]^{l + 1} = {c} is not foliated")
        structure[(s, t)] = tuple(coeffs)
    idx = [A.coords.index(x) for x in chart.transverse]
    anchor = []
    for s, w in enumerate(pair.witness):
        image = A.anchor_apply(w)
        row = tuple(image[i] for i in idx)
        for x, c in zip(chart.transverse, row):
            if not c.is_foliated():
                raise QuotientError(f"anchor of w{s + 1} along {x} is not foliated: {c}")
        anchor.append(row)
    return TransversalLieAlgebroid(chart, q, tuple(anchor), structure)


# ---------------------------------------------------------------------------
# minimal extensions


def _check_lift(E: TransversalLieAlgebroid, rho: Sequence[Sequence[Poly]]) -> list[list[Poly]]:
    chart = E.chart
    base = chart.base
    if len(rho) != E.rank or any(len(row) != len(base) for row in rho):
        raise LiftError(f"lift must be a {E.rank} x {len(base)} matrix")
    rho = [[c.on(common_chart(chart, c.chart)) for c in row] for row in rho]
    idx = [base.index(x) for x in chart.transverse]
    for i, row in enumerate(rho):
        for x, j, a in zip(chart.transverse, idx, E.anchor[i]):
            if not (row[j] - a).is_zero():
                raise LiftError(f"lift of e{i + 1} has d/d{x} component {row[j]}, transversal anchor is {a}")
    return rho


def _extension(E, rho, lam=None) -> FoliatedPair:
    chart = E.chart
    rho = _check_lift(E, rho)
    base = chart.base
    leaf = chart.leaf
    n, q = len(leaf), E.rank
    r = n + q
    leaf_idx = [base.index(y) for y in leaf]
    trans_idx = [base.index(x) for x in chart.transverse]
    zero = chart.zero()

    def unit(j):
        return tuple(chart.one() if i == j else zero for i in range(len(base)))

    anchor = [unit(j) for j in leaf_idx] + [tuple(row) for row in rho]

    def vf_bracket(X, Y):
        from .ring import field_bracket

        return field_bracket(X, Y, base)

    structure = {}
    for u in range(n):
        for i in range(q):
            V = vf_bracket(anchor[u], anchor[n + i])
            for j in trans_idx:
                if not V[j].is_zero():
                    raise LiftError(f"lift of e{i + 1} is not a foliated vector field")
            structure[(u, n + i)] = tuple(V[j] for j in leaf_idx) + tuple(zero for _ in range(q))
    for i, j in combinations(range(q), 2):
        V = vf_bracket(anchor[n + i], anchor[n + j])
        c = E.structure.get((i, j), tuple(zero for _ in range(q)))
        for l in range(q):
            if not c[l].is_zero():
                V = tuple(v - c[l] * w for v, w in zip(V, anchor[n + l]))
        for t in trans_idx:
            if not V[t].is_zero():
                raise LiftError(f"[rho e{i + 1}, rho e{j + 1}] - rho[e{i + 1}, e{j + 1}] is not tangent to the leaves")
        e_part = list(c)
        if lam is not None:
            shift = lam.get((i, j))
            if shift is None and (j, i) in lam:
                shift = tuple(-x for x in lam[(j, i)])
            if shift is not None:
                e_part = [a + b for a, b in zip(e_part, shift)]
        structure[(n + i, n + j)] = tuple(V[t] for t in leaf_idx) + tuple(e_part)
    labels = tuple(f"d/d{y}" for y in leaf) + tuple(f"e{i + 1}" for i in range(q))
    A0 = LieAlgebroid(chart, r, tuple(anchor), structure, labels)
    B = tuple(A0.basis(u) for u in range(n))
    C = tuple(A0.basis(n + i) for i in range(q))
    return FoliatedPair(A0, B, C, C)


def canonical_extension(E: TransversalLieAlgebroid, rho: Sequence[Sequence[Poly]]) -> LieAlgebroid:
    """A_0 = F + E with anchor Id + rho; basis (d/dy^u, e_i)."""
    return _extension(E, rho).A


def canonical_extension_pair(E: TransversalLieAlgebroid, rho: Sequence[Sequence[Poly]]) -> FoliatedPair:
    """(A_0, F) with the E summand as witness."""
    return _extension(E, rho)


def twisted_extension(
    E: TransversalLieAlgebroid,
    rho: Sequence[Sequence[Poly]],
    lam: Mapping[tuple[int, int], Sequence[Poly]],
) -> tuple[LieAlgebroid, Report]:
    """Canonical extension with [e_i, e_j] shifted by lam(e_i, e_j) in the E summand.

    lam must take values in the kernel of the transversal anchor.  The
    returned report is a full axiom check of the result.
    """
    chart = E.chart
    clean = {}
    for (i, j), vec in lam.items():
        if len(vec) != E.rank:
            raise ValueError("twisting values must be sections of E")
        if i == j:
            if any(not c.is_zero() for c in vec):
                raise ValueError("twisting form must be antisymmetric")
            continue
        vec = tuple(c if isinstance(c, Poly) else chart.const(c) for c in vec)
        key, val = ((i, j), vec) if i < j else ((j, i), tuple(-c for c in vec))
        if key in clean and any(not (a - b).is_zero() for a, b in zip(clean[key], val)):
            raise ValueError("twisting form must be antisymmetric")
        clean[key] = val
        image = [chart.zero() for _ in chart.transverse]
        for l, c in enumerate(val):
            image = [x + c * a for x, a in zip(image, E.anchor[l])]
        if any(not x.is_zero() for x in image):
            raise ValueError(f"twisting value on (e{i + 1}, e{j + 1}) is not in the kernel of the anchor")
    A = _extension(E, rho, clean).A
    report = check_lie_algebroid(A)
    report.title = "twisted minimal extension"
    return A, report


# ---------------------------------------------------------------------------
# deformations


@dataclass(frozen=True, eq=False)
class DeformationForm:
    """E-valued B-form of degree 1: values[h][s] is the e_s component on b_h."""

    pair: FoliatedPair
    values: tuple[tuple[Poly, ...], ...]

    def is_zero(self) -> bool:
        return all(c.is_zero() for row in self.values for c in row)

    def xi_C(self) -> tuple[Section, ...]:
        """Image in C: the section assigned to each b_h."""
        return tuple(tuple(vec_combination(row, self.pair.witness, self.pair.chart)) for row in self.values)

    def __sub__(self, other: DeformationForm) -> DeformationForm:
        return DeformationForm(self.pair, tuple(tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(self.values, other.values)))

    def __add__(self, other: DeformationForm) -> DeformationForm:
        return DeformationForm(self.pair, tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.values, other.values)))

    def __eq__(self, other):
        if not isinstance(other, DeformationForm):
            return NotImplemented
        return (self - other).is_zero()

    def __str__(self):
        terms = []
        for h, row in enumerate(self.values):
            for s, c in enumerate(row):
                if not c.is_zero():
                    terms.append(f"({c}) b*{h + 1}(x)e{s + 1}")
        return " + ".join(terms) or "0"


def parameter_chart(chart: Chart, name: str = "t") -> Chart:
    if name in chart:
        if chart.tag_of(name) != PARAMETER:
            raise ValueError(f"coordinate {name!r} is already used")
        return chart
    return chart.extend([name], PARAMETER)


def _at_zero_derivative(p: Poly, t: str) -> Poly:
    return p.partial(t).at_zero([t]) if t in p.chart else p.chart.zero()


def family_basis(pair: FoliatedPair, theta: Sequence[Sequence[Poly]]) -> tuple[Section, ...]:
    """b'_h(t) = b_h + theta^s_h(t) w_s."""
    if len(theta) != pair.p or any(len(row) != pair.q for row in theta):
        raise ValueError(f"deformation family must be a {pair.p} x {pair.q} matrix")
    chart = pair.chart
    for row in theta:
        for c in row:
            chart = common_chart(chart, c.chart)
    out = []
    for b, row in zip(pair.B, theta):
        shift = vec_combination([c.on(chart) for c in row], [[x.on(chart) for x in w] for w in pair.witness], chart)
        out.append(tuple(x.on(chart) + y for x, y in zip(b, shift)))
    return tuple(out)


def deformation_form(pair: FoliatedPair, theta: Sequence[Sequence[Poly]], t: str = "t") -> DeformationForm:
    """Xi^s_h = d theta^s_h / dt at t = 0."""
    if len(theta) != pair.p or any(len(row) != pair.q for row in theta):
        raise ValueError(f"deformation family must be a {pair.p} x {pair.q} matrix")
    for row in theta:
        for c in row:
            if t in c.chart and not c.at_zero([t]).is_zero():
                raise ValueError("deformation family must vanish at t = 0")
    values = tuple(tuple(_at_zero_derivative(c, t).restrict(pair.chart) if t in c.chart else pair.chart.zero() for c in row) for row in theta)
    return DeformationForm(pair, values)


def deformation_form_from_basis(pair: FoliatedPair, rows: Sequence[Sequence[Poly]], t: str = "t") -> DeformationForm:
    """Xi(b_h) = [d b_h(t)/dt at t=0] mod B, for an arbitrary smooth basis b_h(t) of B_t."""
    if len(rows) != pair.p:
        raise ValueError("one family row per B basis row is required")
    values = []
    for h, row in enumerate(rows):
        at0 = tuple(c.at_zero([t]).restrict(pair.chart) if t in c.chart else c for c in row)
        if any(not (a - b).is_zero() for a, b in zip(at0, pair.B[h])):
            raise ValueError(f"family row {h + 1} does not start at b{h + 1}")
        deriv = tuple(_at_zero_derivative(c, t).restrict(pair.chart) if t in c.chart else pair.chart.zero() for c in row)
        _, g = pair.split(deriv)
        values.append(tuple(g))
    return DeformationForm(pair, tuple(values))


def trivial_deformation_form(pair: FoliatedPair, a: Sequence[Poly]) -> DeformationForm:
    """-d''(pr_C a): the value on b_h is -#b_h(g^s) e_s where pr_C a = g^s w_s."""
    from .cohomology import BigradedComplex

    cx = BigradedComplex(pair)
    _, g = pair.split(a)
    values = []
    for h in range(pair.p):
        values.append(tuple(-cx.dpp_function(gs)[h] for gs in g))
    return DeformationForm(pair, tuple(values))


def exp_action(A: LieAlgebroid, a: Sequence[Poly], s: Sequence[Poly], t: Poly, max_order: int = 12) -> Section:
    """exp(t ad_a) s as a finite series; ad_a must be nilpotent on s."""
    from fractions import Fraction

    term = tuple(s)
    total = term
    fact = Fraction(1)
    power = t.chart.one()
    for order in range(1, max_order + 1):
        term = A.bracket(tuple(a), term)
        if all(c.is_zero() for c in term):
            return total
        fact *= order
        power = power * t
        total = tuple(x + c * power * (1 / fact) for x, c in zip(total, term))
    raise ValueError(f"ad_a is not nilpotent on the section within {max_order} steps")


def check_family_closed(pair: FoliatedPair, rows: Sequence[Sequence[Poly]]) -> Report:
    """B_t = span(rows) closed under brackets, as an identity in t."""
    report = Report("deformation family closure")
    chart = pair.chart
    for row in rows:
        for c in row:
            chart = common_chart(chart, c.chart)
    rows = [[c.on(chart) for c in row] for row in rows]
    solver = SpanSolver.build(rows, chart)
    statuses, res = [], []
    for h, k in combinations(range(len(rows)), 2):
        st = solver.solve(pair.A.bracket(tuple(rows[h]), tuple(rows[k]))).status
        statuses.append(st)
        if st is not Membership.YES:
            res.append(f"[b{h + 1}(t), b{k + 1}(t)]: {st.value}")
    report.add("family-closed", "each B_t is closed under the bracket", _verdict(statuses), res)
    return report
