"""Courant algebroids, their foliations, quotients and reductions.

A Courant algebroid is stored on a frame e_1..e_r by the metric
g_hk = g(e_h, e_k), the anchor rows #e_h (components over ``coords``) and
the skew structure functions [e_h, e_k] = c^l_hk e_l.  Brackets of
arbitrary sections follow from skew symmetry and the Leibniz rule

    [e1, f e2] = f [e1, e2] + ((#e1) f) e2 - g(e1, e2) Df,
    Df = 1/2 g^{-1}(t#(df)),

which gives, for a = a^h e_h and b = b^k e_k,

    [a, b] = a^h b^k c_hk + (#a)(b^k) e_k - (#b)(a^h) e_h
             - g_hk (a^h D b^k - b^k D a^h).

The standard structure on TM + T*M uses the frame (d/dx^i, dx^i) with
g = 1/2 of the natural pairing, anchor the projection to TM, and zero
structure functions; a twist by a closed 3-form Phi adds
i(X2) i(X1) Phi = Phi(X1, X2, .) to the form part.

A transversal-Courant algebroid is the same data with ``coords`` the
transverse coordinates: coefficients must be foliated and the axioms are
tested on foliated sections and functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from typing import Callable, Mapping, Sequence

from .algebroid import LieAlgebroid
from .linalg import Membership, SpanSolver, determinant, generic_rank, poly_inverse
from .report import Report, Verdict
from .ring import BASE_TAGS, Chart, DiffForm, Poly, apply_field, common_chart, field_bracket

Section = tuple[Poly, ...]
HALF = Fraction(1, 2)


class CourantError(ValueError):
    """Invalid Courant data."""


class SplittingError(CourantError):
    """The supplied splitting (S, B') is not admissible."""


class ReductionError(CourantError):
    """The reduction hypothesis fails on the chosen submanifold."""


def _fmt(labels: Sequence[str], s: Sequence[Poly]) -> str:
    parts = []
    for lab, c in zip(labels, s):
        if c.is_zero():
            continue
        text = str(c)
        if text == "1":
            parts.append(lab)
        elif text == "-1":
            parts.append(f"-{lab}")
        else:
            parts.append(f"({text})*{lab}")
    return " + ".join(parts) or "0"


@dataclass(frozen=True, eq=False)
class CourantAlgebroid:
    chart: Chart
    rank: int
    metric: tuple[tuple[Poly, ...], ...]
    anchor: tuple[tuple[Poly, ...], ...]
    structure: Mapping[tuple[int, int], Section]
    labels: tuple[str, ...] = ()
    coords: tuple[str, ...] = ()
    bracket_fn: Callable[[Section, Section], Sequence[Poly]] | None = None
    metric_inverse: tuple[tuple[Poly, ...], ...] = field(default=(), repr=False)

    def __post_init__(self):
        chart, r = self.chart, self.rank
        coords = tuple(self.coords) or chart.base
        object.__setattr__(self, "coords", coords)
        if len(self.metric) != r or any(len(row) != r for row in self.metric):
            raise CourantError(f"metric must be {r}x{r}")
        g = tuple(tuple(c.on(chart) for c in row) for row in self.metric)
        for h, k in combinations(range(r), 2):
            if g[h][k] != g[k][h]:
                raise CourantError(f"metric is not symmetric at ({h + 1},{k + 1})")
        object.__setattr__(self, "metric", g)
        if len(self.anchor) != r or any(len(row) != len(coords) for row in self.anchor):
            raise CourantError(f"anchor must be {r}x{len(coords)}")
        object.__setattr__(self, "anchor", tuple(tuple(c.on(chart) for c in row) for row in self.anchor))
        structure = {}
        for (h, k), vec in self.structure.items():
            if not (0 <= h < r and 0 <= k < r) or h == k:
                raise CourantError(f"invalid structure index ({h + 1},{k + 1})")
            if len(vec) != r:
                raise CourantError(f"structure vector for ({h + 1},{k + 1}) must have {r} entries")
            vec = tuple(c.on(chart) for c in vec)
            if h > k:
                h, k, vec = k, h, tuple(-c for c in vec)
            if (h, k) in structure:
                raise CourantError(f"structure for ({h + 1},{k + 1}) given twice")
            if any(not c.is_zero() for c in vec):
                structure[(h, k)] = vec
        object.__setattr__(self, "structure", structure)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(r)))
        if r:
            if determinant([list(row) for row in g], chart).is_zero():
                raise CourantError("metric is degenerate")
            inv = poly_inverse([list(row) for row in g], chart)
            if inv is None:
                raise CourantError("metric inverse is not polynomial")
            object.__setattr__(self, "metric_inverse", tuple(tuple(row) for row in inv))

    # basic operations

    def zero_section(self) -> Section:
        return tuple(self.chart.zero() for _ in range(self.rank))

    def basis(self, h: int) -> Section:
        return tuple(self.chart.one() if i == h else self.chart.zero() for i in range(self.rank))

    def section(self, *texts: str) -> Section:
        if len(texts) != self.rank:
            raise CourantError(f"a section needs {self.rank} components")
        return tuple(self.chart.poly(t) for t in texts)

    def fmt(self, s: Sequence[Poly]) -> str:
        return _fmt(self.labels, s)

    def struct(self, h: int, k: int) -> Section:
        if h == k:
            return self.zero_section()
        if h < k:
            return self.structure.get((h, k), self.zero_section())
        return tuple(-c for c in self.structure.get((k, h), self.zero_section()))

    def g(self, a: Sequence[Poly], b: Sequence[Poly]) -> Poly:
        out = self.chart.zero()
        for h in range(self.rank):
            if a[h].is_zero():
                continue
            for k in range(self.rank):
                if not b[k].is_zero() and not self.metric[h][k].is_zero():
                    out = out + a[h] * b[k] * self.metric[h][k]
        return out

    def anchor_apply(self, s: Sequence[Poly]) -> tuple[Poly, ...]:
        out = [self.chart.zero() for _ in self.coords]
        for h, c in enumerate(s):
            if c.is_zero():
                continue
            for i, rho in enumerate(self.anchor[h]):
                if not rho.is_zero():
                    out[i] = out[i] + c * rho
        return tuple(out)

    def act(self, s: Sequence[Poly], f: Poly) -> Poly:
        return apply_field(self.anchor_apply(s), self.coords, f.on(self.chart))

    def partial(self, f: Poly) -> Section:
        """Df = 1/2 g^{-1}(t#(df))."""
        f = f.on(self.chart)
        v = [apply_field(self.anchor[h], self.coords, f) for h in range(self.rank)]
        out = []
        for l in range(self.rank):
            acc = self.chart.zero()
            for h in range(self.rank):
                if not v[h].is_zero() and not self.metric_inverse[l][h].is_zero():
                    acc = acc + self.metric_inverse[l][h] * v[h]
            out.append(acc * HALF)
        return tuple(out)

    def bracket(self, a: Sequence[Poly], b: Sequence[Poly]) -> Section:
        chart, r = self.chart, self.rank
        a = tuple(c.on(chart) for c in a)
        b = tuple(c.on(chart) for c in b)
        if self.bracket_fn is not None:
            return tuple(c.on(chart) for c in self.bracket_fn(a, b))
        out = [chart.zero() for _ in range(r)]
        for h in range(r):
            if a[h].is_zero():
                continue
            for k in range(r):
                if b[k].is_zero() or h == k:
                    continue
                coef = a[h] * b[k]
                for l, c in enumerate(self.struct(h, k)):
                    if not c.is_zero():
                        out[l] = out[l] + coef * c
        Xa, Xb = self.anchor_apply(a), self.anchor_apply(b)
        for k in range(r):
            out[k] = out[k] + apply_field(Xa, self.coords, b[k]) - apply_field(Xb, self.coords, a[k])
        da = [self.partial(c) if not c.is_zero() else None for c in a]
        db = [self.partial(c) if not c.is_zero() else None for c in b]
        for h in range(r):
            for k in range(r):
                ghk = self.metric[h][k]
                if ghk.is_zero():
                    continue
                if db[k] is not None and not a[h].is_zero():
                    w = ghk * a[h]
                    out = [o - w * d for o, d in zip(out, db[k])]
                if da[h] is not None and not b[k].is_zero():
                    w = ghk * b[k]
                    out = [o + w * d for o, d in zip(out, da[h])]
        return tuple(out)

    def field_bracket(self, X: Sequence[Poly], Y: Sequence[Poly]) -> tuple[Poly, ...]:
        return field_bracket(X, Y, self.coords)


def _add(a: Sequence[Poly], b: Sequence[Poly]) -> Section:
    return tuple(x + y for x, y in zip(a, b))


def _sub(a: Sequence[Poly], b: Sequence[Poly]) -> Section:
    return tuple(x - y for x, y in zip(a, b))


def _scale(f: Poly, a: Sequence[Poly]) -> Section:
    return tuple(f * x for x in a)


def _combo(coeffs: Sequence[Poly], rows: Sequence[Sequence[Poly]], chart: Chart, r: int) -> Section:
    out = [chart.zero() for _ in range(r)]
    for c, row in zip(coeffs, rows):
        if c.is_zero():
            continue
        for i, x in enumerate(row):
            if not x.is_zero():
                out[i] = out[i] + c * x
    return tuple(out)


# ---------------------------------------------------------------------------
# the standard structure on TM + T*M


def _standard_labels(coords: Sequence[str]) -> tuple[str, ...]:
    return tuple(f"d/d{x}" for x in coords) + tuple(f"d{x}" for x in coords)


def _check_base_chart(chart: Chart):
    if any(t not in BASE_TAGS for t in chart.tags):
        raise CourantError("the standard Courant algebroid is built over a chart of base coordinates")


def standard_courant(chart: Chart, phi: DiffForm | None = None, require_closed: bool = True) -> CourantAlgebroid:
    """TM + T*M on the frame (d/dx^i, dx^i), optionally twisted by a 3-form."""
    _check_base_chart(chart)
    m = len(chart.variables)
    z, half = chart.zero(), chart.const(HALF)
    metric = [[z] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        metric[i][m + i] = half
        metric[m + i][i] = half
    anchor = [tuple(chart.one() if j == i else z for j in range(m)) for i in range(m)]
    anchor += [tuple(z for _ in range(m)) for _ in range(m)]
    structure = {}
    if phi is not None:
        if phi.degree != 3:
            raise CourantError("the twisting form must have degree 3")
        if require_closed and not phi.d().is_zero():
            raise CourantError("the twisting 3-form is not closed")
        phi = DiffForm(common_chart(chart, phi.chart), 3, phi.coeffs)
        for i, j in combinations(range(m), 2):
            vec = [z] * (2 * m)
            for k in range(m):
                vec[m + k] = phi[(i, j, k)].on(chart)
            if any(not c.is_zero() for c in vec):
                structure[(i, j)] = tuple(vec)
    return CourantAlgebroid(chart, 2 * m, tuple(map(tuple, metric)), tuple(anchor), structure, _standard_labels(chart.variables))


def twisted_standard_courant(chart: Chart, phi: DiffForm) -> CourantAlgebroid:
    return standard_courant(chart, phi, require_closed=True)


def big_bracket(
    chart: Chart,
    s1: Sequence[Poly],
    s2: Sequence[Poly],
    phi: DiffForm | None = None,
    exact_term: bool = True,
) -> Section:
    """Bracket of (X1, a1), (X2, a2) computed with Lie derivatives and contractions.

    ([X1, X2], L_X1 a2 - L_X2 a1 + 1/2 d(a1(X2) - a2(X1)) + i(X2) i(X1) Phi);
    ``exact_term=False`` drops the 1/2 d(...) term.
    """
    coords = chart.variables
    m = len(coords)
    X1, X2 = [c.on(chart) for c in s1[:m]], [c.on(chart) for c in s2[:m]]
    a1 = DiffForm.one_form(chart, [c.on(chart) for c in s1[m:]])
    a2 = DiffForm.one_form(chart, [c.on(chart) for c in s2[m:]])
    X = field_bracket(X1, X2, coords)
    form = a2.lie(X1) - a1.lie(X2)
    if exact_term:
        pairing = a1.interior(X2)[()] - a2.interior(X1)[()]
        form = form + DiffForm.function(pairing).d() * HALF
    if phi is not None:
        phi = DiffForm(chart, 3, {k: c.on(chart) for k, c in phi.coeffs.items()})
        form = form + phi.interior(X1).interior(X2)
    return tuple(X) + form.components()


def standard_without_exact_term(chart: Chart) -> CourantAlgebroid:
    """Standard metric and anchor with the 1/2 d(...) term removed from the bracket."""
    A = standard_courant(chart)
    return CourantAlgebroid(
        chart, A.rank, A.metric, A.anchor, {}, A.labels, A.coords,
        bracket_fn=lambda a, b: big_bracket(chart, a, b, exact_term=False),
    )


# ---------------------------------------------------------------------------
# axioms


def _probes(A: CourantAlgebroid) -> tuple[list[Section], list[Section]]:
    basis = [A.basis(h) for h in range(A.rank)]
    multiples = [_scale(A.chart.var(x), e) for x in A.coords for e in basis]
    return basis, multiples


def _probe_functions(A: CourantAlgebroid) -> list[Poly]:
    funcs = [A.chart.var(x) for x in A.coords]
    funcs += [A.chart.var(x) * A.chart.var(y) for x, y in combinations_with_replacement(A.coords, 2)]
    return funcs


def _nonzero(labels: Sequence[str], s: Sequence[Poly]) -> bool:
    return any(not c.is_zero() for c in s)


def check_courant(A: CourantAlgebroid) -> Report:
    """The five Courant conditions on basis sections and coordinate multiples of them."""
    report = Report("Courant algebroid conditions")
    report.data.update({"rank": str(A.rank), "coordinates": ", ".join(A.coords) or "-"})
    report.data["probes"] = "sections e_h and x_i e_h, functions x_i and x_i x_j"
    basis, multiples = _probes(A)
    probes = basis + multiples
    chart, r, coords = A.chart, A.rank, A.coords

    def name(s):
        return A.fmt(s)

    # 1) anchor is a bracket morphism
    res = []
    for i, j in combinations(range(len(probes)), 2):
        a, b = probes[i], probes[j]
        lhs = A.anchor_apply(A.bracket(a, b))
        rhs = A.field_bracket(A.anchor_apply(a), A.anchor_apply(b))
        diff = _sub(lhs, rhs)
        if _nonzero(coords, diff):
            res.append(f"#[{name(a)}, {name(b)}] - [#, #] = " + _fmt([f"d/d{x}" for x in coords], diff))
    report.expect_zero("anchor-morphism", "anchor intertwines brackets", res)

    # 2) im(#_g t#) in ker #, as a matrix identity and through D
    res = []
    for a_idx, xa in enumerate(coords):
        for b_idx, xb in enumerate(coords):
            val = chart.zero()
            for l in range(r):
                for h in range(r):
                    gi = A.metric_inverse[l][h]
                    if gi.is_zero():
                        continue
                    val = val + A.anchor[l][b_idx] * gi * A.anchor[h][a_idx]
            if not val.is_zero():
                res.append(f"(# g^-1 t#)[{xb}][{xa}] = {val}")
    report.expect_zero("anchor-coisotropic", "image of the metric dual of the transposed anchor lies in the kernel of the anchor", res)
    res = []
    for xa, xb in combinations_with_replacement(coords, 2):
        val = A.g(A.partial(chart.var(xa)), A.partial(chart.var(xb)))
        if not val.is_zero():
            res.append(f"g(D{xa}, D{xb}) = {val}")
    report.expect_zero("partial-isotropic", "g(Df1, Df2) = 0", res)

    # 3) Jacobiator equals 1/3 D of the cyclic sum of g([e1,e2],e3)
    res = []
    triples = [tuple(basis[i] for i in t) for t in combinations(range(r), 3)]
    triples += [(m, basis[k], basis[l]) for m in multiples for k, l in combinations(range(r), 2)]
    for e1, e2, e3 in triples:
        cyc = [(e1, e2, e3), (e2, e3, e1), (e3, e1, e2)]
        jac = A.zero_section()
        T = chart.zero()
        for x, y, w in cyc:
            xy = A.bracket(x, y)
            jac = _add(jac, A.bracket(xy, w))
            T = T + A.g(xy, w)
        diff = _sub(jac, _scale(chart.const(Fraction(1, 3)), A.partial(T)))
        if _nonzero(A.labels, diff):
            res.append(f"({name(e1)}, {name(e2)}, {name(e3)}): {name(diff)}")
    report.expect_zero("jacobiator", "cyclic sum of double brackets equals one third of D of the cyclic metric sum", res)

    # 4) Leibniz rule
    res = []
    for e1 in probes:
        for e2 in basis:
            for f in _probe_functions(A):
                lhs = A.bracket(e1, _scale(f, e2))
                rhs = _add(_scale(f, A.bracket(e1, e2)), _scale(A.act(e1, f), e2))
                rhs = _sub(rhs, _scale(A.g(e1, e2), A.partial(f)))
                diff = _sub(lhs, rhs)
                if _nonzero(A.labels, diff):
                    res.append(f"[{name(e1)}, ({f})*{name(e2)}]: {name(diff)}")
    report.expect_zero("leibniz", "Leibniz rule with the metric correction", res)

    # 5) invariance of the metric
    res = []
    triples = [(e, e1, e2) for e in probes for e1, e2 in combinations_with_replacement(basis, 2)]
    triples += [(e, m, e2) for e in basis for m in multiples for e2 in basis]
    for e, e1, e2 in triples:
        lhs = A.act(e, A.g(e1, e2))
        t1 = _add(A.bracket(e, e1), A.partial(A.g(e, e1)))
        t2 = _add(A.bracket(e, e2), A.partial(A.g(e, e2)))
        diff = lhs - A.g(t1, e2) - A.g(e1, t2)
        if not diff.is_zero():
            res.append(f"({name(e)}; {name(e1)}, {name(e2)}): {diff}")
    report.expect_zero("metric-invariance", "anchor derivative of the metric matches the bracket", res)
    return report


# ---------------------------------------------------------------------------
# Dirac structures


def _solver(rows: Sequence[Sequence[Poly]], chart: Chart) -> SpanSolver:
    return SpanSolver.build([list(r) for r in rows], chart)


def _verdict(statuses: Sequence[Membership]) -> Verdict:
    if any(s is Membership.NO for s in statuses):
        return Verdict.FAIL
    if any(s is Membership.INDETERMINATE for s in statuses):
        return Verdict.INDETERMINATE
    return Verdict.PASS


def _membership_check(report, id, label, items, solver):
    statuses, res = [], []
    for text, v in items:
        if not any(not c.is_zero() for c in v):
            statuses.append(Membership.YES)
            continue
        st = solver.solve(v).status if solver is not None else Membership.NO
        statuses.append(st)
        if st is not Membership.YES:
            res.append(f"{text}: {st.value}")
    report.add(id, label, _verdict(statuses), res)


def check_dirac(A: CourantAlgebroid, D: Sequence[Sequence[Poly]]) -> Report:
    chart = A.chart
    D = [tuple(c.on(chart) for c in row) for row in D]
    m = len(A.coords)
    report = Report("Dirac structure")
    rank = generic_rank([list(d) for d in D], chart) if D else 0
    report.add("rank", "rank equals the dimension of the base", rank == m and len(D) == m,
               [] if rank == m and len(D) == m else [f"{len(D)} rows of generic rank {rank}, base dimension {m}"])
    res = []
    for i, j in combinations_with_replacement(range(len(D)), 2):
        val = A.g(D[i], D[j])
        if not val.is_zero():
            res.append(f"g(d{i + 1}, d{j + 1}) = {val}")
    report.expect_zero("isotropic", "D is isotropic", res)
    solver = _solver(D, chart) if D else None
    items = [(f"[d{i + 1}, d{j + 1}] = {A.fmt(A.bracket(D[i], D[j]))}", A.bracket(D[i], D[j]))
             for i, j in combinations(range(len(D)), 2)]
    _membership_check(report, "closed", "D is closed under the bracket", items, solver)
    idx = [A.coords.index(x) for x in chart.transverse if x in A.coords]
    along_leaves = all(A.anchor_apply(d)[i].is_zero() for d in D for i in idx)
    if chart.leaf and along_leaves:
        fol = CourantFoliation(A, tuple(D), ())
        report.merge(check_courant_foliation(fol), "foliation:")
        report.data["quotient rank"] = "0"
    else:
        reason = "chart declares no leaf coordinates" if not chart.leaf else "anchor of D has transverse components"
        report.not_applicable("foliation", "D is a foliation with zero quotient", reason)
    return report


def dirac_lie_algebroid(A: CourantAlgebroid, D: Sequence[Sequence[Poly]], labels: Sequence[str] = ()) -> LieAlgebroid:
    """The Lie algebroid carried by a Dirac structure: restricted anchor and bracket."""
    chart = A.chart
    D = [tuple(c.on(chart) for c in row) for row in D]
    solver = _solver(D, chart)
    structure = {}
    for i, j in combinations(range(len(D)), 2):
        res = solver.solve(A.bracket(D[i], D[j]))
        if res.status is not Membership.YES:
            raise CourantError(f"[d{i + 1}, d{j + 1}] is not a polynomial combination of D ({res.status.value})")
        structure[(i, j)] = tuple(res.coefficients)
    anchor = tuple(A.anchor_apply(d) for d in D)
    return LieAlgebroid(chart, len(D), anchor, structure, tuple(labels))


# ---------------------------------------------------------------------------
# foliations of Courant algebroids


@dataclass(frozen=True, eq=False)
class CourantFoliation:
    """B isotropic, C = B^perp spanned by B together with the witness rows.

    ``S`` and ``Bp`` are an optional splitting A = B + S + B', B + S = C.
    """

    A: CourantAlgebroid
    B: tuple[Section, ...]
    witness: tuple[Section, ...]
    S: tuple[Section, ...] | None = None
    Bp: tuple[Section, ...] | None = None

    def __post_init__(self):
        chart, r = self.A.chart, self.A.rank

        def norm(rows, name):
            out = tuple(tuple(c.on(chart) for c in row) for row in rows)
            for row in out:
                if len(row) != r:
                    raise CourantError(f"{name} row has {len(row)} entries, rank is {r}")
            return out

        object.__setattr__(self, "B", norm(self.B, "B"))
        object.__setattr__(self, "witness", norm(self.witness, "witness"))
        if self.S is not None:
            object.__setattr__(self, "S", norm(self.S, "S"))
        if self.Bp is not None:
            object.__setattr__(self, "Bp", norm(self.Bp, "B'"))

    @property
    def chart(self) -> Chart:
        return self.A.chart

    @property
    def p(self) -> int:
        return len(self.B)

    @property
    def q(self) -> int:
        return len(self.witness)

    @property
    def C(self) -> tuple[Section, ...]:
        return self.B + self.witness

    def with_splitting(self, S, Bp=None) -> CourantFoliation:
        return CourantFoliation(self.A, self.B, self.witness, tuple(S), None if Bp is None else tuple(Bp))


def _b_foliated_items(fol: CourantFoliation, c: Section, cname: str) -> list[tuple[str, Section]]:
    A = fol.A
    return [(f"[b{h + 1}, {cname}]", A.bracket(b, c)) for h, b in enumerate(fol.B)]


def check_courant_foliation(fol: CourantFoliation) -> Report:
    A, chart = fol.A, fol.chart
    r, p, q = A.rank, fol.p, fol.q
    report = Report("foliation of a Courant algebroid")
    report.data.update({"rank A": str(r), "rank B": str(p), "rank C/B": str(q)})

    rank_B = generic_rank([list(b) for b in fol.B], chart) if fol.B else 0
    report.add("B-rank", "B rows are pointwise independent", rank_B == p, [] if rank_B == p else [f"generic rank {rank_B} < {p}"])
    if rank_B < p:
        return report

    res = []
    for h, k in combinations_with_replacement(range(p), 2):
        val = A.g(fol.B[h], fol.B[k])
        if not val.is_zero():
            res.append(f"g(b{h + 1}, b{k + 1}) = {val}")
    report.expect_zero("B-isotropic", "B is isotropic", res)

    b_solver = _solver(fol.B, chart) if fol.B else None
    items = [(f"[b{h + 1}, b{k + 1}] = {A.fmt(A.bracket(fol.B[h], fol.B[k]))}", A.bracket(fol.B[h], fol.B[k]))
             for h, k in combinations(range(p), 2)]
    _membership_check(report, "B-closed", "B is closed under the bracket", items, b_solver)

    c_rows = fol.C
    c_solver = _solver(c_rows, chart) if c_rows else None
    items = []
    for h, b in enumerate(fol.B):
        for s, w in enumerate(fol.witness):
            items.append((f"[b{h + 1}, w{s + 1}]", A.bracket(b, w)))
    _membership_check(report, "B-bracket-in-C", "brackets of B with C stay in C", items, c_solver)

    res = []
    idx = {name: i for i, name in enumerate(A.coords)}
    for h, b in enumerate(fol.B):
        image = A.anchor_apply(b)
        for x in chart.transverse:
            if x in idx and not image[idx[x]].is_zero():
                res.append(f"#b{h + 1} d/d{x}: {image[idx[x]]}")
    leaf_block = [[A.anchor_apply(b)[idx[y]] for y in chart.leaf] for b in fol.B]
    n = len(chart.leaf)
    lrank = generic_rank(leaf_block, chart) if leaf_block and n else 0
    if lrank != n:
        res.append(f"generic rank of leaf anchor block is {lrank}, leaves have dimension {n}")
    report.expect_zero("anchor-onto-leaves", "anchor maps B onto the leaf tangent bundle", res)

    res = []
    for h, b in enumerate(fol.B):
        for s, w in enumerate(fol.witness):
            val = A.g(b, w)
            if not val.is_zero():
                res.append(f"g(b{h + 1}, w{s + 1}) = {val}")
    rank_C = generic_rank([list(c) for c in c_rows], chart) if c_rows else 0
    if rank_C != r - p or len(c_rows) != r - p:
        res.append(f"B + witness has {len(c_rows)} rows of generic rank {rank_C}, the orthogonal of B has rank {r - p}")
    report.expect_zero("complement", "B and the witness span the orthogonal of B", res)

    items = []
    for s, w in enumerate(fol.witness):
        items += _b_foliated_items(fol, w, f"w{s + 1}")
    _membership_check(report, "foliated-generation", "witness sections are B-foliated", items, b_solver)

    res = []
    for s, t in combinations_with_replacement(range(q), 2):
        val = A.g(fol.witness[s], fol.witness[t])
        if not val.is_foliated():
            res.append(f"g(w{s + 1}, w{t + 1}) = {val}")
    report.expect_zero("foliated-metric", "metric on witness sections is foliated", res)

    items_c, items_b = [], []
    for s, t in combinations(range(q), 2):
        br = A.bracket(fol.witness[s], fol.witness[t])
        items_c.append((f"[w{s + 1}, w{t + 1}]", br))
        items_b += _b_foliated_items(fol, br, f"[w{s + 1}, w{t + 1}]")
    _membership_check(report, "witness-brackets-in-C", "brackets of witness sections lie in C", items_c, c_solver)
    _membership_check(report, "witness-brackets-foliated", "brackets of witness sections are B-foliated", items_b, b_solver)
    return report


# ---------------------------------------------------------------------------
# transversal-Courant algebroids


class TransversalCourant(CourantAlgebroid):
    """Courant data anchored in the normal bundle: ``coords`` are transverse coordinates."""

    def coefficients(self) -> list[tuple[str, Poly]]:
        out = []
        for h in range(self.rank):
            for k in range(h, self.rank):
                out.append((f"g({self.labels[h]}, {self.labels[k]})", self.metric[h][k]))
        for h in range(self.rank):
            for x, c in zip(self.coords, self.anchor[h]):
                out.append((f"#{self.labels[h]} d/d{x}", c))
        for (h, k), vec in sorted(self.structure.items()):
            for l, c in enumerate(vec):
                out.append((f"[{self.labels[h]}, {self.labels[k]}] {self.labels[l]}", c))
        return out


def transversal_courant(chart, rank, metric, anchor, structure, labels=()) -> TransversalCourant:
    return TransversalCourant(chart, rank, metric, anchor, structure, tuple(labels), chart.transverse)


def check_transversal_courant(E: TransversalCourant) -> Report:
    report = Report("transversal-Courant algebroid conditions")
    res = [f"{name} = {c}" for name, c in E.coefficients() if not c.is_foliated()]
    report.expect_zero("foliated-coefficients", "metric, anchor and structure functions are foliated", res)
    report.merge(check_courant(E))
    report.data["rank"] = str(E.rank)
    return report


def check_splitting(fol: CourantFoliation) -> Report:
    A, chart = fol.A, fol.chart
    S = fol.S if fol.S is not None else fol.witness
    report = Report("splitting of the orthogonal")
    c_solver = _solver(fol.C, chart) if fol.C else None
    _membership_check(report, "S-in-C", "S lies in the orthogonal of B", [(f"s{i + 1}", s) for i, s in enumerate(S)], c_solver)
    b_solver = _solver(fol.B, chart) if fol.B else None
    items = []
    for i, s in enumerate(S):
        items += _b_foliated_items(fol, s, f"s{i + 1}")
    _membership_check(report, "S-foliated", "S sections are B-foliated", items, b_solver)
    gS = [[A.g(a, b) for b in S] for a in S]
    det = determinant(gS, chart) if S else chart.one()
    report.add("S-nondegenerate", "metric is nondegenerate on S", not det.is_zero(), [] if not det.is_zero() else ["det g|S = 0"])
    rank = generic_rank([list(x) for x in fol.B + S], chart) if fol.B + S else 0
    ok = rank == fol.p + len(S) == A.rank - fol.p
    report.add("B-S-direct", "B and S span C", ok, [] if ok else [f"B + S has generic rank {rank}, C has rank {A.rank - fol.p}"])
    if fol.Bp is None:
        for id, label in (("Bp-isotropic", "B' is isotropic"), ("orthogonality", "B + B' is orthogonal to S"),
                          ("direct-sum", "B, S and B' span A")):
            report.not_applicable(id, label, "no complement B' supplied")
        return report
    Bp = fol.Bp
    res = []
    for i, j in combinations_with_replacement(range(len(Bp)), 2):
        val = A.g(Bp[i], Bp[j])
        if not val.is_zero():
            res.append(f"g(b'{i + 1}, b'{j + 1}) = {val}")
    report.expect_zero("Bp-isotropic", "B' is isotropic", res)
    res = []
    for rows, nm in ((fol.B, "b"), (Bp, "b'")):
        for i, x in enumerate(rows):
            for j, s in enumerate(S):
                val = A.g(x, s)
                if not val.is_zero():
                    res.append(f"g({nm}{i + 1}, s{j + 1}) = {val}")
    report.expect_zero("orthogonality", "B + B' is orthogonal to S", res)
    full = fol.B + S + Bp
    rank = generic_rank([list(x) for x in full], chart)
    ok = rank == A.rank == len(full)
    report.add("direct-sum", "B, S and B' span A", ok, [] if ok else [f"{len(full)} rows of generic rank {rank}, rank A is {A.rank}"])
    return report


def quotient_transversal_courant(fol: CourantFoliation) -> TransversalCourant:
    """C/B realised on S: g_S = g|S, anchor mod leaves, bracket pr_S [, ]_A."""
    split = check_splitting(fol)
    if not split.passed:
        bad = "; ".join(f"{c.id}: {', '.join(c.residuals) or c.verdict.value}" for c in split.checks
                        if c.verdict not in (Verdict.PASS, Verdict.NOT_APPLICABLE))
        raise SplittingError(f"splitting is not admissible: {bad}")
    A, chart = fol.A, fol.chart
    S = fol.S if fol.S is not None else fol.witness
    k = len(S)
    frame = fol.B + S + (fol.Bp or ())
    solver = _solver(frame, chart) if frame else None
    p = fol.p
    structure = {}
    for i, j in combinations(range(k), 2):
        br = A.bracket(S[i], S[j])
        if all(c.is_zero() for c in br):
            continue
        res = solver.solve(br)
        if res.status is not Membership.YES:
            raise CourantError(f"[s{i + 1}, s{j + 1}] does not decompose over the splitting ({res.status.value})")
        coeffs = res.coefficients
        structure[(i, j)] = tuple(coeffs[p:p + k])
    metric = tuple(tuple(A.g(a, b) for b in S) for a in S)
    idx = [A.coords.index(x) for x in chart.transverse]
    anchor = tuple(tuple(A.anchor_apply(s)[i] for i in idx) for s in S)
    return transversal_courant(chart, k, metric, anchor, structure, tuple(f"s{i + 1}" for i in range(k)))


def check_partial_compatible(fol: CourantFoliation, E: TransversalCourant) -> Report:
    """D_S f agrees with D_A f modulo B for transverse coordinate functions."""
    A, chart = fol.A, fol.chart
    S = fol.S if fol.S is not None else fol.witness
    report = Report("D on foliated functions")
    solver = _solver(fol.B, chart) if fol.B else None
    items = []
    for x in chart.transverse:
        f = chart.var(x)
        diff = _sub(A.partial(f), _combo(E.partial(f), S, chart, A.rank))
        items.append((f"D{x}", diff))
    _membership_check(report, "partial-compatible", "D of the quotient agrees with D of A modulo B", items, solver)
    return report


def transport_matrix(fol: CourantFoliation, S1: Sequence[Section], S2: Sequence[Section]) -> list[list[Poly]]:
    """T with s1_i = T_ij s2_j modulo B."""
    chart = fol.chart
    solver = _solver(fol.B + tuple(S2), chart)
    T = []
    for i, s in enumerate(S1):
        res = solver.solve(s)
        if res.status is not Membership.YES:
            raise SplittingError(f"s{i + 1} of the first splitting is not a combination of B and the second ({res.status.value})")
        T.append(list(res.coefficients[fol.p:]))
    return T


def compare_transversal(E1: TransversalCourant, E2: TransversalCourant, T: Sequence[Sequence[Poly]]) -> Report:
    """E1 and E2 agree under e1_i -> T_ij e2_j."""
    chart = common_chart(E1.chart, E2.chart)
    report = Report("transport between quotients")
    k = E1.rank
    if E2.rank != k:
        report.add("rank", "ranks agree", False, [f"{E1.rank} != {E2.rank}"])
        return report
    rows = [tuple(c.on(chart) for c in row) for row in T]
    res = []
    for i, j in combinations_with_replacement(range(k), 2):
        diff = E1.metric[i][j] - E2.g(rows[i], rows[j])
        if not diff.is_zero():
            res.append(f"g({E1.labels[i]}, {E1.labels[j]}): {diff}")
    report.expect_zero("metric-transport", "metrics agree", res)
    res = []
    for i in range(k):
        diff = _sub(E1.anchor[i], E2.anchor_apply(rows[i]))
        if any(not c.is_zero() for c in diff):
            res.append(f"#{E1.labels[i]}: {_fmt([f'd/d{x}' for x in E1.coords], diff)}")
    report.expect_zero("anchor-transport", "anchors agree", res)
    res = []
    for i, j in combinations(range(k), 2):
        lhs = _combo(E1.struct(i, j), rows, chart, k)
        rhs = E2.bracket(rows[i], rows[j])
        diff = _sub(lhs, rhs)
        if any(not c.is_zero() for c in diff):
            res.append(f"[{E1.labels[i]}, {E1.labels[j]}]: {E2.fmt(diff)}")
    report.expect_zero("bracket-transport", "brackets agree", res)
    return report


# ---------------------------------------------------------------------------
# exactness


def exactness_check(E: CourantAlgebroid) -> Report:
    report = Report("exactness of a transversal-Courant algebroid")
    chart, r, k = E.chart, E.rank, len(E.coords)
    rank_anchor = generic_rank([list(row) for row in E.anchor], chart) if r and k else 0
    transitive = rank_anchor == k
    report.add("transitive", "anchor is onto the normal bundle", transitive,
               [] if transitive else [f"anchor has generic rank {rank_anchor}, normal rank is {k}"])
    rank_eq = r == 2 * k
    report.add("rank-equation", "rank equals twice the normal rank", rank_eq,
               [] if rank_eq else [f"rank {r} != 2 * {k}"])
    if not (transitive and rank_eq):
        report.not_applicable("exact-sequence", "image of the metric dual of the transposed anchor is the kernel of the anchor",
                              "requires transitivity and the rank equation")
        return report
    # columns: #_(E,g)(dx^a) = g^-1 t#(dx^a)
    cols = []
    for a in range(k):
        col = []
        for l in range(r):
            acc = chart.zero()
            for h in range(r):
                if not E.metric_inverse[l][h].is_zero():
                    acc = acc + E.metric_inverse[l][h] * E.anchor[h][a]
            col.append(acc)
        cols.append(col)
    res = []
    for a in range(k):
        image = E.anchor_apply(cols[a])
        for b, c in enumerate(image):
            if not c.is_zero():
                res.append(f"# of the image of d{E.coords[a]} along d/d{E.coords[b]}: {c}")
    img_rank = generic_rank(cols, chart) if cols else 0
    if img_rank != r - k:
        res.append(f"image has generic rank {img_rank}, kernel of the anchor has rank {r - k}")
    report.expect_zero("exact-sequence", "image of the metric dual of the transposed anchor is the kernel of the anchor", res)
    return report


# ---------------------------------------------------------------------------
# reduction to a coordinate submanifold


def _restrict(p: Poly, removed: Sequence[str], N: Chart) -> Poly:
    return p.at_zero(removed).restrict(N)


def _restrict_section(s: Sequence[Poly], removed, N) -> Section:
    return tuple(_restrict(c, removed, N) for c in s)


def check_reduction_setting(fol: CourantFoliation, removed: Sequence[str], strict: bool = False) -> Report:
    """Clean intersection, the transversality flag, and the reduction hypothesis."""
    A, chart = fol.A, fol.chart
    report = Report("reduction setting")
    unknown = [x for x in removed if x not in A.coords]
    report.add("clean-intersection", "N is a coordinate subspace compatible with the leaf/transverse split",
               not unknown, [f"{x} is not a base coordinate" for x in unknown])
    transversal = all(chart.tag_of(x) == "leaf" for x in removed if x in chart)
    detail = ("N is transversal to the leaves" if transversal
              else "N removes transverse coordinates, so it is not transversal to the leaves")
    if strict:
        report.add("strict-transversality", "N is transversal to the leaves", transversal,
                   [] if transversal else [detail])
    else:
        report.not_applicable("strict-transversality", "N is transversal to the leaves", f"informational: {detail}")
    return report


def _hypothesis_violations(fol: CourantFoliation, removed: Sequence[str], N: Chart) -> list[str]:
    A = fol.A
    idx = {x: i for i, x in enumerate(A.coords)}
    out = []
    named = [(f"b{h + 1}", b) for h, b in enumerate(fol.B)] + [(f"w{s + 1}", w) for s, w in enumerate(fol.witness)]
    for label, c in named:
        image = A.anchor_apply(c)
        for x in removed:
            val = _restrict(image[idx[x]], removed, N)
            if not val.is_zero():
                out.append(f"anchor of C section {label} = {A.fmt(c)} has component {val} along d/d{x} on N")
    return out


def reduce_to_submanifold(fol: CourantFoliation, removed: Sequence[str], strict: bool = False) -> TransversalCourant:
    """E_N = C_N / B_N over N = {removed coordinates = 0} with the induced structure."""
    A, chart = fol.A, fol.chart
    removed = tuple(removed)
    setting = check_reduction_setting(fol, removed, strict)
    if not setting.passed:
        raise ReductionError("; ".join(r for c in setting.failures() for r in c.residuals))
    N = chart.drop(removed)
    bad = _hypothesis_violations(fol, removed, N)
    if bad:
        raise ReductionError("reduction hypothesis fails: " + "; ".join(bad))
    BN = [_restrict_section(b, removed, N) for b in fol.B]
    WN = [_restrict_section(w, removed, N) for w in fol.witness]
    frame = BN + WN
    if frame and generic_rank([list(x) for x in frame], N) != len(frame):
        raise ReductionError("B and the witness become dependent on N")
    solver = _solver(frame, N) if frame else None
    p, q = fol.p, fol.q
    structure = {}
    for s, t in combinations(range(q), 2):
        br = _restrict_section(A.bracket(fol.witness[s], fol.witness[t]), removed, N)
        if all(c.is_zero() for c in br):
            continue
        res = solver.solve(br)
        if res.status is not Membership.YES:
            raise ReductionError(f"[w{s + 1}, w{t + 1}] on N is not a combination of C_N ({res.status.value})")
        structure[(s, t)] = tuple(res.coefficients[p:])
    metric = tuple(tuple(_restrict(A.g(a, b), removed, N) for b in fol.witness) for a in fol.witness)
    idx = [A.coords.index(x) for x in N.transverse]
    anchor = tuple(tuple(_restrict(A.anchor_apply(w)[i], removed, N) for i in idx) for w in fol.witness)
    return transversal_courant(N, q, metric, anchor, structure, tuple(f"w{s + 1}" for s in range(q)))


def check_extension_independence(
    fol: CourantFoliation,
    removed: Sequence[str],
    c1: Sequence[Poly],
    c2: Sequence[Poly],
    c2_alt: Sequence[Poly],
) -> Report:
    """Brackets through two extensions of the same section of C_N agree modulo B_N."""
    A, chart = fol.A, fol.chart
    removed = tuple(removed)
    N = chart.drop(removed)
    report = Report("independence of the extension")
    c_solver = _solver(fol.C, chart)
    items = [("c1", tuple(c1)), ("c2", tuple(c2)), ("c2'", tuple(c2_alt))]
    _membership_check(report, "extensions-in-C", "extensions are sections of C", items, c_solver)
    diff = _sub(_restrict_section(c2, removed, N), _restrict_section(c2_alt, removed, N))
    report.expect_zero("extensions-agree", "both extensions restrict to the same section on N",
                       [] if all(c.is_zero() for c in diff) else [A.fmt(diff)])
    delta = _sub(_restrict_section(A.bracket(c1, c2), removed, N), _restrict_section(A.bracket(c1, c2_alt), removed, N))
    BN = [_restrict_section(b, removed, N) for b in fol.B]
    solver = _solver(BN, N) if BN else None
    _membership_check(report, "extension-independence", "brackets agree modulo B on N", [("difference", delta)], solver)
    report.data["difference"] = _fmt(A.labels, delta)
    return report
