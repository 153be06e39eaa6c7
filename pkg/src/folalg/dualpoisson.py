"""The fiber-linear Poisson structure on the dual of a Lie algebroid.

With fiber coordinates eta_h dual to the basis e_h, the dual bivector is

    Pi = 1/2 alpha^l_{hk} eta_l d/d eta_h ^ d/d eta_k + rho^a_h d/d eta_h ^ d/d x^a,

so {eta_h, eta_k} = alpha^l_{hk} eta_l and {eta_h, x^a} = rho^a_h.  Base
coordinates precede fiber coordinates in the chart, so the stored
coefficient on the sorted pair (x^a, eta_h) is -rho^a_h.

For a foliated pair the basis is split as (b_1..b_p, a_1..a_q) with fiber
coordinates (eta_1..eta_p, zeta_1..zeta_q) and the coefficient names

    #b_h = lambda^a_h d_a + beta^u_h d_u      #a_q = alpha^a_q d_a + alpha^u_q d_u
    [b_h, b_k] = beta^l_{hk} b_l + beta^s_{hk} a_s
    [b_h, a_q] = gamma^l_{hq} b_l + gamma^s_{hq} a_s
    [a_p, a_q] = alpha^l_{pq} b_l + alpha^s_{pq} a_s.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .algebroid import LieAlgebroid, check_lie_algebroid
from .foliation import FoliatedPair
from .linalg import generic_rank
from .report import Report
from .ring import Chart, Multivector, Poly, schouten

ETA = "eta"
ZETA = "zeta"


@dataclass(frozen=True, eq=False)
class DualPoissonManifold:
    algebroid: LieAlgebroid
    chart: Chart
    fiber: tuple[str, ...]
    bivector: Multivector

    def linear(self, s: Sequence[Poly]) -> Poly:
        """l_s = s^h eta_h, the fiber-linear function of a section."""
        out = self.chart.zero()
        for c, name in zip(s, self.fiber):
            out = out + c.on(self.chart) * self.chart.var(name)
        return out

    def bracket(self, f: Poly, g: Poly) -> Poly:
        return self.bivector.bracket_functions(f.on(self.chart), g.on(self.chart))


def _fiber_chart(A: LieAlgebroid, groups: Sequence[tuple[str, int]]) -> tuple[Chart, list[tuple[str, ...]]]:
    chart = A.chart
    names = []
    for stem, count in groups:
        fresh = chart.fresh(stem, count)
        chart = chart.extend(fresh, stem)
        names.append(fresh)
    return chart, names


def _bivector(A: LieAlgebroid, chart: Chart, fiber: Sequence[str]) -> Multivector:
    coeffs = {}
    etas = [chart.var(n) for n in fiber]
    idx = [chart.index(n) for n in fiber]
    for (h, k), vec in A.structure.items():
        val = chart.zero()
        for l, c in enumerate(vec):
            if not c.is_zero():
                val = val + c.on(chart) * etas[l]
        coeffs[(idx[h], idx[k])] = val
    for h in range(A.rank):
        for name, rho in zip(A.coords, A.anchor[h]):
            if not rho.is_zero():
                coeffs[(chart.index(name), idx[h])] = -rho.on(chart)
    return Multivector(chart, 2, coeffs)


def dual_poisson(A: LieAlgebroid) -> DualPoissonManifold:
    chart, (fiber,) = _fiber_chart(A, [(ETA, A.rank)])
    return DualPoissonManifold(A, chart, fiber, _bivector(A, chart, fiber))


def _residual_lines(M: Multivector) -> list[str]:
    out = []
    for idx, c in M.items():
        label = "^".join(f"d/d{M.chart.variables[i]}" for i in idx)
        out.append(f"{label}: {c}")
    return out


def check_poisson(M: DualPoissonManifold | Multivector) -> Report:
    P = M.bivector if isinstance(M, DualPoissonManifold) else M
    report = Report("Poisson condition")
    report.expect_zero("schouten-square", "[Pi, Pi] = 0", _residual_lines(schouten(P, P)))
    return report


# ---------------------------------------------------------------------------
# foliated pairs


@dataclass(frozen=True, eq=False)
class SplitData:
    """The split coefficients of a foliated pair in the frame (B rows, witness rows)."""

    pair: FoliatedPair
    algebroid: LieAlgebroid
    chart: Chart
    eta: tuple[str, ...]
    zeta: tuple[str, ...]

    @property
    def p(self) -> int:
        return self.pair.p

    @property
    def q(self) -> int:
        return self.pair.q

    def anchor_parts(self, i: int) -> tuple[list[Poly], list[Poly]]:
        base = self.algebroid.coords
        row = self.algebroid.anchor[i]
        tr = [row[base.index(x)] for x in self.pair.chart.transverse]
        lf = [row[base.index(y)] for y in self.pair.chart.leaf]
        return tr, lf

    def bracket_parts(self, i: int, j: int) -> tuple[tuple[Poly, ...], tuple[Poly, ...]]:
        vec = self.algebroid.struct(i, j)
        return vec[: self.p], vec[self.p:]


def split_data(pair: FoliatedPair) -> SplitData:
    labels = tuple(f"b{i + 1}" for i in range(pair.p)) + tuple(f"a{i + 1}" for i in range(pair.q))
    A = pair.A.rebase(pair.B + pair.witness, labels)
    chart, (eta, zeta) = _fiber_chart(A, [(ETA, pair.p), (ZETA, pair.q)])
    return SplitData(pair, A, chart, eta, zeta)


def coefficient_conditions(sd: SplitData) -> dict[str, list[str]]:
    """Polynomial conditions on the split coefficients; each list holds violations."""
    p, q = sd.p, sd.q
    pair = sd.pair
    out = {"beta-s": [], "gamma-s": [], "lambda": [], "alpha-a-foliated": [], "alpha-s-foliated": [], "leaf-rank": []}
    for h, k in combinations(range(p), 2):
        _, cpart = sd.bracket_parts(h, k)
        for s, c in enumerate(cpart):
            if not c.is_zero():
                out["beta-s"].append(f"beta^{s + 1}_({h + 1},{k + 1}) = {c}")
    for h in range(p):
        for qq in range(q):
            _, cpart = sd.bracket_parts(h, p + qq)
            for s, c in enumerate(cpart):
                if not c.is_zero():
                    out["gamma-s"].append(f"gamma^{s + 1}_({h + 1},{qq + 1}) = {c}")
    for h in range(p):
        tr, _ = sd.anchor_parts(h)
        for x, c in zip(pair.chart.transverse, tr):
            if not c.is_zero():
                out["lambda"].append(f"lambda^{x}_{h + 1} = {c}")
    for qq in range(q):
        tr, _ = sd.anchor_parts(p + qq)
        for x, c in zip(pair.chart.transverse, tr):
            if not c.is_foliated():
                out["alpha-a-foliated"].append(f"alpha^{x}_{qq + 1} = {c}")
    for a, b in combinations(range(q), 2):
        _, cpart = sd.bracket_parts(p + a, p + b)
        for s, c in enumerate(cpart):
            if not c.is_foliated():
                out["alpha-s-foliated"].append(f"alpha^{s + 1}_({a + 1},{b + 1}) = {c}")
    beta = [sd.anchor_parts(h)[1] for h in range(p)]
    rank = generic_rank(beta, pair.chart) if p and pair.n else 0
    if rank != pair.n:
        out["leaf-rank"].append(f"generic rank of beta^u_h is {rank}, leaves have dimension {pair.n}")
    return out


_CONDITION_LABELS = {
    "beta-s": "brackets of B sections have no C component",
    "gamma-s": "brackets of B with the witness have no C component",
    "lambda": "anchor of B has no transverse component",
    "alpha-a-foliated": "transverse anchor of the witness is foliated",
    "alpha-s-foliated": "C components of witness brackets are foliated",
    "leaf-rank": "leaf block of the anchor on B has full rank",
}


def _b_part_bivector(sd: SplitData) -> Multivector:
    """P = 1/2 beta^l_{hk} eta_l d_eta_h ^ d_eta_k + beta^u_h d_eta_h ^ d_y^u on (x, y, eta)."""
    chart = sd.pair.chart
    PB_chart = chart.extend(sd.eta, ETA)
    coeffs = {}
    eidx = [PB_chart.index(n) for n in sd.eta]
    for h, k in combinations(range(sd.p), 2):
        bpart, _ = sd.bracket_parts(h, k)
        val = PB_chart.zero()
        for l, c in enumerate(bpart):
            val = val + c.on(PB_chart) * PB_chart.var(sd.eta[l])
        coeffs[(eidx[h], eidx[k])] = val
    for h in range(sd.p):
        _, lf = sd.anchor_parts(h)
        for y, c in zip(chart.leaf, lf):
            if not c.is_zero():
                coeffs[(PB_chart.index(y), eidx[h])] = -c.on(PB_chart)
    return Multivector(PB_chart, 2, coeffs)


def _adapted(pair: FoliatedPair, report: Report) -> SplitData | None:
    """Split data, or None after recording why the adapted frame is unusable."""
    try:
        return split_data(pair)
    except ValueError as exc:
        report.add("adapted-frame", "B and the witness form a polynomial frame", False, [str(exc)])
        return None


def check_foliated_dual(pair: FoliatedPair) -> Report:
    report = Report("dual Poisson structure of a foliated pair")
    sd = _adapted(pair, report)
    if sd is None:
        return report
    chart = sd.chart
    Lam = _bivector(sd.algebroid, chart, sd.eta + sd.zeta)
    report.data["Lambda"] = str(Lam)

    conds = coefficient_conditions(sd)
    for key, label in _CONDITION_LABELS.items():
        report.expect_zero(f"coeff-{key}", label, conds[key])

    report.expect_zero("lambda-poisson", "[Lambda, Lambda] = 0", _residual_lines(schouten(Lam, Lam)))

    # property 1: i(d eta_h) Lambda at eta = 0 spans the leaf directions of the covering foliation
    coords = chart.variables
    prop1 = []
    ymat = []
    for h, name in enumerate(sd.eta):
        eta_h = chart.var(name)
        row = []
        for z in coords:
            val = Lam.bracket_functions(eta_h, chart.var(z)).at_zero(sd.eta)
            if z in pair.chart.leaf:
                row.append(val)
            elif not val.is_zero():
                prop1.append(f"i(d{name})Lambda along d/d{z} at eta=0: {val}")
        ymat.append(row)
    rank = generic_rank(ymat, chart) if ymat and pair.n else 0
    if rank != pair.n:
        prop1.append(f"leaf components have generic rank {rank}, leaves have dimension {pair.n}")
    report.expect_zero("anchor-of-annihilator", "Lambda maps the conormal of the subbundle onto the covering foliation", prop1)

    # property 2: restricted brackets of (x, zeta) at eta = 0 are foliated functions of (x, zeta)
    prop2 = []
    gens = list(pair.chart.transverse) + list(sd.zeta)
    for g1, g2 in combinations(gens, 2):
        val = Lam.bracket_functions(chart.var(g1), chart.var(g2)).at_zero(sd.eta)
        if val.depends_on(pair.chart.leaf):
            prop2.append(f"{{{g1}, {g2}}} at eta=0 = {val} depends on leaf coordinates")
    for qq, z in enumerate(sd.zeta):
        for a, x in enumerate(pair.chart.transverse):
            val = Lam.bracket_functions(chart.var(z), chart.var(x)).at_zero(sd.eta)
            expected = sd.anchor_parts(sd.p + qq)[0][a].on(chart)
            if not (val - expected).is_zero():
                prop2.append(f"{{{z}, {x}}} differs from the transverse anchor: {val - expected}")
    report.expect_zero("restricted-brackets", "brackets restricted to the annihilator are foliated", prop2)

    # property 3: projection to (x, y, eta) is a Poisson map onto P
    P = _b_part_bivector(sd)
    prop3 = _residual_lines(schouten(P, P))
    pgens = list(pair.chart.variables) + list(sd.eta)
    for g1, g2 in combinations(pgens, 2):
        lhs = Lam.bracket_functions(chart.var(g1), chart.var(g2))
        rhs = P.bracket_functions(P.chart.var(g1), P.chart.var(g2)).on(chart)
        if not (lhs - rhs).is_zero():
            prop3.append(f"{{{g1}, {g2}}}: Lambda gives {lhs}, P gives {rhs}")
    report.expect_zero("projection-poisson", "projection to the quotient by the annihilator is Poisson", prop3)
    report.data["P"] = str(P)
    return report


# ---------------------------------------------------------------------------
# the odd vector field


@dataclass(frozen=True, eq=False)
class OddField:
    """Degree-1 odd vector field on the parity-changed dual.

    ``terms[target]`` maps a sorted tuple of odd indices to a coefficient;
    odd indices 0..p-1 are eta-bar, p..p+q-1 are zeta-bar.  Targets are
    base coordinate names or odd indices.
    """

    p: int
    q: int
    terms: dict

    def component(self, target) -> dict:
        return self.terms.get(target, {})

    def restricted(self) -> OddField:
        """Set zeta-bar = 0."""
        new = {}
        for target, comp in self.terms.items():
            kept = {m: c for m, c in comp.items() if all(i < self.p for i in m)}
            if kept:
                new[target] = kept
        return OddField(self.p, self.q, new)

    def __str__(self):
        def oname(i):
            return f"etabar{i + 1}" if i < self.p else f"zetabar{i - self.p + 1}"

        parts = []
        for target in sorted(self.terms, key=lambda t: (isinstance(t, int), str(t))):
            tname = oname(target) if isinstance(target, int) else target
            for m, c in sorted(self.terms[target].items()):
                mono = "*".join(oname(i) for i in m)
                parts.append(f"({c})*{mono}*d/d{tname}")
        return " + ".join(parts) or "0"


def odd_field(sd: SplitData) -> OddField:
    A = sd.algebroid
    terms: dict = {}

    def add(target, mono, c):
        if c.is_zero():
            return
        comp = terms.setdefault(target, {})
        val = comp.get(mono)
        val = c if val is None else val + c
        if val.is_zero():
            comp.pop(mono, None)
        else:
            comp[mono] = val

    for (h, k), vec in A.structure.items():
        for l, c in enumerate(vec):
            add(l, (h, k), c)
    for h in range(A.rank):
        for name, c in zip(A.coords, A.anchor[h]):
            add(name, (h,), c)
    return OddField(sd.p, sd.q, terms)


def vaintrob_conditions(pair: FoliatedPair) -> Report:
    report = Report("odd vector field conditions")
    sd = _adapted(pair, report)
    if sd is None:
        return report
    W = odd_field(sd)
    p, q = sd.p, sd.q
    transverse, leaf = pair.chart.transverse, pair.chart.leaf
    report.data["W"] = str(W)

    # i) projectable along span{d/dy, d/d etabar}: components along d/dx and d/d zetabar
    #    involve only zetabar and foliated coefficients
    proj = []
    for target in list(transverse) + list(range(p, p + q)):
        tname = target if isinstance(target, str) else f"zetabar{target - p + 1}"
        for mono, c in sorted(W.component(target).items()):
            if any(i < p for i in mono):
                proj.append(f"d/d{tname} term with etabar factor: ({c}) on {mono}")
            elif not c.is_foliated():
                proj.append(f"d/d{tname} coefficient not foliated: {c}")
    report.expect_zero("projectable", "field is projectable along the superfoliation", proj)

    # ii) restriction to zetabar = 0 is tangent to it and to the superfoliation, homological,
    #     and transitive over the leaves
    R = W.restricted()
    tang = []
    for target in list(transverse) + list(range(p, p + q)):
        tname = target if isinstance(target, str) else f"zetabar{target - p + 1}"
        for mono, c in sorted(R.component(target).items()):
            tang.append(f"restricted field has d/d{tname} term ({c}) on {mono}")
    report.expect_zero("restriction-tangent", "restricted field lies in the superfoliation", tang)

    rows = []
    for h in range(p):
        rows.append([R.component(y).get((h,), pair.chart.zero()) for y in leaf])
    rank = generic_rank(rows, pair.chart) if rows and leaf else 0
    report.expect_zero(
        "transitive-on-leaves",
        "restricted field is transitive over the leaves",
        [] if rank == len(leaf) else [f"leaf rank {rank}, leaves have dimension {len(leaf)}"],
    )

    # homological conditions certified through the bivector correspondence
    restricted_alg = _restricted_algebroid(sd, R)
    rep_r = check_lie_algebroid(restricted_alg)
    report.expect_zero(
        "restriction-homological",
        "restricted field is homological",
        [f"{c.id}: {r}" for c in rep_r.failures() for r in c.residuals],
    )
    Lam = _bivector(sd.algebroid, sd.chart, sd.eta + sd.zeta)
    report.expect_zero("homological", "field is homological", _residual_lines(schouten(Lam, Lam)))
    return report


def _restricted_algebroid(sd: SplitData, R: OddField) -> LieAlgebroid:
    """Read the B-algebroid (beta^l_{hk}, beta^u_h) off the restricted odd field."""
    chart = sd.pair.chart
    p = sd.p
    coords = sd.algebroid.coords
    anchor = tuple(tuple(R.component(name).get((h,), chart.zero()) for name in coords) for h in range(p))
    structure = {}
    for h, k in combinations(range(p), 2):
        structure[(h, k)] = tuple(R.component(l).get((h, k), chart.zero()) for l in range(p))
    return LieAlgebroid(chart, p, anchor, structure)
