"""Lie algebroids over a single chart.

A Lie algebroid of rank r is stored through its values on a basis e_1..e_r:
the anchor rows rho[h] (components of #e_h along the base coordinates) and
the structure functions alpha^l_{hk} with [e_h, e_k] = alpha^l_{hk} e_l.
Sections are tuples of r polynomials; the bracket of arbitrary sections is
the Leibniz extension

    [s1, s2]^l = s1^h s2^k alpha^l_{hk} + #s1(s2^l) - #s2(s1^l).

Because the bracket is Leibniz-extended from the basis, the anchor
morphism property and the Jacobi identity hold for all sections as soon as
they hold on basis pairs and triples; the checks below therefore run on
the basis only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .linalg import SpanSolver, poly_inverse, vec_combination
from .report import Report
from .ring import Alternating, Chart, Poly, apply_field, common_chart, field_bracket, sort_sign

Section = tuple[Poly, ...]


class AForm(Alternating):
    """A-form: alternating coefficients over section indices (dual basis e*^h)."""

    __slots__ = ()

    def _label(self, idx) -> str:
        return "^".join(f"e*{i + 1}" for i in idx) or "1"

    def evaluate(self, sections: Sequence[Sequence[Poly]]) -> Poly:
        """lambda(s_1, ..., s_p) for arbitrary sections (determinant convention)."""
        if len(sections) != self.degree:
            raise ValueError("wrong number of arguments")
        chart = self.chart
        total = chart.zero()
        for idx, c in self.coeffs.items():
            total = total + c * _det_columns(sections, idx, chart)
        return total


def _det_columns(sections: Sequence[Sequence[Poly]], idx: tuple[int, ...], chart: Chart) -> Poly:
    """det [s_i^{idx_j}] by Laplace expansion (p is small)."""
    p = len(idx)
    if p == 0:
        return chart.one()
    total = chart.zero()
    first = sections[0]
    for j, col in enumerate(idx):
        entry = first[col]
        if entry.is_zero():
            continue
        rest = idx[:j] + idx[j + 1:]
        sub = _det_columns(sections[1:], rest, chart)
        total = total + (entry * sub if j % 2 == 0 else -(entry * sub))
    return total


@dataclass(frozen=True, eq=False)
class LieAlgebroid:
    chart: Chart
    rank: int
    anchor: tuple[tuple[Poly, ...], ...]
    structure: Mapping[tuple[int, int], tuple[Poly, ...]] = field(default_factory=dict)
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        r, m = self.rank, len(self.chart.base)
        if len(self.anchor) != r:
            raise ValueError(f"anchor has {len(self.anchor)} rows, rank is {r}")
        for h, row in enumerate(self.anchor):
            if len(row) != m:
                raise ValueError(f"anchor row {h + 1} has {len(row)} entries, base dimension is {m}")
        clean: dict[tuple[int, int], tuple[Poly, ...]] = {}
        for (h, k), vec in self.structure.items():
            if not (0 <= h < r and 0 <= k < r):
                raise ValueError(f"structure index ({h + 1},{k + 1}) out of range")
            if len(vec) != r:
                raise ValueError(f"structure vector for ({h + 1},{k + 1}) has length {len(vec)}, rank is {r}")
            if h == k:
                if any(not c.is_zero() for c in vec):
                    raise ValueError(f"[e{h + 1}, e{h + 1}] must vanish")
                continue
            key, vals = ((h, k), tuple(vec)) if h < k else ((k, h), tuple(-c for c in vec))
            if key in clean:
                if any(not (a - b).is_zero() for a, b in zip(clean[key], vals)):
                    raise ValueError(f"structure functions not antisymmetric at ({h + 1},{k + 1})")
                continue
            clean[key] = vals
        object.__setattr__(self, "structure", {k: v for k, v in sorted(clean.items()) if any(not c.is_zero() for c in v)})
        object.__setattr__(self, "anchor", tuple(tuple(row) for row in self.anchor))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"e{i + 1}" for i in range(r)))
        elif len(self.labels) != r:
            raise ValueError("one label per basis section is required")

    # -- basic data ---------------------------------------------------------

    @property
    def coords(self) -> tuple[str, ...]:
        return self.chart.base

    def zero_section(self) -> Section:
        return tuple(self.chart.zero() for _ in range(self.rank))

    def basis(self, h: int) -> Section:
        return tuple(self.chart.one() if i == h else self.chart.zero() for i in range(self.rank))

    def section(self, *texts: str) -> Section:
        if len(texts) != self.rank:
            raise ValueError(f"expected {self.rank} components")
        return tuple(self.chart.poly(t) for t in texts)

    def struct(self, h: int, k: int) -> Section:
        """alpha^._{hk} as a section."""
        if h == k:
            return self.zero_section()
        if h < k:
            vec = self.structure.get((h, k))
            return vec if vec is not None else self.zero_section()
        vec = self.structure.get((k, h))
        return tuple(-c for c in vec) if vec is not None else self.zero_section()

    def _check_section(self, s: Sequence[Poly]):
        if len(s) != self.rank:
            raise ValueError(f"section has {len(s)} components, rank is {self.rank}")

    # -- anchor and bracket -------------------------------------------------

    def anchor_apply(self, s: Sequence[Poly]) -> tuple[Poly, ...]:
        self._check_section(s)
        m = len(self.coords)
        out = [self.chart.zero() for _ in range(m)]
        for h, c in enumerate(s):
            if c.is_zero():
                continue
            for i, rho in enumerate(self.anchor[h]):
                if not rho.is_zero():
                    out[i] = out[i] + c * rho
        return tuple(out)

    def act(self, s: Sequence[Poly], f: Poly) -> Poly:
        """#s (f)."""
        return apply_field(self.anchor_apply(s), self.coords, f)

    def bracket(self, s1: Sequence[Poly], s2: Sequence[Poly]) -> Section:
        self._check_section(s1)
        self._check_section(s2)
        r = self.rank
        out = [self.chart.zero() for _ in range(r)]
        for (h, k), vec in self.structure.items():
            coef = s1[h] * s2[k] - s1[k] * s2[h]
            if coef.is_zero():
                continue
            for l, a in enumerate(vec):
                if not a.is_zero():
                    out[l] = out[l] + coef * a
        X1, X2 = self.anchor_apply(s1), self.anchor_apply(s2)
        for l in range(r):
            out[l] = out[l] + apply_field(X1, self.coords, s2[l]) - apply_field(X2, self.coords, s1[l])
        return tuple(out)

    def field_bracket(self, X: Sequence[Poly], Y: Sequence[Poly]) -> tuple[Poly, ...]:
        return field_bracket(X, Y, self.coords)

    # -- frames -------------------------------------------------------------

    def rebase(self, frame: Sequence[Sequence[Poly]], labels: Sequence[str] = ()) -> LieAlgebroid:
        """The same algebroid written in a new basis f_j = frame[j] (rows in the e-basis).

        The frame must have a polynomial inverse so that the new structure
        functions stay polynomial.
        """
        if len(frame) != self.rank:
            raise ValueError("a frame needs exactly rank rows")
        inv = poly_inverse([list(row) for row in frame], self.chart)
        if inv is None:
            raise ValueError("frame change has no polynomial inverse")
        chart = self.chart
        for row in frame:
            for c in row:
                chart = common_chart(chart, c.chart)

        def coords_in_frame(s):
            # s = sum_j g_j f_j  <=>  g = s * inv
            return tuple(
                sum((s[i] * inv[i][j] for i in range(self.rank) if not s[i].is_zero() and not inv[i][j].is_zero()), chart.zero())
                for j in range(self.rank)
            )

        anchor = tuple(self.anchor_apply(row) for row in frame)
        structure = {}
        for a, b in combinations(range(self.rank), 2):
            structure[(a, b)] = coords_in_frame(self.bracket(frame[a], frame[b]))
        return LieAlgebroid(chart, self.rank, anchor, structure, tuple(labels))

    def __repr__(self):
        return f"LieAlgebroid(rank={self.rank}, chart={self.chart})"


def anchor_apply(A: LieAlgebroid, s: Sequence[Poly]) -> tuple[Poly, ...]:
    return A.anchor_apply(s)


def bracket_sections(A: LieAlgebroid, s1: Sequence[Poly], s2: Sequence[Poly]) -> Section:
    return A.bracket(s1, s2)


# ---------------------------------------------------------------------------
# standard examples


def tangent_bundle(chart: Chart) -> LieAlgebroid:
    """TM over the base coordinates of ``chart``: identity anchor, zero brackets."""
    m = len(chart.base)
    anchor = tuple(tuple(chart.one() if i == j else chart.zero() for j in range(m)) for i in range(m))
    return LieAlgebroid(chart, m, anchor, {}, tuple(f"d/d{v}" for v in chart.base))


def lie_algebra(structure: Mapping[tuple[int, int], Sequence], rank: int, chart: Chart | None = None) -> LieAlgebroid:
    """A Lie algebra as an algebroid with zero anchor (over a point by default)."""
    chart = chart or Chart((), ())
    clean = {}
    for key, vec in structure.items():
        clean[key] = tuple(c if isinstance(c, Poly) else chart.const(c) for c in vec)
    anchor = tuple(tuple(chart.zero() for _ in chart.base) for _ in range(rank))
    return LieAlgebroid(chart, rank, anchor, clean)


# ---------------------------------------------------------------------------
# verification


def _fmt_section(A_labels: Sequence[str], s: Sequence[Poly]) -> str:
    parts = [f"{lab}: {c}" for lab, c in zip(A_labels, s) if not c.is_zero()]
    return ", ".join(parts)


def anchor_morphism_residuals(A: LieAlgebroid) -> list[str]:
    out = []
    for h, k in combinations(range(A.rank), 2):
        lhs = A.anchor_apply(A.struct(h, k))
        rhs = A.field_bracket(A.anchor[h], A.anchor[k])
        for name, a, b in zip(A.coords, lhs, rhs):
            diff = a - b
            if not diff.is_zero():
                out.append(f"({A.labels[h]},{A.labels[k]}) d/d{name}: {diff}")
    return out


def jacobiator(A: LieAlgebroid, s1, s2, s3) -> Section:
    a = A.bracket(A.bracket(s1, s2), s3)
    b = A.bracket(A.bracket(s2, s3), s1)
    c = A.bracket(A.bracket(s3, s1), s2)
    return tuple(x + y + z for x, y, z in zip(a, b, c))


def jacobi_residuals(A: LieAlgebroid) -> list[str]:
    out = []
    for h, k, l in combinations(range(A.rank), 3):
        J = jacobiator(A, A.basis(h), A.basis(k), A.basis(l))
        for lab, c in zip(A.labels, J):
            if not c.is_zero():
                out.append(f"({A.labels[h]},{A.labels[k]},{A.labels[l]}) {lab}: {c}")
    return out


def check_lie_algebroid(A: LieAlgebroid) -> Report:
    report = Report("Lie algebroid axioms")
    report.expect_zero("anchor-morphism", "anchor maps brackets to commutators", anchor_morphism_residuals(A))
    report.expect_zero("jacobi", "Jacobi identity on basis triples", jacobi_residuals(A))
    return report


# ---------------------------------------------------------------------------
# the differential d_A


def aform(A: LieAlgebroid, degree: int, coeffs: Mapping[tuple, Poly] | None = None) -> AForm:
    return AForm(A.chart, A.rank, degree, coeffs or {})


def d_A(A: LieAlgebroid, lam: AForm) -> AForm:
    """Exterior differential of an A-form, evaluated on basis sections.

    (d lam)(e_j0..e_jp) = sum_a (-1)^a #e_ja(lam(..^ja..))
                          + sum_{a<b} (-1)^(a+b) lam([e_ja, e_jb], ..^ja..^jb..)
    """
    r, p = A.rank, lam.degree
    if lam.dim != r:
        raise ValueError("form rank does not match the algebroid")
    chart = common_chart(A.chart, lam.chart)
    out = {}
    if p + 1 > r:
        return AForm(chart, r, p + 1, {})
    for J in combinations(range(r), p + 1):
        val = chart.zero()
        for a in range(p + 1):
            rest = J[:a] + J[a + 1:]
            c = lam[rest]
            if not c.is_zero():
                term = apply_field(A.anchor[J[a]], A.coords, c)
                val = val + (term if a % 2 == 0 else -term)
        for a, b in combinations(range(p + 1), 2):
            vec = A.struct(J[a], J[b])
            rest = J[:a] + J[a + 1:b] + J[b + 1:]
            sign = -1 if (a + b) % 2 else 1
            for l, coef in enumerate(vec):
                if coef.is_zero():
                    continue
                c = lam[(l,) + rest]
                if not c.is_zero():
                    val = val + coef * c * sign
        if not val.is_zero():
            out[J] = val
    return AForm(chart, r, p + 1, out)


def spanning_forms(A: LieAlgebroid, degree: int, poly_degree: int, coords: Sequence[str] | None = None) -> list[AForm]:
    """Monomial multiples of the basis p-forms; spans forms with bounded coefficient degree."""
    coords = A.coords if coords is None else coords
    monos = A.chart.monomials(coords, poly_degree)
    out = []
    for I in combinations(range(A.rank), degree):
        for mono in monos:
            out.append(AForm(A.chart, A.rank, degree, {I: mono}))
    return out


def check_dsquared(A: LieAlgebroid, degree_cap: int = 3, poly_degree: int = 2) -> Report:
    report = Report("d_A squared vanishes")
    residuals = []
    for p in range(0, min(degree_cap, A.rank) + 1):
        if p + 2 > A.rank:
            continue
        for lam in spanning_forms(A, p, poly_degree):
            dd = d_A(A, d_A(A, lam))
            if not dd.is_zero():
                residuals.append(f"d d({lam}) = {dd}")
    report.expect_zero(
        "d-squared",
        "d_A o d_A = 0 on monomial spanning forms",
        residuals,
        f"form degree <= {degree_cap}, coefficient degree <= {poly_degree}",
    )
    return report


# ---------------------------------------------------------------------------
# subbundles given by basis rows


def span_solver(rows: Sequence[Sequence[Poly]], chart: Chart) -> SpanSolver:
    return SpanSolver.build([list(r) for r in rows], chart)


def combine(coeffs: Sequence[Poly], rows: Sequence[Sequence[Poly]], chart: Chart) -> Section:
    return tuple(vec_combination(coeffs, rows, chart))


def sign_of(indices: Sequence[int]) -> int:
    return sort_sign(indices)[0]
