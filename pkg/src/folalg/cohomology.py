"""Bigraded forms of a foliated pair and truncated d''-cohomology.

Forms are written in the adapted frame (w_1..w_q, b_1..b_p): the witness
rows (B-foliated, spanning C) come first, then the rows of B.  An index
tuple with s entries below q and r entries at or above q has type (s, r).
Because B is closed and the w_s are B-foliated, d_A of a type-(s, r) form
only has components of types (s+1, r), (s, r+1) and (s+2, r-1); these are
d', d'' and the "partial" operator respectively.

Truncated cohomology: V(s, r, D) is the rational span of basis forms with
monomial coefficients of degree <= D in the base coordinates.  When the
anchor on B has degree <= 1 and the B-structure functions are constant,
d'' never raises coefficient degree, and

    dim H = dim ker(d'' on V(s, r, D)) - dim(d'' V(s, r-1, D+1) cap V(s, r, D)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .algebroid import AForm, LieAlgebroid, d_A
from .foliation import DeformationForm, FoliatedPair
from .linalg import sparse_rank
from .report import Report, Verdict
from .ring import Poly


class DegreeClosureError(ValueError):
    """d'' would raise the coefficient degree, so truncation is not a subcomplex."""


Type = tuple[int, int]


@dataclass(frozen=True, eq=False)
class BigradedForm:
    """A-form of pure type (s, r) in the adapted frame."""

    form: AForm
    type: Type

    @property
    def s(self) -> int:
        return self.type[0]

    @property
    def r(self) -> int:
        return self.type[1]

    def is_zero(self) -> bool:
        return self.form.is_zero()

    def __str__(self):
        return f"type {self.type}: {self.form}"


class BigradedComplex:
    """The double complex of a foliated pair in its adapted frame."""

    def __init__(self, pair: FoliatedPair):
        self.pair = pair
        self.q = pair.q
        self.p = pair.p
        self.rank = pair.A.rank

    @cached_property
    def algebroid(self) -> LieAlgebroid:
        labels = tuple(f"w{i + 1}" for i in range(self.q)) + tuple(f"b{i + 1}" for i in range(self.p))
        return self.pair.A.rebase(self.pair.frame, labels)

    @property
    def chart(self):
        return self.pair.chart

    # -- types ----------------------------------------------------------

    def type_of(self, idx: Sequence[int]) -> Type:
        s = sum(1 for i in idx if i < self.q)
        return s, len(idx) - s

    def index_tuples(self, s: int, r: int) -> list[tuple[int, ...]]:
        out = []
        for cs in combinations(range(self.q), s):
            for bs in combinations(range(self.q, self.q + self.p), r):
                out.append(cs + bs)
        return out

    def form(self, s: int, r: int, coeffs: dict | None = None) -> BigradedForm:
        """Build a type-(s, r) form; keys are (C-indices, B-indices) 0-based within each block."""
        out = {}
        for (cs, bs), c in (coeffs or {}).items():
            if len(cs) != s or len(bs) != r:
                raise ValueError(f"component {(cs, bs)} is not of type {(s, r)}")
            out[tuple(cs) + tuple(self.q + b for b in bs)] = c
        return BigradedForm(AForm(self.chart, self.rank, s + r, out), (s, r))

    def wrap(self, lam: AForm) -> dict[Type, BigradedForm]:
        parts: dict[Type, dict] = {}
        for idx, c in lam.coeffs.items():
            parts.setdefault(self.type_of(idx), {})[idx] = c
        return {t: BigradedForm(AForm(lam.chart, self.rank, lam.degree, cs), t) for t, cs in sorted(parts.items())}

    # -- operators ----------------------------------------------------------

    def d(self, lam: BigradedForm) -> AForm:
        return d_A(self.algebroid, lam.form)

    def _part(self, lam: BigradedForm, shift: Type) -> BigradedForm:
        target = (lam.s + shift[0], lam.r + shift[1])
        full = self.d(lam)
        coeffs = {idx: c for idx, c in full.coeffs.items() if self.type_of(idx) == target}
        return BigradedForm(AForm(full.chart, self.rank, full.degree, coeffs), target)

    def dp(self, lam: BigradedForm) -> BigradedForm:
        return self._part(lam, (1, 0))

    def dpp(self, lam: BigradedForm) -> BigradedForm:
        return self._part(lam, (0, 1))

    def dpartial(self, lam: BigradedForm) -> BigradedForm:
        return self._part(lam, (2, -1))

    def decompose(self, lam: BigradedForm) -> tuple[BigradedForm, BigradedForm, BigradedForm]:
        full = self.d(lam)
        parts = self.wrap(full)
        unexpected = [t for t in parts if t not in ((lam.s + 1, lam.r), (lam.s, lam.r + 1), (lam.s + 2, lam.r - 1))]
        if unexpected:
            raise ValueError(f"d_A produced components of unexpected types {unexpected}; is B closed?")

        def get(shift):
            t = (lam.s + shift[0], lam.r + shift[1])
            return parts.get(t) or BigradedForm(AForm(full.chart, self.rank, full.degree, {}), t)

        return get((1, 0)), get((0, 1)), get((2, -1))

    def dpp_function(self, f: Poly) -> tuple[Poly, ...]:
        """Components of d''f on b_1..b_p (needs no frame change)."""
        return tuple(self.pair.A.act(b, f) for b in self.pair.B)

    # -- spanning sets ------------------------------------------------------

    def spanning(self, s: int, r: int, degree: int) -> list[BigradedForm]:
        monos = self.chart.monomials(self.pair.A.coords, degree)
        out = []
        for idx in self.index_tuples(s, r):
            for m in monos:
                out.append(BigradedForm(AForm(self.chart, self.rank, s + r, {idx: m}), (s, r)))
        return out

    def types(self) -> list[Type]:
        return [(s, r) for s in range(self.q + 1) for r in range(self.p + 1)]


def _sum(*forms: BigradedForm) -> AForm:
    out = None
    for f in forms:
        out = f.form if out is None else out + f.form
    return out


def decompose_dA(pair: FoliatedPair, lam: BigradedForm, complex_: BigradedComplex | None = None):
    """(d' lam, d'' lam, partial lam)."""
    return (complex_ or BigradedComplex(pair)).decompose(lam)


def check_bigraded_identities(pair: FoliatedPair, degree_cap: int = 2) -> Report:
    cx = BigradedComplex(pair)
    report = Report("bigraded identities of d_A")
    names = [
        ("dpp-squared", "d'' o d'' = 0"),
        ("dp-dpp-anticommute", "d'd'' + d''d' = 0"),
        ("partial-squared", "partial o partial = 0"),
        ("dp-partial-anticommute", "d' partial + partial d' = 0"),
        ("dp-squared-relation", "d'd' + d'' partial + partial d'' = 0"),
        ("split-sums-to-dA", "d' + d'' + partial = d_A"),
    ]
    residuals = {key: [] for key, _ in names}
    for s, r in cx.types():
        for lam in cx.spanning(s, r, degree_cap):
            dp, dpp, dpa = cx.decompose(lam)
            whole = cx.d(lam)
            if not (whole - _sum(dp, dpp, dpa)).is_zero():
                residuals["split-sums-to-dA"].append(f"{lam}")
            checks = {
                "dpp-squared": [cx.dpp(dpp)],
                "dp-dpp-anticommute": [cx.dp(dpp), cx.dpp(dp)],
                "partial-squared": [cx.dpartial(dpa)],
                "dp-partial-anticommute": [cx.dp(dpa), cx.dpartial(dp)],
                "dp-squared-relation": [cx.dp(dp), cx.dpp(dpa), cx.dpartial(dpp)],
            }
            for key, terms in checks.items():
                total = _sum(*terms)
                if not total.is_zero():
                    residuals[key].append(f"on {lam}: {total}")
    for key, label in names:
        report.expect_zero(key, label, residuals[key][:20], f"spanning forms with coefficient degree <= {degree_cap}")
    return report


# ---------------------------------------------------------------------------
# truncated d''-cohomology


def degree_shift_bound(cx: BigradedComplex) -> None:
    """Raise DegreeClosureError if d'' can raise coefficient degree."""
    A = cx.algebroid
    for h in range(cx.q, cx.rank):
        for name, c in zip(A.coords, A.anchor[h]):
            if c.degree() > 1:
                raise DegreeClosureError(f"anchor coefficient of {A.labels[h]} along {name} has degree {c.degree()} > 1: {c}")
    for h, k in combinations(range(cx.q, cx.rank), 2):
        for l, c in enumerate(A.struct(h, k)):
            if l >= cx.q and c.degree() > 0:
                raise DegreeClosureError(
                    f"structure function [{A.labels[h]},{A.labels[k]}]^{A.labels[l]} is not constant: {c}"
                )


def _vectorize(form: AForm, columns: dict) -> dict[int, object]:
    row = {}
    for idx, c in form.coeffs.items():
        for e, v in c.terms.items():
            key = (idx, e)
            if key not in columns:
                columns[key] = len(columns)
            row[columns[key]] = v
    return row


@dataclass(frozen=True)
class CohomologyResult:
    slot: Type
    degree_cap: int
    dim_space: int
    dim_closed: int
    dim_exact: int

    @property
    def dimension(self) -> int:
        return self.dim_closed - self.dim_exact


def dpp_cohomology_dimension(pair: FoliatedPair, slot: Type, D: int, complex_: BigradedComplex | None = None) -> CohomologyResult:
    cx = complex_ or BigradedComplex(pair)
    degree_shift_bound(cx)
    s, r = slot
    if s < 0 or r < 0 or s > cx.q or r > cx.p:
        raise ValueError(f"slot {slot} outside 0..{cx.q} x 0..{cx.p}")
    space = cx.spanning(s, r, D)
    columns: dict = {}
    rows = [_vectorize(cx.dpp(lam).form, columns) for lam in space]
    dim_closed = len(space) - sparse_rank(rows)
    dim_exact = 0
    if r > 0:
        pre = cx.spanning(s, r - 1, D + 1)
        cols: dict = {}
        image = [_vectorize(cx.dpp(mu).form, cols) for mu in pre]
        high = {j for (idx, e), j in cols.items() if sum(e) > D}
        image_high = [{j: v for j, v in row.items() if j in high} for row in image]
        dim_exact = sparse_rank(image) - sparse_rank(image_high)
    return CohomologyResult(slot, D, len(space), dim_closed, dim_exact)


def dpp_cohomology(pair: FoliatedPair, slot: Type, D: int) -> Report:
    cx = BigradedComplex(pair)
    res = dpp_cohomology_dimension(pair, slot, D, cx)
    s, r = slot
    report = Report(f"truncated d''-cohomology at type {slot}, coefficient degree <= {D}")
    report.data.update(
        {
            "slot": f"{s},{r}",
            "degree cap": str(D),
            "dim space": str(res.dim_space),
            "dim closed": str(res.dim_closed),
            "dim exact": str(res.dim_exact),
            "dimension": str(res.dimension),
        }
    )
    minimal = pair.is_minimal()
    from .linalg import poly_inverse

    invertible = minimal and poly_inverse(pair.leaf_matrix(), pair.chart) is not None
    if r == 0:
        report.not_applicable("poincare-lemma", "closed forms of positive B-degree are exact", "slot has B-degree 0")
    elif not invertible:
        why = "pair is not minimally foliated" if not minimal else "leaf anchor block has no polynomial inverse"
        report.not_applicable("poincare-lemma", "closed forms of positive B-degree are exact", why)
    else:
        report.add(
            "poincare-lemma",
            "closed forms of positive B-degree are exact",
            res.dimension == 0,
            [] if res.dimension == 0 else [f"cohomology dimension {res.dimension}"],
        )
    return report


# ---------------------------------------------------------------------------
# deformation forms


def xi_components(cx: BigradedComplex, xi: DeformationForm) -> list[BigradedForm]:
    """Scalar (0,1)-forms, one per E-direction."""
    out = []
    for s in range(cx.q):
        coeffs = {((), (h,)): xi.values[h][s] for h in range(cx.p)}
        out.append(cx.form(0, 1, coeffs))
    return out


def check_xi_closed(pair: FoliatedPair, xi: DeformationForm) -> Report:
    cx = BigradedComplex(pair)
    report = Report("deformation form is d''-closed")
    residuals = []
    for s, comp in enumerate(xi_components(cx, xi)):
        out = cx.dpp(comp)
        if not out.is_zero():
            residuals.append(f"e{s + 1}: {out.form}")
    report.expect_zero("xi-closed", "d'' of the deformation form vanishes", residuals)
    return report


def is_dpp_exact_difference(pair: FoliatedPair, xi1: DeformationForm, xi2: DeformationForm, a: Sequence[Poly]) -> bool:
    """xi2 = xi1 - d''(pr_C a), the relation between equivalent deformations."""
    from .foliation import trivial_deformation_form

    return (xi1 + trivial_deformation_form(pair, a)) == xi2


__all__ = [
    "BigradedComplex",
    "BigradedForm",
    "CohomologyResult",
    "DegreeClosureError",
    "Verdict",
    "check_bigraded_identities",
    "check_xi_closed",
    "decompose_dA",
    "dpp_cohomology",
    "dpp_cohomology_dimension",
]
