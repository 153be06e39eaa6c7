"""Linear algebra over the polynomial ring and over the rationals.

Matrices are lists of rows of :class:`Poly`.  Ranks and determinants are
"generic": computed over the field of rational functions by fraction-free
(Bareiss) elimination, so a rank of p means some p x p minor is a nonzero
polynomial.  Points where that minor vanishes form the genericity locus and
are ignored, matching the constant-rank assumption on subbundles.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .ring import Chart, Poly, common_chart

Matrix = list[list[Poly]]


def _chart_of(rows: Sequence[Sequence[Poly]], fallback: Chart | None = None) -> Chart:
    chart = fallback
    for row in rows:
        for x in row:
            chart = x.chart if chart is None else common_chart(chart, x.chart)
    if chart is None:
        raise ValueError("cannot infer a chart from an empty matrix")
    return chart


def _normalize(rows: Sequence[Sequence[Poly]], chart: Chart) -> Matrix:
    return [[x.on(chart) for x in row] for row in rows]


def _exact(num: Poly, den: Poly) -> Poly:
    q = num.divide_exact(den)
    if q is None:
        raise ArithmeticError("Bareiss step is not exact; input is not over an integral domain?")
    return q


def bareiss(rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> tuple[int, list[int], Matrix, int]:
    """Fraction-free row echelon form.

    Returns (rank, pivot_columns, echelon_matrix, sign) where sign tracks row
    swaps.  For a square full-rank matrix the last pivot is the determinant
    up to that sign.
    """
    if not rows:
        return 0, [], [], 1
    chart = _chart_of(rows, chart)
    M = _normalize(rows, chart)
    nrows, ncols = len(M), len(M[0])
    prev = chart.one()
    r = 0
    sign = 1
    pivots = []
    for c in range(ncols):
        if r >= nrows:
            break
        # prefer the simplest nonzero pivot to keep intermediate sizes down
        candidates = [i for i in range(r, nrows) if not M[i][c].is_zero()]
        if not candidates:
            continue
        piv = min(candidates, key=lambda i: (M[i][c].degree(), len(M[i][c].terms)))
        if piv != r:
            M[r], M[piv] = M[piv], M[r]
            sign = -sign
        p = M[r][c]
        for i in range(r + 1, nrows):
            a = M[i][c]
            for j in range(c + 1, ncols):
                M[i][j] = _exact(p * M[i][j] - a * M[r][j], prev)
            M[i][c] = chart.zero()
        # rows above stay as they are; only the trailing block is updated
        for i in range(r + 1, nrows):
            for j in range(c):
                M[i][j] = chart.zero()
        prev = p
        pivots.append(c)
        r += 1
    return r, pivots, M, sign


def generic_rank(rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> int:
    if not rows or not rows[0]:
        return 0
    return bareiss(rows, chart)[0]


def determinant(rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> Poly:
    n = len(rows)
    if n == 0:
        if chart is None:
            raise ValueError("determinant of an empty matrix needs a chart")
        return chart.one()
    if any(len(row) != n for row in rows):
        raise ValueError("determinant of a non-square matrix")
    chart = _chart_of(rows, chart)
    rank, _, M, sign = bareiss(rows, chart)
    if rank < n:
        return chart.zero()
    return M[n - 1][n - 1] * sign


def transpose(rows: Sequence[Sequence[Poly]]) -> Matrix:
    return [list(col) for col in zip(*rows)] if rows else []


def mat_mul(A: Sequence[Sequence[Poly]], B: Sequence[Sequence[Poly]], chart: Chart) -> Matrix:
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            acc = chart.zero()
            for k in range(inner):
                if not row[k].is_zero() and not B[k][j].is_zero():
                    acc = acc + row[k] * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def vec_combination(coeffs: Sequence[Poly], rows: Sequence[Sequence[Poly]], chart: Chart) -> list[Poly]:
    """sum_h coeffs[h] * rows[h]."""
    width = len(rows[0]) if rows else 0
    out = [chart.zero() for _ in range(width)]
    for f, row in zip(coeffs, rows):
        if f.is_zero():
            continue
        for j, x in enumerate(row):
            if not x.is_zero():
                out[j] = out[j] + f * x
    return out


def minor(rows: Sequence[Sequence[Poly]], row_idx: Sequence[int], col_idx: Sequence[int]) -> Matrix:
    return [[rows[i][j] for j in col_idx] for i in row_idx]


class Membership(enum.Enum):
    YES = "yes"
    NO = "no"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SpanResult:
    """Outcome of a span-membership test ``v = sum f_h rows[h]``.

    ``coefficients`` is set when the f_h are polynomials.  ``numerators`` and
    ``denominator`` always describe the rational solution when one exists.
    """

    status: Membership
    coefficients: tuple[Poly, ...] | None = None
    numerators: tuple[Poly, ...] | None = None
    denominator: Poly | None = None

    @property
    def member(self) -> bool:
        return self.status is Membership.YES


@dataclass(frozen=True)
class SpanSolver:
    """Precomputed data for repeated membership tests against fixed rows.

    Rows must be generically independent; a p x p minor on ``columns`` is
    nonzero and serves as the Cramer denominator.
    """

    rows: tuple[tuple[Poly, ...], ...]
    columns: tuple[int, ...]
    denominator: Poly
    chart: Chart

    @classmethod
    def build(cls, rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> SpanSolver:
        chart = _chart_of(rows, chart) if rows else chart
        if chart is None:
            raise ValueError("SpanSolver needs a chart for an empty basis")
        rows = _normalize(rows, chart)
        if not rows:
            return cls((), (), chart.one(), chart)
        rank, pivots, _, _ = bareiss(rows, chart)
        if rank < len(rows):
            raise ValueError(f"basis rows are dependent (generic rank {rank} < {len(rows)})")
        cols = tuple(pivots)
        det = determinant(minor(rows, range(len(rows)), cols), chart)
        return cls(tuple(tuple(r) for r in rows), cols, det, chart)

    def solve(self, v: Sequence[Poly]) -> SpanResult:
        chart = self.chart
        v = [x.on(common_chart(chart, x.chart)) for x in v]
        if any(x.chart != chart for x in v):
            chart = _chart_of([v], chart)
        p = len(self.rows)
        if p == 0:
            if all(x.is_zero() for x in v):
                return SpanResult(Membership.YES, (), (), chart.one())
            return SpanResult(Membership.NO)
        base = [[x.on(chart) for x in row] for row in self.rows]
        sub = minor(base, range(p), self.columns)
        # solve f * sub = v restricted to the pivot columns (f is a row vector)
        nums = []
        for h in range(p):
            replaced = [list(r) for r in sub]
            replaced[h] = [v[j] for j in self.columns]
            nums.append(determinant(replaced, chart))
        den = self.denominator.on(chart)
        # full check without division: den * v == sum nums[h] * rows[h]
        combo = vec_combination(nums, base, chart)
        for j in range(len(v)):
            if not (den * v[j] - combo[j]).is_zero():
                return SpanResult(Membership.NO)
        coeffs = []
        for n in nums:
            q = n.divide_exact(den)
            if q is None:
                return SpanResult(Membership.INDETERMINATE, None, tuple(nums), den)
            coeffs.append(q)
        return SpanResult(Membership.YES, tuple(coeffs), tuple(nums), den)


def span_membership(v: Sequence[Poly], rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> SpanResult:
    return SpanSolver.build(rows, chart).solve(v)


def poly_inverse(rows: Sequence[Sequence[Poly]], chart: Chart | None = None) -> Matrix | None:
    """Inverse with polynomial entries, or None when the inverse is not polynomial."""
    n = len(rows)
    chart = _chart_of(rows, chart)
    det = determinant(rows, chart)
    if det.is_zero():
        return None
    inv = [[chart.zero()] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[rows[a][b] for b in range(n) if b != j] for a in range(n) if a != i]
            cof = determinant(sub, chart) if sub else chart.one()
            if (i + j) % 2:
                cof = -cof
            q = cof.divide_exact(det)
            if q is None:
                return None
            inv[j][i] = q
    return inv


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a dense rational matrix (Gaussian elimination over Q)."""
    return sparse_rank([{j: Fraction(x) for j, x in enumerate(row) if x} for row in rows])


def sparse_rank(rows: Sequence[dict[int, Fraction]]) -> int:
    """Rank of a sparse rational matrix given as column->value dicts per row."""
    pivots: dict[int, dict[int, Fraction]] = {}
    rank = 0
    for row in rows:
        r = {k: Fraction(v) for k, v in row.items() if v}
        while r:
            col = min(r)
            piv = pivots.get(col)
            if piv is None:
                lead = r[col]
                pivots[col] = {k: v / lead for k, v in r.items()}
                rank += 1
                break
            factor = r[col]
            for k, v in piv.items():
                s = r.get(k, 0) - factor * v
                if s:
                    r[k] = s
                else:
                    r.pop(k, None)
    return rank
