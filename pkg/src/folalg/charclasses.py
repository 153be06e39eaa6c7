"""A-connections, curvature, power-sum characteristic forms and transgression.

Convention: for an A-connection on a bundle V with frame v_1..v_v,

    nabla_{e_h} v_b = Gamma[h][b][c] v_c,

the connection matrix is omega^c_b = Gamma[h][b][c] e*^h, and the curvature
is the matrix of A-2-forms R^d_b with R(e_h, e_k) v_b = R^d_b(e_h, e_k) v_d.
Matrix-valued forms multiply as (X ^ Y)^d_b = sum_c X^d_c ^ Y^c_b; traces of
products of even forms do not depend on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .algebroid import AForm, LieAlgebroid, d_A
from .foliation import FoliatedPair, PARAMETER, b_foliated_status
from .linalg import Membership, poly_inverse
from .report import Report
from .ring import Chart, Poly, common_chart


class BottError(ValueError):
    """The bundle data is not foliated, so no Bott connection exists on it."""


Gamma = tuple[tuple[tuple[Poly, ...], ...], ...]


@dataclass(frozen=True, eq=False)
class AConnection:
    A: LieAlgebroid
    rank: int
    gamma: Gamma

    def __post_init__(self):
        r, v = self.A.rank, self.rank
        if len(self.gamma) != r or any(len(m) != v or any(len(row) != v for row in m) for m in self.gamma):
            raise ValueError(f"connection coefficients must have shape ({r}, {v}, {v})")
        object.__setattr__(self, "gamma", tuple(tuple(tuple(row) for row in m) for m in self.gamma))

    @property
    def chart(self) -> Chart:
        chart = self.A.chart
        for m in self.gamma:
            for row in m:
                for c in row:
                    chart = common_chart(chart, c.chart)
        return chart

    @classmethod
    def zero(cls, A: LieAlgebroid, rank: int) -> AConnection:
        z = A.chart.zero()
        return cls(A, rank, tuple(tuple(tuple(z for _ in range(rank)) for _ in range(rank)) for _ in range(A.rank)))

    def covariant(self, h: int, sigma: Sequence[Poly]) -> tuple[Poly, ...]:
        """nabla_{e_h} of a section sigma = sigma^b v_b."""
        out = []
        for c in range(self.rank):
            val = self.A.act(self.A.basis(h), sigma[c])
            for b in range(self.rank):
                if not sigma[b].is_zero() and not self.gamma[h][b][c].is_zero():
                    val = val + sigma[b] * self.gamma[h][b][c]
            out.append(val)
        return tuple(out)

    def matrix_form(self) -> list[list[AForm]]:
        """omega^c_b as A-1-forms."""
        chart, r, v = self.chart, self.A.rank, self.rank
        return [[AForm(chart, r, 1, {(h,): self.gamma[h][b][c] for h in range(r)}) for b in range(v)] for c in range(v)]

    def combine(self, other: AConnection, weight: Poly) -> AConnection:
        """self + weight * (other - self)."""
        if other.rank != self.rank or other.A is not self.A and other.A.rank != self.A.rank:
            raise ValueError("connections live on different bundles")
        g = tuple(
            tuple(tuple(a + weight * (b - a) for a, b in zip(r0, r1)) for r0, r1 in zip(m0, m1))
            for m0, m1 in zip(self.gamma, other.gamma)
        )
        return AConnection(self.A, self.rank, g)


EndForm = list[list[AForm]]


def curvature(A: LieAlgebroid, nabla: AConnection) -> EndForm:
    """R^d_b(e_h, e_k) = coefficient of v_d in R(e_h, e_k) v_b."""
    v, r = nabla.rank, A.rank
    chart = nabla.chart
    coeffs = [[{} for _ in range(v)] for _ in range(v)]
    unit = [tuple(chart.one() if i == b else chart.zero() for i in range(v)) for b in range(v)]
    for h, k in combinations(range(r), 2):
        struct = A.struct(h, k)
        for b in range(v):
            first = nabla.covariant(h, nabla.covariant(k, unit[b]))
            second = nabla.covariant(k, nabla.covariant(h, unit[b]))
            third = [chart.zero() for _ in range(v)]
            for l, a in enumerate(struct):
                if a.is_zero():
                    continue
                for d in range(v):
                    g = nabla.gamma[l][b][d]
                    if not g.is_zero():
                        third[d] = third[d] + a * g
            for d in range(v):
                val = first[d] - second[d] - third[d]
                if not val.is_zero():
                    coeffs[d][b][(h, k)] = val
    return [[AForm(chart, r, 2, coeffs[d][b]) for b in range(v)] for d in range(v)]


def mat_wedge(X: EndForm, Y: EndForm) -> EndForm:
    n = len(X)
    out = []
    for d in range(n):
        row = []
        for b in range(n):
            acc = None
            for c in range(n):
                term = X[d][c].wedge(Y[c][b])
                acc = term if acc is None else acc + term
            row.append(acc)
        out.append(row)
    return out


def trace(X: EndForm) -> AForm:
    acc = X[0][0]
    for i in range(1, len(X)):
        acc = acc + X[i][i]
    return acc


def char_form(R: EndForm, k: int) -> AForm:
    """Power sum tr(R^k), an A-form of degree 2k."""
    if k < 1:
        raise ValueError("power must be at least 1")
    P = R
    for _ in range(k - 1):
        P = mat_wedge(P, R)
    return trace(P)


def _t_chart(chart: Chart) -> tuple[Chart, str]:
    name = chart.fresh("s", 1)[0]
    return chart.extend([name], PARAMETER), name


def delta_form(A: LieAlgebroid, nabla0: AConnection, nabla1: AConnection, k: int) -> AForm:
    """k * int_0^1 tr((nabla1 - nabla0) ^ R_t^(k-1)) dt with nabla_t = nabla0 + t (nabla1 - nabla0)."""
    if nabla0.rank != nabla1.rank:
        raise ValueError("connections live on bundles of different rank")
    if k < 1:
        raise ValueError("power must be at least 1")
    base = common_chart(nabla0.chart, nabla1.chart)
    chart, t = _t_chart(base)
    tvar = chart.var(t)
    nt = nabla0.combine(nabla1, tvar)
    theta_conn = AConnection(
        A,
        nabla0.rank,
        tuple(
            tuple(tuple(b - a for a, b in zip(r0, r1)) for r0, r1 in zip(m0, m1))
            for m0, m1 in zip(nabla0.gamma, nabla1.gamma)
        ),
    )
    theta = [[AForm(chart, A.rank, 1, dict(f.coeffs)) for f in row] for row in theta_conn.matrix_form()]
    P = theta
    if k > 1:
        Rt = curvature(A, nt)
        for _ in range(k - 1):
            P = mat_wedge(P, Rt)
    integrand = trace(P)
    out = {idx: c.integrate_unit(t).restrict(base) * k for idx, c in integrand.coeffs.items()}
    return AForm(base, A.rank, 2 * k - 1, out)


def check_transgression(A: LieAlgebroid, nabla0: AConnection, nabla1: AConnection, k: int) -> Report:
    report = Report(f"transgression of the order-{k} power sum")
    delta = delta_form(A, nabla0, nabla1, k)
    lhs = d_A(A, delta)
    rhs = char_form(curvature(A, nabla1), k) - char_form(curvature(A, nabla0), k)
    diff = lhs - rhs
    report.expect_zero(
        "transgression",
        "d_A of the difference form equals the difference of characteristic forms",
        [] if diff.is_zero() else [str(diff)],
    )
    report.data["difference form"] = str(delta)
    return report


def check_char_closed(A: LieAlgebroid, nabla: AConnection, k: int) -> Report:
    report = Report(f"order-{k} characteristic form is closed")
    form = char_form(curvature(A, nabla), k)
    dd = d_A(A, form)
    report.expect_zero("char-closed", "d_A of the characteristic form vanishes", [] if dd.is_zero() else [str(dd)])
    report.data["characteristic form"] = str(form)
    return report


# ---------------------------------------------------------------------------
# Bott connections


@dataclass(frozen=True, eq=False)
class FoliatedBundle:
    """Bundle data for Bott connections.

    ``kind`` is "C" (the complement, framed by the witness sections) or
    "trivial" (an abstract foliated bundle of the given rank whose frame
    is declared foliated).
    """

    kind: str
    rank: int


def bott_connection(
    pair: FoliatedPair,
    V: FoliatedBundle,
    nabla_prime: Sequence[Sequence[Sequence[Poly]]] | None = None,
) -> AConnection:
    """Connection with nabla_b = 0 on the foliated frame and nabla' along the witness directions.

    nabla_prime[s][b][c] gives nabla'_{w_s} v_b = nabla_prime[s][b][c] v_c.
    The result is expressed in the original basis of A.
    """
    A, chart = pair.A, pair.chart
    if V.kind == "C":
        if V.rank != pair.q:
            raise BottError("the complement has rank q")
        for s, w in enumerate(pair.witness):
            if b_foliated_status(pair, w) is not Membership.YES:
                raise BottError(f"frame section w{s + 1} is not B-foliated")
    elif V.kind != "trivial":
        raise BottError(f"unknown bundle kind {V.kind!r}")
    v, q, p = V.rank, pair.q, pair.p
    z = chart.zero()
    if nabla_prime is None:
        nabla_prime = [[[z] * v for _ in range(v)] for _ in range(q)]
    if len(nabla_prime) != q or any(len(m) != v or any(len(row) != v for row in m) for m in nabla_prime):
        raise ValueError(f"nabla' must have shape ({q}, {v}, {v})")
    frame_gamma = [m for m in nabla_prime] + [[[z] * v for _ in range(v)] for _ in range(p)]
    inv = poly_inverse([list(row) for row in pair.frame], chart)
    if inv is None:
        raise BottError("adapted frame has no polynomial inverse")
    # e_h = sum_j inv[h][j] f_j  (frame rows f_j written in the e-basis)
    gamma = []
    for h in range(A.rank):
        mat = []
        for b in range(v):
            row = []
            for c in range(v):
                acc = z
                for j in range(A.rank):
                    if not inv[h][j].is_zero() and not frame_gamma[j][b][c].is_zero():
                        acc = acc + inv[h][j] * frame_gamma[j][b][c]
                row.append(acc)
            mat.append(tuple(row))
        gamma.append(tuple(mat))
    return AConnection(A, v, tuple(gamma))


def curvature_on(R: EndForm, s1, s2) -> list[list[Poly]]:
    return [[entry.evaluate([s1, s2]) for entry in row] for row in R]


def check_bott_vanishing(
    pair: FoliatedPair,
    V: FoliatedBundle,
    k: int,
    nabla_prime: Sequence[Sequence[Sequence[Poly]]] | None = None,
) -> Report:
    report = Report(f"Bott vanishing for the order-{k} power sum")
    report.data.update({"q": str(pair.q), "k": str(k)})
    nabla = bott_connection(pair, V, nabla_prime)
    R = curvature(pair.A, nabla)
    basic = []
    for h, kk in combinations(range(pair.p), 2):
        vals = curvature_on(R, pair.B[h], pair.B[kk])
        for d, row in enumerate(vals):
            for b, c in enumerate(row):
                if not c.is_zero():
                    basic.append(f"R(b{h + 1},b{kk + 1})^{d + 1}_{b + 1}: {c}")
    report.expect_zero("curvature-basic", "curvature vanishes on pairs of B sections", basic)
    if k <= pair.q:
        report.not_applicable("bott-vanishing", "characteristic form vanishes above the codimension", f"k = {k} <= q = {pair.q}")
        return report
    form = char_form(R, k)
    report.expect_zero(
        "bott-vanishing",
        "characteristic form vanishes above the codimension",
        [] if form.is_zero() else [str(form)],
        f"form degree {2 * k}, rank {pair.A.rank}",
    )
    return report
