"""Exact polynomial kernel over named coordinate charts.

Everything downstream (anchors, structure functions, metrics, forms) is a
:class:`Poly` with :class:`fractions.Fraction` coefficients, so every axiom
check reduces to testing a polynomial for zero.

Charts are ordered tuples of coordinate names with a group tag per name.
The tags ``transverse`` and ``leaf`` make up the base manifold in adapted
coordinates (x^a, y^u); any other tag marks auxiliary fiber or parameter
coordinates (eta, zeta, xi, dotted groups, a deformation parameter t).
A chart whose variable list starts with another chart's variables (same
tags) *extends* it, and polynomials are promoted silently along
extensions.

Schouten-Nijenhuis sign convention: on decomposable multivectors

    [X1^...^Xp, Y1^...^Yq] = sum_{i,j} (-1)^(i+j) [Xi,Yj] ^ X1..^Xi..^Xp ^ Y1..^Yj..^Yq

so that [X, Y] is the Lie bracket of vector fields and a bivector P is
Poisson exactly when [P, P] = 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

TRANSVERSE = "transverse"
LEAF = "leaf"
BASE_TAGS = (TRANSVERSE, LEAF)

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

Scalar = Union[int, Fraction]


class ChartError(ValueError):
    """Unknown coordinate, duplicate name or incompatible charts."""


class ParseError(ValueError):
    """Malformed polynomial text; ``column`` is 1-based."""

    def __init__(self, message: str, text: str = "", column: int = 0):
        self.text = text
        self.column = column
        self.reason = message
        where = f" at column {column}" if column else ""
        super().__init__(f"{message}{where}: {text!r}" if text else message)


@dataclass(frozen=True)
class Chart:
    variables: tuple[str, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.tags):
            raise ChartError("variables and tags differ in length")
        seen = set()
        for name in self.variables:
            if not _NAME_RE.match(name):
                raise ChartError(f"invalid coordinate name {name!r}")
            if name in seen:
                raise ChartError(f"duplicate coordinate name {name!r}")
            seen.add(name)

    @classmethod
    def foliated(cls, transverse: Iterable[str] = (), leaf: Iterable[str] = ()) -> Chart:
        transverse, leaf = tuple(transverse), tuple(leaf)
        return cls(transverse + leaf, (TRANSVERSE,) * len(transverse) + (LEAF,) * len(leaf))

    def extend(self, names: Iterable[str], tag: str) -> Chart:
        names = tuple(names)
        return Chart(self.variables + names, self.tags + (tag,) * len(names))

    def drop(self, names: Iterable[str]) -> Chart:
        names = set(names)
        for name in names:
            self.index(name)
        kept = [(v, t) for v, t in zip(self.variables, self.tags) if v not in names]
        return Chart(tuple(v for v, _ in kept), tuple(t for _, t in kept))

    @cached_property
    def _index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.variables)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ChartError(f"unknown coordinate {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def group(self, tag: str) -> tuple[str, ...]:
        return tuple(v for v, t in zip(self.variables, self.tags) if t == tag)

    def tag_of(self, name: str) -> str:
        return self.tags[self.index(name)]

    @property
    def transverse(self) -> tuple[str, ...]:
        return self.group(TRANSVERSE)

    @property
    def leaf(self) -> tuple[str, ...]:
        return self.group(LEAF)

    @cached_property
    def base(self) -> tuple[str, ...]:
        return tuple(v for v, t in zip(self.variables, self.tags) if t in BASE_TAGS)

    def fresh(self, stem: str, count: int) -> tuple[str, ...]:
        """``count`` names ``stem1..`` that do not clash with this chart."""
        while any(f"{stem}{i}" in self for i in range(1, count + 1)):
            stem = stem + "_"
        return tuple(f"{stem}{i}" for i in range(1, count + 1))

    def extends(self, other: Chart) -> bool:
        k = len(other.variables)
        return self.variables[:k] == other.variables and self.tags[:k] == other.tags

    def base_chart(self) -> Chart:
        return Chart(self.base, tuple(self.tag_of(v) for v in self.base))

    def poly(self, text: str) -> Poly:
        return parse_poly(text, self)

    def var(self, name: str) -> Poly:
        i = self.index(name)
        exps = [0] * len(self.variables)
        exps[i] = 1
        return Poly(self, {tuple(exps): Fraction(1)})

    def const(self, c: Scalar) -> Poly:
        return Poly(self, {(0,) * len(self.variables): Fraction(c)})

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def monomials(self, names: Sequence[str], max_degree: int) -> list[Poly]:
        """All monic monomials in ``names`` of total degree <= max_degree."""
        idx = [self.index(n) for n in names]
        out = []
        for deg in range(max_degree + 1):
            for combo in _compositions(deg, len(idx)):
                exps = [0] * len(self.variables)
                for i, e in zip(idx, combo):
                    exps[i] = e
                out.append(Poly(self, {tuple(exps): Fraction(1)}))
        return out

    def __str__(self):
        parts = []
        for tag in dict.fromkeys(self.tags):
            parts.append(f"{tag}: {', '.join(self.group(tag))}")
        return "{" + "; ".join(parts) + "}"


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _pad(terms: Mapping[tuple, Fraction], extra: int) -> dict:
    if not extra:
        return dict(terms)
    z = (0,) * extra
    return {e + z: c for e, c in terms.items()}


def common_chart(a: Chart, b: Chart) -> Chart:
    if a is b or a == b:
        return a
    if a.extends(b):
        return a
    if b.extends(a):
        return b
    raise ChartError(f"chart mismatch: {a} vs {b}")


class Poly:
    """Multivariate polynomial with exact rational coefficients."""

    __slots__ = ("chart", "terms", "_hash")

    def __init__(self, chart: Chart, terms: Mapping[tuple, Scalar] | None = None):
        self.chart = chart
        clean = {}
        if terms:
            n = len(chart.variables)
            for exps, c in terms.items():
                if len(exps) != n:
                    raise ChartError("exponent vector length does not match chart")
                if c:
                    clean[tuple(exps)] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, chart: Chart, terms: dict) -> Poly:
        p = object.__new__(cls)
        p.chart = chart
        p.terms = terms
        p._hash = None
        return p

    # -- coercion ---------------------------------------------------------

    def on(self, chart: Chart) -> Poly:
        """Promote to an extension chart (pads exponent vectors)."""
        if chart is self.chart or chart == self.chart:
            return self
        if not chart.extends(self.chart):
            raise ChartError(f"{chart} does not extend {self.chart}")
        return Poly._raw(chart, _pad(self.terms, len(chart.variables) - len(self.chart.variables)))

    def _coerce(self, other) -> tuple[Poly, Poly]:
        if isinstance(other, Poly):
            chart = common_chart(self.chart, other.chart)
            return self.on(chart), other.on(chart)
        if isinstance(other, (int, Fraction)):
            return self, self.chart.const(other)
        return NotImplemented, NotImplemented

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Poly._raw(a.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.chart, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw(self.chart, {})
            return Poly._raw(self.chart, {e: c * other for e, c in self.terms.items()})
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        if not a.terms or not b.terms:
            return Poly._raw(a.chart, {})
        out: dict = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Poly._raw(a.chart, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self.chart.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        try:
            a, b = self._coerce(other)
        except ChartError:
            return False
        return a.terms == b.terms

    def __hash__(self):
        if self._hash is None:
            items = []
            for e, c in self.terms.items():
                k = len(e)
                while k and not e[k - 1]:
                    k -= 1
                items.append((e[:k], c))
            self._hash = hash(frozenset(items))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.chart.variables), Fraction(0))

    # -- structure ----------------------------------------------------------

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, names: Iterable[str]) -> int:
        idx = [self.chart.index(n) for n in names]
        return max((sum(e[i] for i in idx) for e in self.terms), default=-1)

    def variables_used(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return tuple(self.chart.variables[i] for i in sorted(used))

    def depends_on(self, names: Iterable[str]) -> bool:
        idx = [self.chart.index(n) for n in names if n in self.chart]
        return any(e[i] for e in self.terms for i in idx)

    def is_foliated(self) -> bool:
        """True iff every leaf partial vanishes."""
        return not self.depends_on(self.chart.leaf)

    def partial(self, name: str) -> Poly:
        i = self.chart.index(name)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly._raw(self.chart, out)

    def subs(self, values: Mapping[str, Union[Poly, Scalar]]) -> Poly:
        """Substitute polynomials or scalars for coordinates."""
        if not values:
            return self
        idx = {self.chart.index(n): v for n, v in values.items()}
        result = self.chart.zero()
        powers: dict = {}
        for e, c in self.terms.items():
            kept = tuple(0 if i in idx else x for i, x in enumerate(e))
            term = Poly._raw(self.chart, {kept: c})
            for i, v in idx.items():
                if e[i]:
                    key = (i, e[i])
                    if key not in powers:
                        base = v if isinstance(v, Poly) else self.chart.const(v)
                        powers[key] = base ** e[i]
                    term = term * powers[key]
            result = result + term
        return result

    def at_zero(self, names: Iterable[str]) -> Poly:
        """Set the named coordinates to 0 (keeps the chart)."""
        idx = [self.chart.index(n) for n in names]
        return Poly._raw(self.chart, {e: c for e, c in self.terms.items() if not any(e[i] for i in idx)})

    def restrict(self, chart: Chart) -> Poly:
        """Restrict to a sub-chart: coordinates missing from ``chart`` become 0."""
        keep = []
        for name in chart.variables:
            keep.append(self.chart.index(name))
        dropped = [i for i in range(len(self.chart.variables)) if i not in set(keep)]
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in dropped):
                continue
            out[tuple(e[i] for i in keep)] = c
        return Poly._raw(chart, out)

    def integrate_unit(self, name: str) -> Poly:
        """Definite integral over [0, 1] in the named coordinate."""
        i = self.chart.index(name)
        out: dict = {}
        for e, c in self.terms.items():
            ne = e[:i] + (0,) + e[i + 1:]
            s = out.get(ne, 0) + c / (e[i] + 1)
            if s:
                out[ne] = s
            else:
                out.pop(ne, None)
        return Poly._raw(self.chart, out)

    def coefficient(self, name: str, power: int) -> Poly:
        """Coefficient of name^power, as a polynomial free of ``name``."""
        i = self.chart.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i] == power:
                out[e[:i] + (0,) + e[i + 1:]] = c
        return Poly._raw(self.chart, out)

    def leading(self) -> tuple[tuple, Fraction]:
        e = max(self.terms)
        return e, self.terms[e]

    def divide_exact(self, other: Poly) -> Poly | None:
        """Quotient if ``other`` divides ``self`` exactly, else None."""
        a, b = self._coerce(other)
        if not b.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e, lead_c = b.leading()
        rem = dict(a.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            if any(x < y for x, y in zip(e, lead_e)):
                return None
            q_e = tuple(x - y for x, y in zip(e, lead_e))
            q_c = rem[e] / lead_c
            quot[q_e] = q_c
            for be, bc in b.terms.items():
                te = tuple(x + y for x, y in zip(q_e, be))
                s = rem.get(te, 0) - q_c * bc
                if s:
                    rem[te] = s
                else:
                    rem.pop(te, None)
        return Poly._raw(a.chart, quot)

    # -- printing -----------------------------------------------------------

    def sorted_terms(self) -> list[tuple[tuple, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def _monomial_str(self, e) -> str:
        parts = []
        for name, k in zip(self.chart.variables, e):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for n, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(e)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if n == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"Poly({str(self)!r})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1) + 1))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2) + 1))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*/^":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3) + 1)
            tokens.append((ch, ch, m.start(3) + 1))
        pos = m.end()
    return tokens


class _PolyParser:
    def __init__(self, text: str, chart: Chart):
        self.text = text
        self.chart = chart
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text) + 1)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def parse(self) -> Poly:
        if not self.tokens:
            self.fail("empty polynomial")
        total = self.term(first=True)
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            t = self.term(first=False)
            total = total + t if op == "+" else total - t
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return total

    def term(self, first: bool) -> Poly:
        sign = 1
        # a signed integer is part of the rational; a lone sign before a
        # variable is accepted as shorthand for -1*var
        while self.peek()[0] in ("+", "-") and self.peek()[0] != "end":
            if self.take()[0] == "-":
                sign = -sign
        kind = self.peek()[0]
        if kind == "int":
            coeff = self.rational()
            result = self.chart.const(coeff * sign)
            while self.peek()[0] == "*":
                self.take()
                result = result * self.factor()
            return result
        if kind == "name":
            result = self.factor()
            while self.peek()[0] == "*":
                self.take()
                result = result * self.factor()
            return result * sign
        self.fail("expected a rational or a variable")

    def rational(self) -> Fraction:
        num = int(self.take()[1])
        if self.peek()[0] == "/":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                self.fail("malformed rational: expected unsigned denominator")
            self.take()
            den = int(tok[1])
            if den == 0:
                self.fail("malformed rational: zero denominator", tok)
            return Fraction(num, den)
        return Fraction(num)

    def factor(self) -> Poly:
        tok = self.peek()
        if tok[0] != "name":
            self.fail("expected a variable")
        self.take()
        if tok[1] not in self.chart:
            raise ParseError(f"unknown variable {tok[1]!r}", self.text, tok[2])
        var = self.chart.var(tok[1])
        if self.peek()[0] == "^":
            self.take()
            exp_tok = self.peek()
            if exp_tok[0] != "int":
                self.fail("malformed exponent: expected unsigned integer")
            self.take()
            return var ** int(exp_tok[1])
        return var


def parse_poly(text: str, chart: Chart) -> Poly:
    """Parse ``text`` (grammar in the README) into a polynomial on ``chart``."""
    return _PolyParser(text, chart).parse()


# ---------------------------------------------------------------------------
# vector fields as coefficient tuples over a coordinate list


def apply_field(field: Sequence[Poly], coords: Sequence[str], f: Poly) -> Poly:
    """X(f) for X = sum field[i] d/d coords[i]."""
    out = None
    for c, name in zip(field, coords):
        if c.is_zero():
            continue
        d = f.partial(name) if name in f.chart else None
        if d is None or d.is_zero():
            continue
        term = c * d
        out = term if out is None else out + term
    return f.chart.zero() if out is None else out


def field_bracket(X: Sequence[Poly], Y: Sequence[Poly], coords: Sequence[str]) -> tuple[Poly, ...]:
    """Lie bracket [X, Y] of vector fields given by components over coords."""
    return tuple(apply_field(X, coords, Y[i]) - apply_field(Y, coords, X[i]) for i in range(len(coords)))


# ---------------------------------------------------------------------------
# alternating tensors: multivectors, differential forms, algebroid forms


def sort_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """(sign, sorted) for a tuple of indices; sign 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class Alternating:
    """Antisymmetric coefficient array of polynomials.

    Coefficients are stored only on strictly increasing index tuples; other
    orders are resolved by the permutation sign on access.  Forms use the
    determinant convention (e^1 ^ e^2)(e_1, e_2) = 1, so the stored
    coefficient is the value on the sorted basis tuple.
    """

    __slots__ = ("chart", "dim", "degree", "coeffs")

    def __init__(self, chart: Chart, dim: int, degree: int, coeffs: Mapping[tuple, Poly] | None = None):
        if degree < 0:
            raise ValueError("negative degree")
        self.chart = chart
        self.dim = dim
        self.degree = degree
        clean = {}
        for idx, c in (coeffs or {}).items():
            if len(idx) != degree:
                raise ValueError(f"index tuple {idx} has wrong length for degree {degree}")
            if any(i < 0 or i >= dim for i in idx):
                raise IndexError(f"index tuple {idx} out of range")
            sign, key = sort_sign(idx)
            if sign == 0 or c.is_zero():
                continue
            c = c.on(common_chart(chart, c.chart)) if c.chart != chart else c
            if c.chart != chart:
                chart = c.chart
            prev = clean.get(key)
            val = c * sign if prev is None else prev + c * sign
            if val.is_zero():
                clean.pop(key, None)
            else:
                clean[key] = val
        self.chart = chart
        self.coeffs = {k: v.on(chart) for k, v in clean.items()}

    def _new(self, degree, coeffs, chart=None):
        return type(self)(chart or self.chart, self.dim, degree, coeffs)

    def __getitem__(self, idx) -> Poly:
        if isinstance(idx, int):
            idx = (idx,)
        sign, key = sort_sign(idx)
        if sign == 0:
            return self.chart.zero()
        c = self.coeffs.get(key)
        return self.chart.zero() if c is None else (c if sign > 0 else -c)

    def _check(self, other):
        if type(other) is not type(self) or other.dim != self.dim:
            raise ChartError(f"incompatible operands {type(self).__name__}/{type(other).__name__}")
        return common_chart(self.chart, other.chart)

    def __add__(self, other):
        chart = self._check(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = {k: v.on(chart) for k, v in self.coeffs.items()}
        for k, v in other.coeffs.items():
            s = out[k] + v if k in out else v.on(chart)
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return self._new(self.degree, out, chart)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f: Union[Poly, Scalar]) -> Alternating:
        return self._new(self.degree, {k: v * f for k, v in self.coeffs.items()})

    def __mul__(self, f):
        if isinstance(f, (Poly, int, Fraction)):
            return self.scale(f)
        return NotImplemented

    __rmul__ = __mul__

    def wedge(self, other: Alternating) -> Alternating:
        chart = self._check(other)
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                sign, key = sort_sign(k1 + k2)
                if sign == 0:
                    continue
                term = v1 * v2 * sign
                if key in out:
                    s = out[key] + term
                    if s.is_zero():
                        del out[key]
                    else:
                        out[key] = s
                else:
                    out[key] = term
        return self._new(self.degree + other.degree, out, chart)

    def __xor__(self, other):
        return self.wedge(other)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.dim == other.dim and self.degree == other.degree and (self - other).is_zero() if self.degree == other.degree else False

    def __hash__(self):
        return hash((self.dim, self.degree, frozenset(self.coeffs.items())))

    def map_coeffs(self, fn) -> Alternating:
        return self._new(self.degree, {k: fn(v) for k, v in self.coeffs.items()})

    def max_coeff_degree(self) -> int:
        return max((v.degree() for v in self.coeffs.values()), default=-1)

    def items(self) -> list[tuple[tuple[int, ...], Poly]]:
        return sorted(self.coeffs.items())

    def _label(self, idx) -> str:
        return "^".join(f"e{i + 1}" for i in idx) or "1"

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({v})*{self._label(k)}" for k, v in self.items())

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, {self})"

    @classmethod
    def basis(cls, chart: Chart, dim: int, indices: Sequence[int], coeff: Poly | None = None):
        return cls(chart, dim, len(indices), {tuple(indices): coeff if coeff is not None else chart.one()})


class Multivector(Alternating):
    """Multivector field on all coordinates of a chart (fiber ones included)."""

    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple, Poly] | None = None, dim: int | None = None):
        super().__init__(chart, len(chart.variables), degree, coeffs)

    def _new(self, degree, coeffs, chart=None):
        return Multivector(chart or self.chart, degree, coeffs)

    def _check(self, other):
        if not isinstance(other, Multivector):
            raise ChartError("expected a Multivector")
        return common_chart(self.chart, other.chart)

    def on(self, chart: Chart) -> Multivector:
        return Multivector(chart, self.degree, {k: v.on(chart) for k, v in self.coeffs.items()})

    @classmethod
    def field(cls, chart: Chart, components: Mapping[str, Poly]) -> Multivector:
        return cls(chart, 1, {(chart.index(n),): c for n, c in components.items()})

    @classmethod
    def from_function(cls, f: Poly) -> Multivector:
        return cls(f.chart, 0, {(): f})

    def _label(self, idx) -> str:
        return "^".join(f"d/d{self.chart.variables[i]}" for i in idx) or "1"

    def components(self) -> tuple[Poly, ...]:
        if self.degree != 1:
            raise ValueError("components() is for vector fields")
        return tuple(self[i] for i in range(self.dim))

    def apply(self, f: Poly) -> Poly:
        """X(f) for a vector field."""
        if self.degree != 1:
            raise ValueError("apply() needs a vector field")
        chart = common_chart(self.chart, f.chart)
        f = f.on(chart)
        return apply_field([self[i].on(chart) for i in range(self.dim)], self.chart.variables, f)

    def bracket_functions(self, f: Poly, g: Poly) -> Poly:
        """P(df, dg) for a bivector P; the induced Poisson bracket {f, g}."""
        if self.degree != 2:
            raise ValueError("bracket_functions() needs a bivector")
        chart = common_chart(common_chart(self.chart, f.chart), g.chart)
        f, g = f.on(chart), g.on(chart)
        out = chart.zero()
        names = self.chart.variables
        for (i, j), c in self.coeffs.items():
            fi, fj = f.partial(names[i]), f.partial(names[j])
            gi, gj = g.partial(names[i]), g.partial(names[j])
            out = out + c * (fi * gj - fj * gi)
        return out

    def contract(self, f: Poly) -> Multivector:
        """[P, f]: derivation action of a multivector on a function."""
        chart = common_chart(self.chart, f.chart)
        p = self.degree
        out: dict = {}
        names = self.chart.variables
        for idx, c in self.coeffs.items():
            for a, i in enumerate(idx):
                d = f.on(chart).partial(names[i])
                if d.is_zero():
                    continue
                rest = idx[:a] + idx[a + 1:]
                sign = -1 if (p - 1 - a) % 2 else 1
                term = c * d * sign
                out[rest] = out[rest] + term if rest in out else term
        return Multivector(chart, p - 1, out)


def _decompose(term_idx: tuple[int, ...], coeff: Poly, chart: Chart) -> list[Multivector]:
    """Write coeff * d_{i1}^...^d_{ip} as a list of vector fields."""
    fields = []
    for a, i in enumerate(term_idx):
        c = coeff if a == 0 else chart.one()
        fields.append(Multivector(chart, 1, {(i,): c}))
    return fields


def _wedge_all(fields: Sequence[Multivector], chart: Chart) -> Multivector:
    out = Multivector(chart, 0, {(): chart.one()})
    for f in fields:
        out = out.wedge(f)
    return out


def _vf_bracket(X: Multivector, Y: Multivector) -> Multivector:
    chart = common_chart(X.chart, Y.chart)
    names = chart.variables
    comps = field_bracket(
        [X[i].on(chart) for i in range(len(names))],
        [Y[i].on(chart) for i in range(len(names))],
        names,
    )
    return Multivector(chart, 1, {(i,): c for i, c in enumerate(comps)})


def schouten(P: Multivector, Q: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket, degree p + q - 1 (see module docstring)."""
    chart = common_chart(P.chart, Q.chart)
    P, Q = P.on(chart), Q.on(chart)
    p, q = P.degree, Q.degree
    if p == 0 and q == 0:
        return Multivector(chart, 0, {})
    if q == 0:
        return P.contract(Q[()])
    if p == 0:
        # [f, Q] = -(-1)^((p-1)(q-1)) [Q, f] with p = 0
        return Q.contract(P[()]) * (-1 if q % 2 else 1)
    total = Multivector(chart, p + q - 1, {})
    for I, f in P.coeffs.items():
        Xs = _decompose(I, f, chart)
        for J, g in Q.coeffs.items():
            Ys = _decompose(J, g, chart)
            for a in range(p):
                for b in range(q):
                    br = _vf_bracket(Xs[a], Ys[b])
                    if br.is_zero():
                        continue
                    rest = Xs[:a] + Xs[a + 1:] + Ys[:b] + Ys[b + 1:]
                    term = br.wedge(_wedge_all(rest, chart))
                    total = total + (term if (a + b) % 2 == 0 else -term)
    return total


class DiffForm(Alternating):
    """Differential form in dx^i over all coordinates of a chart."""

    __slots__ = ()

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple, Poly] | None = None, dim: int | None = None):
        super().__init__(chart, len(chart.variables), degree, coeffs)

    def _new(self, degree, coeffs, chart=None):
        return DiffForm(chart or self.chart, degree, coeffs)

    def _check(self, other):
        if not isinstance(other, DiffForm):
            raise ChartError("expected a DiffForm")
        return common_chart(self.chart, other.chart)

    def _label(self, idx) -> str:
        return "^".join(f"d{self.chart.variables[i]}" for i in idx) or "1"

    @classmethod
    def function(cls, f: Poly) -> DiffForm:
        return cls(f.chart, 0, {(): f})

    @classmethod
    def one_form(cls, chart: Chart, components: Sequence[Poly], coords: Sequence[str] | None = None) -> DiffForm:
        coords = coords or chart.variables
        return cls(chart, 1, {(chart.index(n),): c for n, c in zip(coords, components)})

    def d(self) -> DiffForm:
        names = self.chart.variables
        out: dict = {}
        for idx, c in self.coeffs.items():
            for i, name in enumerate(names):
                dc = c.partial(name)
                if dc.is_zero():
                    continue
                sign, key = sort_sign((i,) + idx)
                if sign == 0:
                    continue
                term = dc * sign
                out[key] = out[key] + term if key in out else term
        return DiffForm(self.chart, self.degree + 1, out)

    def interior(self, field: Sequence[Poly], coords: Sequence[str] | None = None) -> DiffForm:
        """i(X) of the form; X given by components over coords."""
        coords = coords or self.chart.variables
        comp = {self.chart.index(n): c for n, c in zip(coords, field)}
        out: dict = {}
        for idx, c in self.coeffs.items():
            for a, i in enumerate(idx):
                x = comp.get(i)
                if x is None or x.is_zero():
                    continue
                rest = idx[:a] + idx[a + 1:]
                term = c * x * (-1 if a % 2 else 1)
                out[rest] = out[rest] + term if rest in out else term
        return DiffForm(self.chart, self.degree - 1, out)

    def lie(self, field: Sequence[Poly], coords: Sequence[str] | None = None) -> DiffForm:
        """Cartan formula L_X = i_X d + d i_X."""
        inner = self.d().interior(field, coords)
        if self.degree == 0:
            return inner
        return inner + self.interior(field, coords).d()

    def components(self, coords: Sequence[str] | None = None) -> tuple[Poly, ...]:
        if self.degree != 1:
            raise ValueError("components() is for 1-forms")
        coords = coords or self.chart.variables
        return tuple(self[self.chart.index(n)] for n in coords)


def all_index_tuples(dim: int, degree: int) -> list[tuple[int, ...]]:
    return list(combinations(range(dim), degree))
