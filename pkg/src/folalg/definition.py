"""Definition files: a small block language for charts, algebroids and their data.

    # comment
    chart {
      transverse: x1, x2
      leaf: y
    }
    algebroid {
      rank: 3
      anchor: [0, 0, 1; 0, x1, 0; -x1, 0, 0]
      bracket 2 3: [0, 1, 0]
    }
    foliation {
      B: [1, 0, 0]
      C: [0, 1, 0; 0, 0, 1]
    }

Matrices are written ``[a, b; c, d]`` and may continue over several lines
until the closing bracket.  Indices in keys are 1-based.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .algebroid import LieAlgebroid
from .courant import CourantAlgebroid, CourantFoliation, standard_courant
from .foliation import FoliatedPair, parameter_chart
from .ring import Chart, ChartError, DiffForm, ParseError, Poly, parse_poly

Matrix = tuple[tuple[Poly, ...], ...]


class DefinitionError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<input>"):
        self.message, self.line, self.column, self.source = message, line, column, source
        where = f"{source}:{line}:{column}" if line else source
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class AlgebroidSpec:
    rank: int
    anchor: Matrix
    structure: tuple[tuple[tuple[int, int], tuple[Poly, ...]], ...] = ()
    labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class CourantSpec:
    standard: bool
    rank: int
    metric: Matrix = ()
    anchor: Matrix = ()
    structure: tuple[tuple[tuple[int, int], tuple[Poly, ...]], ...] = ()
    twist: tuple[tuple[tuple[int, int, int], Poly], ...] = ()
    labels: tuple[str, ...] = ()


@dataclass(frozen=True)
class FoliationSpec:
    B: Matrix = ()
    C: Matrix = ()
    witness: Matrix = ()
    S: Matrix = ()
    Bprime: Matrix = ()


@dataclass(frozen=True)
class DeformationSpec:
    parameter: str
    theta: Matrix


@dataclass(frozen=True)
class ConnectionSpec:
    name: str
    rank: int
    gamma: tuple[Matrix, ...]


@dataclass(frozen=True)
class BundleSpec:
    kind: str
    rank: int
    nabla: tuple[Matrix, ...] = ()


@dataclass(frozen=True)
class DefinitionFile:
    chart: Chart
    algebroid: AlgebroidSpec | None = None
    courant: CourantSpec | None = None
    foliation: FoliationSpec | None = None
    deformation: DeformationSpec | None = None
    connections: tuple[ConnectionSpec, ...] = ()
    bundle: BundleSpec | None = None
    submanifold: tuple[str, ...] | None = None
    source: str = field(default="<input>", compare=False)

    # builders

    def lie_algebroid(self) -> LieAlgebroid:
        if self.algebroid is None:
            raise DefinitionError("no algebroid block", source=self.source)
        a = self.algebroid
        return LieAlgebroid(self.chart, a.rank, a.anchor, dict(a.structure), a.labels)

    def courant_algebroid(self) -> CourantAlgebroid:
        if self.courant is None:
            raise DefinitionError("no courant block", source=self.source)
        c = self.courant
        if c.standard:
            phi = None
            if c.twist:
                phi = DiffForm(self.chart, 3, dict(c.twist))
            return standard_courant(self.chart, phi)
        return CourantAlgebroid(self.chart, c.rank, c.metric, c.anchor, dict(c.structure), c.labels)

    def foliated_pair(self) -> FoliatedPair:
        f = self._fol()
        return FoliatedPair(self.lie_algebroid(), f.B, f.C, f.witness)

    def courant_foliation(self) -> CourantFoliation:
        f = self._fol()
        return CourantFoliation(self.courant_algebroid(), f.B, f.witness, f.S or None, f.Bprime or None)

    def _fol(self) -> FoliationSpec:
        if self.foliation is None:
            raise DefinitionError("no foliation block", source=self.source)
        return self.foliation


# ---------------------------------------------------------------------------
# lexing


@dataclass
class _Entry:
    key: str
    words: list[str]
    value: str
    positions: list[tuple[int, int]]  # (line, column) of each value character
    line: int
    column: int


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    entries: list[_Entry]


_HEADER_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)(?:\s+([A-Za-z][A-Za-z0-9_]*))?\s*\{\s*$")


def _strip_comment(text: str) -> str:
    i = text.find("#")
    return text if i < 0 else text[:i]


def _lex(text: str, source: str) -> list[_Block]:
    lines = text.split("\n")
    blocks: list[_Block] = []
    current: _Block | None = None
    i = 0
    while i < len(lines):
        raw = _strip_comment(lines[i])
        lineno = i + 1
        i += 1
        if not raw.strip():
            continue
        if current is None:
            m = _HEADER_RE.match(raw)
            if not m:
                col = len(raw) - len(raw.lstrip()) + 1
                raise DefinitionError("expected a block header 'name {'", lineno, col, source)
            current = _Block(m.group(1), m.group(2) or "", lineno, [])
            continue
        if raw.strip() == "}":
            blocks.append(current)
            current = None
            continue
        colon = raw.find(":")
        indent = len(raw) - len(raw.lstrip())
        if colon < 0:
            raise DefinitionError("expected 'key: value'", lineno, indent + 1, source)
        key_text = raw[:colon].strip()
        words = key_text.split()
        value_chars, positions = [], []
        start = colon + 1
        segment, seg_line = raw[start:], lineno
        depth = 0
        while True:
            for j, ch in enumerate(segment):
                value_chars.append(ch)
                positions.append((seg_line, start + j + 1))
                if ch == "[":
                    depth += 1
                elif ch == "]":
                    depth -= 1
            if depth <= 0:
                break
            if i >= len(lines):
                raise DefinitionError("unterminated matrix", lineno, colon + 2, source)
            value_chars.append(" ")
            positions.append((seg_line, start + len(segment) + 1))
            segment, seg_line, start = _strip_comment(lines[i]), i + 1, 0
            i += 1
        value = "".join(value_chars)
        lead = len(value) - len(value.lstrip())
        value = value.strip()
        positions = positions[lead:lead + len(value)]
        current.entries.append(_Entry(words[0] if words else "", words, value, positions, lineno, indent + 1))
    if current is not None:
        raise DefinitionError(f"block '{current.kind}' is not closed", current.line, 1, source)
    return blocks


# ---------------------------------------------------------------------------
# values


class _Ctx:
    def __init__(self, source: str):
        self.source = source

    def err(self, message: str, entry: _Entry | None = None, offset: int = 0, line: int = 0) -> DefinitionError:
        if entry is None:
            return DefinitionError(message, line, 1, self.source)
        if offset < 0:
            return DefinitionError(message, entry.line, entry.column, self.source)
        if entry.positions:
            offset = max(0, min(offset, len(entry.positions) - 1))
            ln, col = entry.positions[offset]
        else:
            ln, col = entry.line, entry.column
        return DefinitionError(message, ln, col, self.source)

    def poly(self, text: str, chart: Chart, entry: _Entry, offset: int) -> Poly:
        stripped = text.strip()
        lead = len(text) - len(text.lstrip())
        try:
            return parse_poly(stripped, chart)
        except ParseError as exc:
            raise self.err(exc.reason, entry, offset + lead + max(exc.column - 1, 0)) from None

    def integer(self, entry: _Entry) -> int:
        try:
            value = int(entry.value)
        except ValueError:
            raise self.err(f"'{entry.key}' expects a non-negative integer", entry) from None
        if value < 0:
            raise self.err(f"'{entry.key}' expects a non-negative integer", entry)
        return value

    def names(self, entry: _Entry) -> tuple[str, ...]:
        if not entry.value:
            return ()
        out, offset = [], 0
        for part in entry.value.split(","):
            name = part.strip()
            if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
                raise self.err(f"invalid name {name!r}", entry, offset + len(part) - len(part.lstrip()))
            out.append(name)
            offset += len(part) + 1
        return tuple(out)

    def matrix(self, entry: _Entry, chart: Chart) -> Matrix:
        text = entry.value
        if not (text.startswith("[") and text.endswith("]")):
            raise self.err("expected a matrix '[a, b; c, d]'", entry)
        body = text[1:-1]
        if not body.strip():
            return ()
        rows, offset = [], 1
        for row_text in body.split(";"):
            row, col_offset = [], offset
            for cell in row_text.split(","):
                if not cell.strip():
                    raise self.err("empty matrix entry", entry, col_offset)
                row.append(self.poly(cell, chart, entry, col_offset))
                col_offset += len(cell) + 1
            rows.append(tuple(row))
            offset += len(row_text) + 1
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise self.err("matrix rows have different lengths", entry)
        return tuple(rows)

    def shape(self, M: Matrix, rows: int, cols: int, entry: _Entry, what: str):
        if len(M) != rows or any(len(r) != cols for r in M):
            got_cols = len(M[0]) if M else 0
            raise self.err(f"{what} must be {rows}x{cols}, got {len(M)}x{got_cols}", entry)

    def indices(self, entry: _Entry, count: int, bound: int) -> tuple[int, ...]:
        words = entry.words[1:]
        if len(words) != count:
            raise self.err(f"'{entry.key}' expects {count} index(es)", entry)
        out = []
        for w in words:
            if not w.isdigit() or not 1 <= int(w) <= bound:
                raise self.err(f"index {w!r} out of range 1..{bound}", entry)
            out.append(int(w) - 1)
        return tuple(out)


_KEYS = {
    "chart": {"transverse", "leaf"},
    "algebroid": {"rank", "labels", "anchor", "bracket"},
    "courant": {"standard", "rank", "labels", "metric", "anchor", "bracket", "twist"},
    "foliation": {"B", "C", "witness", "S", "Bprime"},
    "deformation": {"parameter", "theta"},
    "connection": {"rank", "gamma"},
    "bundle": {"kind", "rank", "nabla"},
    "submanifold": {"remove"},
}
_INDEXED = {"bracket", "twist", "gamma", "nabla"}


def _entries(ctx: _Ctx, block: _Block) -> dict[str, list[_Entry]]:
    allowed = _KEYS[block.kind]
    out: dict[str, list[_Entry]] = {}
    for e in block.entries:
        if e.key not in allowed:
            raise ctx.err(f"unknown key '{e.key}' in block '{block.kind}'", e, offset=-1)
        if e.key not in _INDEXED and len(e.words) != 1:
            raise ctx.err(f"key '{e.key}' takes no indices", e, offset=-1)
        if e.key not in _INDEXED and e.key in out:
            raise ctx.err(f"duplicate key '{e.key}'", e, offset=-1)
        out.setdefault(e.key, []).append(e)
    return out


def _one(ctx, entries, key, block, required=True) -> _Entry | None:
    found = entries.get(key)
    if not found:
        if required:
            raise ctx.err(f"block '{block.kind}' needs '{key}'", None, line=block.line)
        return None
    return found[0]


def _structure(ctx, entries, chart, rank) -> tuple:
    seen = {}
    for e in entries.get("bracket", []):
        h, k = ctx.indices(e, 2, rank)
        if h == k:
            raise ctx.err("bracket indices must differ", e)
        vec = ctx.matrix(e, chart)
        ctx.shape(vec, 1, rank, e, "bracket vector")
        vec = vec[0]
        if h > k:
            h, k, vec = k, h, tuple(-c for c in vec)
        if (h, k) in seen:
            raise ctx.err(f"bracket {h + 1} {k + 1} given twice", e)
        seen[(h, k)] = vec
    return tuple(sorted(seen.items()))


def parse_definition_text(text: str, source: str = "<input>") -> DefinitionFile:
    ctx = _Ctx(source)
    blocks = _lex(text, source)
    if not blocks or blocks[0].kind != "chart":
        raise DefinitionError("the first block must be 'chart'", blocks[0].line if blocks else 1, 1, source)
    parts: dict = {"connections": []}
    chart = None
    for block in blocks:
        if block.kind not in _KEYS:
            raise ctx.err(f"unknown block '{block.kind}'", None, line=block.line)
        if block.kind != "connection" and block.name:
            raise ctx.err(f"block '{block.kind}' takes no name", None, line=block.line)
        if block.kind in parts and block.kind != "connection":
            raise ctx.err(f"duplicate block '{block.kind}'", None, line=block.line)
        entries = _entries(ctx, block)
        if block.kind == "chart":
            t = _one(ctx, entries, "transverse", block, False)
            l = _one(ctx, entries, "leaf", block, False)
            try:
                chart = Chart.foliated(ctx.names(t) if t else (), ctx.names(l) if l else ())
            except ChartError as exc:
                raise ctx.err(str(exc), t or l, line=block.line) from None
            parts["chart"] = chart
        elif block.kind == "algebroid":
            parts["algebroid"] = _parse_algebroid(ctx, block, entries, chart)
        elif block.kind == "courant":
            parts["courant"] = _parse_courant(ctx, block, entries, chart)
        elif block.kind == "foliation":
            parts["foliation"] = _parse_foliation(ctx, block, entries, chart, parts)
        elif block.kind == "deformation":
            parts["deformation"] = _parse_deformation(ctx, block, entries, chart, parts)
        elif block.kind == "connection":
            parts["connections"].append(_parse_connection(ctx, block, entries, chart, parts))
        elif block.kind == "bundle":
            parts["bundle"] = _parse_bundle(ctx, block, entries, chart, parts)
        elif block.kind == "submanifold":
            e = _one(ctx, entries, "remove", block, False)
            names = ctx.names(e) if e else ()
            for n in names:
                if n not in chart:
                    raise ctx.err(f"unknown coordinate {n!r}", e)
            parts["submanifold"] = names
    if "algebroid" in parts and "courant" in parts:
        raise ctx.err("a file describes either an algebroid or a courant algebroid", None, line=1)
    parts["connections"] = tuple(parts["connections"])
    names = [c.name for c in parts["connections"]]
    if len(set(names)) != len(names):
        raise ctx.err("connection names must be distinct", None, line=1)
    model = DefinitionFile(source=source, **parts)
    _validate(ctx, model, blocks)
    return model


def _parse_algebroid(ctx, block, entries, chart) -> AlgebroidSpec:
    rank = ctx.integer(_one(ctx, entries, "rank", block))
    e = _one(ctx, entries, "anchor", block, False)
    if e is None:
        anchor = tuple(tuple(chart.zero() for _ in chart.base) for _ in range(rank))
    else:
        anchor = ctx.matrix(e, chart)
        ctx.shape(anchor, rank, len(chart.base), e, "anchor")
    le = _one(ctx, entries, "labels", block, False)
    labels = ctx.names(le) if le else ()
    if labels and len(labels) != rank:
        raise ctx.err(f"{len(labels)} labels for rank {rank}", le)
    return AlgebroidSpec(rank, anchor, _structure(ctx, entries, chart, rank), labels)


def _parse_courant(ctx, block, entries, chart) -> CourantSpec:
    se = _one(ctx, entries, "standard", block, False)
    if se is not None:
        if se.value not in ("yes", "no"):
            raise ctx.err("'standard' expects yes or no", se)
    if se is not None and se.value == "yes":
        for key in ("rank", "metric", "anchor", "bracket", "labels"):
            if key in entries:
                raise ctx.err(f"'{key}' is fixed by the standard structure", entries[key][0])
        m = len(chart.variables)
        twist = {}
        for e in entries.get("twist", []):
            idx = ctx.indices(e, 3, m)
            if len(set(idx)) != 3:
                raise ctx.err("twist indices must be distinct", e)
            order = sorted(range(3), key=lambda a: idx[a])
            sign = 1
            perm = list(order)
            for a in range(3):
                for b in range(a + 1, 3):
                    if perm[a] > perm[b]:
                        sign = -sign
            key = tuple(sorted(idx))
            if key in twist:
                raise ctx.err("twist component given twice", e)
            twist[key] = ctx.poly(e.value, chart, e, 0) * sign
        return CourantSpec(True, 2 * m, twist=tuple(sorted(twist.items())))
    if "twist" in entries:
        raise ctx.err("'twist' applies to the standard structure", entries["twist"][0])
    rank = ctx.integer(_one(ctx, entries, "rank", block))
    me = _one(ctx, entries, "metric", block)
    metric = ctx.matrix(me, chart)
    ctx.shape(metric, rank, rank, me, "metric")
    ae = _one(ctx, entries, "anchor", block)
    anchor = ctx.matrix(ae, chart)
    ctx.shape(anchor, rank, len(chart.base), ae, "anchor")
    le = _one(ctx, entries, "labels", block, False)
    labels = ctx.names(le) if le else ()
    if labels and len(labels) != rank:
        raise ctx.err(f"{len(labels)} labels for rank {rank}", le)
    return CourantSpec(False, rank, metric, anchor, _structure(ctx, entries, chart, rank), (), labels)


def _rank_of(ctx, parts, block) -> int:
    if "algebroid" in parts:
        return parts["algebroid"].rank
    if "courant" in parts:
        return parts["courant"].rank
    raise ctx.err(f"block '{block.kind}' must follow an algebroid or courant block", None, line=block.line)


def _parse_foliation(ctx, block, entries, chart, parts) -> FoliationSpec:
    rank = _rank_of(ctx, parts, block)
    values = {}
    for key in ("B", "C", "witness", "S", "Bprime"):
        e = _one(ctx, entries, key, block, key == "B")
        if e is None:
            values[key] = ()
            continue
        M = ctx.matrix(e, chart)
        if M and len(M[0]) != rank:
            raise ctx.err(f"{key} rows must have {rank} entries, got {len(M[0])}", e)
        values[key] = M
    return FoliationSpec(**values)


def _parse_deformation(ctx, block, entries, chart, parts) -> DeformationSpec:
    pe = _one(ctx, entries, "parameter", block, False)
    name = ctx.names(pe)[0] if pe else "t"
    try:
        pchart = parameter_chart(chart, name)
    except ValueError as exc:
        raise ctx.err(str(exc), pe, line=block.line) from None
    te = _one(ctx, entries, "theta", block)
    return DeformationSpec(name, ctx.matrix(te, pchart))


def _parse_connection(ctx, block, entries, chart, parts) -> ConnectionSpec:
    rank_A = _rank_of(ctx, parts, block)
    v = ctx.integer(_one(ctx, entries, "rank", block))
    zero = tuple(tuple(chart.zero() for _ in range(v)) for _ in range(v))
    gamma = [zero] * rank_A
    seen = set()
    for e in entries.get("gamma", []):
        (h,) = ctx.indices(e, 1, rank_A)
        if h in seen:
            raise ctx.err(f"gamma {h + 1} given twice", e)
        seen.add(h)
        M = ctx.matrix(e, chart)
        ctx.shape(M, v, v, e, "connection matrix")
        gamma[h] = M
    return ConnectionSpec(block.name or "nabla", v, tuple(gamma))


def _parse_bundle(ctx, block, entries, chart, parts) -> BundleSpec:
    ke = _one(ctx, entries, "kind", block)
    if ke.value not in ("C", "trivial"):
        raise ctx.err("'kind' expects C or trivial", ke)
    re_ = _one(ctx, entries, "rank", block, False)
    fol = parts.get("foliation")
    if re_ is not None:
        v = ctx.integer(re_)
    elif ke.value == "C" and fol is not None:
        v = len(fol.C)
    else:
        raise ctx.err("bundle needs 'rank'", None, line=block.line)
    nabla = []
    seen = set()
    for e in entries.get("nabla", []):
        q = len(fol.C) if fol is not None else 0
        (s,) = ctx.indices(e, 1, q)
        if s in seen:
            raise ctx.err(f"nabla {s + 1} given twice", e)
        seen.add(s)
        M = ctx.matrix(e, chart)
        ctx.shape(M, v, v, e, "connection matrix")
        nabla.append((s, M))
    if any(not x.is_zero() for _, M in nabla for row in M for x in row):
        q = len(fol.C)
        zero = tuple(tuple(chart.zero() for _ in range(v)) for _ in range(v))
        full = [zero] * q
        for s, M in nabla:
            full[s] = M
        return BundleSpec(ke.value, v, tuple(full))
    return BundleSpec(ke.value, v, ())


def _validate(ctx, model: DefinitionFile, blocks: Sequence[_Block]):
    line = {b.kind: b.line for b in blocks}

    def build(kind, fn):
        try:
            fn()
        except DefinitionError:
            raise
        except (ValueError, ChartError) as exc:
            raise DefinitionError(str(exc), line.get(kind, 1), 1, ctx.source) from None

    def deformation():
        if model.foliation is None or model.algebroid is None:
            raise ValueError("a deformation needs an algebroid and a foliation")
        p, q = len(model.foliation.B), len(model.foliation.C)
        th = model.deformation.theta
        if len(th) != p or any(len(r) != q for r in th):
            raise ValueError(f"theta must be {p}x{q}")

    def lie_foliation():
        if not model.foliation.C:
            raise ValueError("a Lie algebroid foliation needs 'C'")
        model.foliated_pair()

    if model.algebroid is not None:
        build("algebroid", model.lie_algebroid)
        if model.foliation is not None:
            build("foliation", lie_foliation)
    if model.courant is not None:
        build("courant", model.courant_algebroid)
        if model.foliation is not None:
            build("foliation", model.courant_foliation)
    if model.deformation is not None:
        build("deformation", deformation)


def parse_definition(path: str | Path) -> DefinitionFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DefinitionError(f"cannot read file: {exc.strerror}", 0, 0, str(path)) from None
    return parse_definition_text(text, str(path))


# ---------------------------------------------------------------------------
# printing


def _mat(M: Matrix) -> str:
    return "[" + "; ".join(", ".join(str(c) for c in row) for row in M) + "]"


def _vec(v: Sequence[Poly]) -> str:
    return "[" + ", ".join(str(c) for c in v) + "]"


def print_definition(model: DefinitionFile) -> str:
    out = ["chart {"]
    if model.chart.transverse:
        out.append("  transverse: " + ", ".join(model.chart.transverse))
    if model.chart.leaf:
        out.append("  leaf: " + ", ".join(model.chart.leaf))
    out.append("}")
    a = model.algebroid
    if a is not None:
        out += ["algebroid {", f"  rank: {a.rank}"]
        if a.labels:
            out.append("  labels: " + ", ".join(a.labels))
        if any(not x.is_zero() for row in a.anchor for x in row):
            out.append(f"  anchor: {_mat(a.anchor)}")
        for (h, k), vec in a.structure:
            out.append(f"  bracket {h + 1} {k + 1}: {_vec(vec)}")
        out.append("}")
    c = model.courant
    if c is not None:
        out.append("courant {")
        if c.standard:
            out.append("  standard: yes")
            for (i, j, k), val in c.twist:
                out.append(f"  twist {i + 1} {j + 1} {k + 1}: {val}")
        else:
            out.append(f"  rank: {c.rank}")
            if c.labels:
                out.append("  labels: " + ", ".join(c.labels))
            out.append(f"  metric: {_mat(c.metric)}")
            out.append(f"  anchor: {_mat(c.anchor)}")
            for (h, k), vec in c.structure:
                out.append(f"  bracket {h + 1} {k + 1}: {_vec(vec)}")
        out.append("}")
    f = model.foliation
    if f is not None:
        out.append("foliation {")
        for key in ("B", "C", "witness", "S", "Bprime"):
            M = getattr(f, key)
            if M or key == "B":
                out.append(f"  {key}: {_mat(M)}")
        out.append("}")
    d = model.deformation
    if d is not None:
        out += ["deformation {", f"  parameter: {d.parameter}", f"  theta: {_mat(d.theta)}", "}"]
    for conn in model.connections:
        out += [f"connection {conn.name} {{", f"  rank: {conn.rank}"]
        for h, M in enumerate(conn.gamma):
            if any(not x.is_zero() for row in M for x in row):
                out.append(f"  gamma {h + 1}: {_mat(M)}")
        out.append("}")
    b = model.bundle
    if b is not None:
        out += ["bundle {", f"  kind: {b.kind}", f"  rank: {b.rank}"]
        for s, M in enumerate(b.nabla):
            if any(not x.is_zero() for row in M for x in row):
                out.append(f"  nabla {s + 1}: {_mat(M)}")
        out.append("}")
    if model.submanifold is not None:
        out += ["submanifold {", "  remove: " + ", ".join(model.submanifold), "}"]
    return "\n".join(out) + "\n"
