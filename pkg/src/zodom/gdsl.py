"""Textual DSL for subgroups of Q^d, plus the key=value report format.

Grammar (normative; whitespace-insensitive, ``#`` comments to end of line)::

    group := item ("+" item)*
    item  := "oplus(" comp ("," comp)* ")"
           | "gen(" rat ("," rat)* ")"
           | "mat(" rows ")" "*" group
    comp  := "Z" | "Z[1/" nat "]"
    rat   := int ("/" nat)?
    rows  := "[" row (";" row)* "]"
    row   := rat ("," rat)*

``Z[1/n]`` with composite n inverts every prime factor of n, so
``Z[1/15] = Z[1/3, 1/5]``; the exponent of n is irrelevant.  ``mat`` applies
to the whole remainder of the expression after ``*``.  Syntax errors carry
the byte offset of the failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .hgroup import HGroup, apply_matrix
from .linalg import INF, Mat, Supernatural, factorint


class GdslSyntaxError(ValueError):
    def __init__(self, offset: int, expected: str):
        self.offset = offset
        self.expected = expected
        super().__init__(f"syntax error at offset {offset}: expected {expected}")


class DimensionMismatchError(ValueError):
    pass


class BadDenominatorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class ZComp:
    inv: int = 1  # 1 means plain Z, n >= 2 means Z[1/n]


@dataclass(frozen=True)
class Oplus:
    comps: tuple


@dataclass(frozen=True)
class Gen:
    vec: tuple


@dataclass(frozen=True)
class MatExpr:
    mat: Mat
    operand: object


@dataclass(frozen=True)
class SumExpr:
    items: tuple


GroupExpr = object  # any of the node classes above


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, expected: str):
        raise GdslSyntaxError(self._byte_offset(self.pos), expected)

    def _byte_offset(self, pos: int) -> int:
        return len(self.text[:pos].encode("utf-8"))

    def skip_ws(self):
        t, n = self.text, len(self.text)
        while self.pos < n:
            c = t[self.pos]
            if c == "#":
                while self.pos < n and t[self.pos] != "\n":
                    self.pos += 1
            elif c.isspace():
                self.pos += 1
            else:
                break

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def literal(self, s: str):
        self.skip_ws()
        if not self.text.startswith(s, self.pos):
            self.error(repr(s))
        self.pos += len(s)

    def try_literal(self, s: str) -> bool:
        self.skip_ws()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("digit")
        return int(self.text[start : self.pos])

    def rat(self) -> Fraction:
        self.skip_ws()
        sign = 1
        if self.try_literal("-"):
            sign = -1
        num = self.nat()
        if self.try_literal("/"):
            at = self.pos
            den = self.nat()
            if den == 0:
                raise GdslSyntaxError(self._byte_offset(at), "nonzero denominator")
            return Fraction(sign * num, den)
        return Fraction(sign * num)

    def comp(self) -> ZComp:
        self.skip_ws()
        at = self.pos
        self.literal("Z")
        if self.try_literal("["):
            self.literal("1/")
            n = self.nat()
            self.literal("]")
            if n < 2:
                raise BadDenominatorError(
                    f"Z[1/{n}] at offset {self._byte_offset(at)}: inverted modulus must be >= 2"
                )
            return ZComp(n)
        return ZComp(1)

    def rows(self) -> Mat:
        self.literal("[")
        rows = [self._row()]
        while self.try_literal(";"):
            rows.append(self._row())
        self.literal("]")
        if any(len(r) != len(rows) for r in rows):
            raise DimensionMismatchError("matrix must be square")
        return Mat(rows)

    def _row(self):
        out = [self.rat()]
        while self.try_literal(","):
            out.append(self.rat())
        return out

    def item(self):
        self.skip_ws()
        if self.try_literal("oplus("):
            comps = [self.comp()]
            while self.try_literal(","):
                comps.append(self.comp())
            self.literal(")")
            return Oplus(tuple(comps))
        if self.try_literal("gen("):
            entries = [self.rat()]
            while self.try_literal(","):
                entries.append(self.rat())
            self.literal(")")
            return Gen(tuple(entries))
        if self.try_literal("mat("):
            m = self.rows()
            self.literal(")")
            self.literal("*")
            return MatExpr(m, self.group())
        self.error("'oplus(', 'gen(' or 'mat('")

    def group(self):
        items = [self.item()]
        while self.try_literal("+"):
            items.append(self.item())
        return items[0] if len(items) == 1 else SumExpr(tuple(items))


def parse(text: str) -> GroupExpr:
    """Parse a group expression; one expression per input."""
    p = _Parser(text)
    expr = p.group()
    p.skip_ws()
    if p.pos != len(p.text):
        p.error("end of input")
    return expr


# ---------------------------------------------------------------------------
# elaboration


def expr_dimension(e) -> int:
    if isinstance(e, Oplus):
        return len(e.comps)
    if isinstance(e, Gen):
        return len(e.vec)
    if isinstance(e, MatExpr):
        d = expr_dimension(e.operand)
        if e.mat.d != d:
            raise DimensionMismatchError(
                f"matrix is {e.mat.d}x{e.mat.d} but operand has dimension {d}"
            )
        return d
    if isinstance(e, SumExpr):
        dims = {expr_dimension(i) for i in e.items}
        if len(dims) != 1:
            raise DimensionMismatchError(f"summands have mixed dimensions {sorted(dims)}")
        return dims.pop()
    raise TypeError(f"not a group expression: {e!r}")


def elaborate(e) -> HGroup:
    """LOCAL presentation denoted by the expression."""
    d = expr_dimension(e)
    if isinstance(e, Oplus):
        data: dict[int, tuple[list, list]] = {}
        for i, comp in enumerate(e.comps):
            if comp.inv == 1:
                continue
            unit = tuple(Fraction(1 if j == i else 0) for j in range(d))
            for p in factorint(comp.inv):
                data.setdefault(p, ([], []))[1].append(unit)
        return HGroup.from_local_data(d, data)
    if isinstance(e, Gen):
        vec = tuple(Fraction(x) for x in e.vec)
        primes = set()
        for x in vec:
            if x.denominator > 1:
                primes |= set(factorint(x.denominator))
        data = {p: ([vec], []) for p in primes}
        return HGroup.from_local_data(d, data)
    if isinstance(e, MatExpr):
        return apply_matrix(e.mat, elaborate(e.operand))
    if isinstance(e, SumExpr):
        parts = [elaborate(i) for i in e.items]
        data = {}
        for part in parts:
            for p, (lat, div) in part.local_data().items():
                slot = data.setdefault(p, ([], []))
                slot[0].extend(lat)
                slot[1].extend(div)
        return HGroup.from_local_data(d, data)
    raise TypeError(f"not a group expression: {e!r}")


def parse_group(text: str) -> HGroup:
    return elaborate(parse(text))


# ---------------------------------------------------------------------------
# printer (canonical text)


def print_expr(e) -> str:
    if isinstance(e, Oplus):
        comps = ", ".join("Z" if c.inv == 1 else f"Z[1/{c.inv}]" for c in e.comps)
        return f"oplus({comps})"
    if isinstance(e, Gen):
        return f"gen({', '.join(format_rat(x) for x in e.vec)})"
    if isinstance(e, MatExpr):
        return f"{format_mat(e.mat)} * {print_expr(e.operand)}"
    if isinstance(e, SumExpr):
        return " + ".join(print_expr(i) for i in e.items)
    raise TypeError(f"not a group expression: {e!r}")


# ---------------------------------------------------------------------------
# report format: line-oriented key=value, bit-exact rationals


def format_rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_vec(v) -> str:
    return "(" + ", ".join(format_rat(x) for x in v) + ")"


def format_mat(m: Mat) -> str:
    body = ";".join(",".join(format_rat(x) for x in row) for row in m.rows)
    return f"mat([{body}])"


def format_supernatural(s: Supernatural) -> str:
    if not s.items:
        return "1"
    return "*".join(f"{p}^{'inf' if e == INF else e}" for p, e in s.items)


def report_lines(pairs) -> str:
    """Render (key, value) pairs as the line-oriented report."""
    return "\n".join(f"{k}={v}" for k, v in pairs)
