"""Parser and canonical printer for the operator expression grammar.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '.') factor)*
    factor := atom ('^' nat)*
    atom   := rational | 'i' | 'hbar' | symbol
            | 'comm(' expr ',' expr ')' | 'sym(' expr ',' expr ')'
            | 'inv(' symbol ')' | '(' expr ')'

``*`` is the ordinary product, ``.`` the symmetrised product; both are
left-associative and share precedence.  Rationals are written ``a/b``.
Indices are digit suffixes: ``P0``, ``J01``, ``C3``; ``J10`` is read as
``-J01`` and ``J00`` is rejected.  Squares are ``Psq``, ``Wsq``, ``Ssq``;
``inv(Psq)`` is the inverse of P^2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from gmpy2 import mpq

from .ncalg import Expr, RejectedInput, commutator, sym_product
from .scalar import GaussRat, Scalar

__all__ = ["ParseError", "Namespace", "parse_expr", "format_expr", "format_scalar"]


class ParseError(RejectedInput):
    def __init__(self, msg: str, text: str = "", pos: int | None = None):
        where = ""
        if pos is not None:
            where = f" at position {pos}:\n  {text}\n  {' ' * pos}^"
        super().__init__(msg + where)
        self.pos = pos


@dataclass
class Namespace:
    """Symbols known to the parser when no full algebra is at hand."""

    letters: set = field(default_factory=set)
    invertibles: dict = field(default_factory=dict)
    derived: set = field(default_factory=set)
    name: str = "namespace"


def _namespace(ctx) -> tuple[Namespace, object]:
    if isinstance(ctx, Namespace):
        return ctx, None
    return (
        Namespace(
            letters=set(ctx.order),
            invertibles=dict(ctx.invertibles),
            derived=set(ctx.derived),
            name=ctx.name,
        ),
        ctx,
    )


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")
_INDEXED = re.compile(r"^([JS])(\d)(\d)$")


class _Parser:
    def __init__(self, text: str, ns: Namespace, alg):
        self.text = text
        self.ns = ns
        self.alg = alg
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            num, ident, op = m.groups()
            start = m.start(1) if num else m.start(2) if ident else m.start(3)
            kind = "num" if num else "id" if ident else "op"
            self.toks.append((kind, num or ident or op, start))
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("eof", "", len(self.text))

    def take(self, value=None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1]!r}" if tok[0] != "eof" else f"expected {value!r}")
        self.i += 1
        return tok

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.text, self.peek()[2] if pos is None else pos)

    def parse(self) -> Expr:
        if not self.toks:
            self.fail("empty expression")
        e = self.expr()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> Expr:
        neg = False
        if self.peek()[1] in ("-", "+"):
            neg = self.take()[1] == "-"
        e = self.term()
        if neg:
            e = -e
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.peek()[1] in ("*", "."):
            op = self.take()[1]
            f = self.factor()
            e = e * f if op == "*" else sym_product(e, f)
        return e

    def factor(self) -> Expr:
        e = self.atom()
        while self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                self.fail("exponent must be a natural number", pos)
            e = e ** int(val)
        return e

    def atom(self) -> Expr:
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            num = mpq(int(val))
            if self.peek()[1] == "/":
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num":
                    self.fail("denominator must be a natural number", p2)
                if int(v2) == 0:
                    self.fail("zero denominator", p2)
                num = num / int(v2)
            return Expr.const(GaussRat(num))
        if val == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind != "id":
            self.fail(f"unexpected {val!r}" if kind != "eof" else "unexpected end of input")
        self.take()
        if val == "i":
            return Expr.const(Scalar.i())
        if val == "hbar":
            return Expr.const(Scalar.hbar())
        if val in ("comm", "sym") and self.peek()[1] == "(":
            self.take("(")
            a = self.expr()
            self.take(",")
            b = self.expr()
            self.take(")")
            if val == "sym":
                return sym_product(a, b)
            if self.alg is None:
                self.fail("comm(...) needs a full algebra", pos)
            return commutator(a, b, self.alg)
        if val == "inv" and self.peek()[1] == "(":
            self.take("(")
            k2, sym, p2 = self.take()
            if k2 != "id":
                self.fail("inv(...) takes a symbol", p2)
            self.take(")")
            return Expr.letter(self.inverse_letter(sym, p2))
        return self.symbol(val, pos)

    def inverse_letter(self, sym: str, pos: int) -> str:
        ns = self.ns
        if sym == "Psq":
            if "Q" in ns.letters or "Q" in ns.derived:
                return "Q"
        for q, base in ns.invertibles.items():
            if base is not None and base == Expr.letter(sym):
                return q
        if sym in ns.letters or sym in ns.derived:
            raise ParseError(f"{sym} is not designated invertible in {ns.name}", self.text, pos)
        raise ParseError(f"unknown symbol {sym!r} for {ns.name}", self.text, pos)

    def symbol(self, name: str, pos: int) -> Expr:
        ns = self.ns
        if name in ns.letters or name in ns.derived:
            return Expr.letter(name)
        m = _INDEXED.match(name)
        if m:
            head, a, b = m.groups()
            if a == b:
                raise ParseError(f"{name}: antisymmetric index pair with equal indices", self.text, pos)
            flipped = f"{head}{b}{a}"
            if flipped in ns.letters or flipped in ns.derived:
                return -Expr.letter(flipped)
        raise ParseError(f"unknown symbol {name!r} for {ns.name}", self.text, pos)


def parse_expr(text: str, alg) -> Expr:
    """Parse ``text`` over an algebra (or a bare :class:`Namespace`).

    Derived symbols stay as symbols except inside ``comm(...)``, whose
    value is computed (and normal ordered) on the spot.
    """
    ns, full = _namespace(alg)
    return _Parser(text, ns, full).parse()


# ---------------------------------------------------------------- printing


def _fmt_q(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _fmt_letter(x: str) -> str:
    if x.startswith("inv") and len(x) > 3:
        return f"inv({x[3:]})"
    return x


def _fmt_word(word) -> list[str]:
    out = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        n = j - i
        out.append(_fmt_letter(word[i]) + (f"^{n}" if n > 1 else ""))
        i = j
    return out


def _fmt_term(c: GaussRat, h: int, word) -> tuple[str, str]:
    """Return (sign, body) for one term."""
    factors = []
    if h:
        factors.append("hbar" + (f"^{h}" if h > 1 else ""))
    factors += _fmt_word(word)
    if c.im == 0:
        sign = "-" if c.re < 0 else "+"
        mag = abs(c.re)
        lead = [] if (mag == 1 and factors) else [_fmt_q(mag)]
    elif c.re == 0:
        sign = "-" if c.im < 0 else "+"
        mag = abs(c.im)
        lead = (["i"] if mag == 1 else [_fmt_q(mag), "i"])
    else:
        sign = "+"
        op = "-" if c.im < 0 else "+"
        im = abs(c.im)
        im_s = "i" if im == 1 else f"{_fmt_q(im)}*i"
        lead = [f"({_fmt_q(c.re)} {op} {im_s})"]
    return sign, "*".join(lead + factors)


def _term_key(item):
    (w, h), _c = item
    return (len(w), w, h)


def format_expr(e: Expr) -> str:
    """Canonical text for ``e``: terms sorted by (length, word, hbar power)."""
    items = sorted(e.raw_terms().items(), key=_term_key)
    if not items:
        return "0"
    parts = []
    for k, ((w, h), c) in enumerate(items):
        sign, body = _fmt_term(c, h, w)
        if k == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def format_scalar(s: Scalar) -> str:
    return format_expr(Expr.const(s))
