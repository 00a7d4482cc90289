"""Noncommutative expressions, the scaled commutator and PBW normal ordering.

An :class:`Expr` is a finite sum of words of letters with exact scalar
coefficients.  Letters are plain strings; which letters are generators,
inverse letters or derived symbols, and how they are ordered, is decided by
the algebra object passed to :func:`normalize` and :func:`commutator`
(see :mod:`confalg.algebras`).

The bracket is ``(A, B) = [A, B] / (i hbar)``, so straightening an adjacent
out-of-order pair uses ``a b = b a + i hbar (a, b)``.
"""

from __future__ import annotations

import sys
from numbers import Rational
from typing import Iterable

from gmpy2 import mpq

from .scalar import ONE, GaussRat, Scalar

__all__ = [
    "Word",
    "Expr",
    "RejectedInput",
    "InconclusiveError",
    "RewriteBudgetExceeded",
    "UnresolvableBracket",
    "commutator",
    "sym_product",
    "normalize",
    "equals",
    "DEFAULT_STEP_BUDGET",
]

Word = tuple  # tuple[str, ...]; the empty word is the unit

DEFAULT_STEP_BUDGET = 10**6

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class RejectedInput(ValueError):
    """Input outside an operation's domain (unknown letter, bad symbol, ...)."""


class InconclusiveError(Exception):
    """Raised when a difference only fails to vanish through inverse letters."""

    def __init__(self, residual: Expr):
        super().__init__(f"inverse letters survive in residual: {residual}")
        self.residual = residual


class UnresolvableBracket(RuntimeError):
    """An inverse-letter bracket depends on itself (only in broken tables)."""


class RewriteBudgetExceeded(RuntimeError):
    def __init__(self, budget: int, trace: list):
        super().__init__(
            f"normal ordering exceeded {budget} rewrite steps; last words: {trace[-5:]}"
        )
        self.trace = trace


def _coef(x) -> GaussRat:
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, (int, Rational, mpq)) and not isinstance(x, bool):
        return GaussRat(x)
    raise TypeError(f"not an exact coefficient: {x!r}")


def _acc(out: dict, terms: dict, coef: GaussRat | None = None, hshift: int = 0) -> None:
    """out += coef * hbar**hshift * terms, dropping cancellations."""
    for (w, h), c in terms.items():
        key = (w, h + hshift)
        if coef is not None:
            c = c * coef
        prev = out.get(key)
        if prev is not None:
            c = prev + c
            if c:
                out[key] = c
            else:
                del out[key]
        elif c:
            out[key] = c


class Expr:
    """Immutable formal sum of scalar-weighted words.

    Terms are stored as ``{(word, hbar_power): GaussRat}``.  Structural
    equality (``==``) compares term maps; use :func:`equals` for equality in
    the algebra.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: dict | None = None):
        self._t = {k: v for k, v in (terms or {}).items() if v}
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> Expr:
        e = object.__new__(cls)
        e._t = terms
        e._hash = None
        return e

    # constructors
    @classmethod
    def letter(cls, name: str) -> Expr:
        return cls._wrap({((name,), 0): ONE})

    @classmethod
    def word(cls, letters: Iterable[str], coef=1) -> Expr:
        return cls({(tuple(letters), 0): _coef(coef)})

    @classmethod
    def const(cls, value) -> Expr:
        s = value if isinstance(value, Scalar) else Scalar(value)
        return cls._wrap({((), p): c for p, c in s.coeffs.items()})

    @classmethod
    def zero(cls) -> Expr:
        return cls._wrap({})

    @classmethod
    def one(cls) -> Expr:
        return cls.const(1)

    @classmethod
    def from_terms(cls, terms: dict[Word, Scalar]) -> Expr:
        out: dict = {}
        for w, s in terms.items():
            s = s if isinstance(s, Scalar) else Scalar(s)
            _acc(out, {(tuple(w), p): c for p, c in s.coeffs.items()})
        return cls._wrap(out)

    # inspection
    def terms(self) -> dict[Word, Scalar]:
        grouped: dict[Word, dict[int, GaussRat]] = {}
        for (w, h), c in self._t.items():
            grouped.setdefault(w, {})[h] = c
        return {w: Scalar.from_powers(cs) for w, cs in grouped.items()}

    def raw_terms(self) -> dict:
        return dict(self._t)

    def letters(self) -> set[str]:
        return {x for (w, _h) in self._t for x in w}

    def degree(self) -> int:
        return max((len(w) for (w, _h) in self._t), default=0)

    def is_zero(self) -> bool:
        return not self._t

    def is_scalar(self) -> bool:
        return all(not w for (w, _h) in self._t)

    def scalar_value(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError("expression is not a scalar")
        return Scalar.from_powers({h: c for ((_w, h), c) in self._t.items()})

    def __len__(self) -> int:
        return len(self._t)

    def __bool__(self) -> bool:
        return bool(self._t)

    # arithmetic
    @staticmethod
    def _lift(x) -> Expr:
        if isinstance(x, Expr):
            return x
        if isinstance(x, (Scalar, GaussRat, int, Rational, mpq)) and not isinstance(x, bool):
            return Expr.const(x if not isinstance(x, GaussRat) else Scalar(x))
        raise TypeError(f"cannot combine Expr with {type(x).__name__}")

    def __add__(self, other) -> Expr:
        other = self._lift(other)
        out = dict(self._t)
        _acc(out, other._t)
        return Expr._wrap(out)

    __radd__ = __add__

    def __neg__(self) -> Expr:
        return Expr._wrap({k: -v for k, v in self._t.items()})

    def __sub__(self, other) -> Expr:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> Expr:
        return self._lift(other) - self

    def __mul__(self, other) -> Expr:
        other = self._lift(other)
        out: dict = {}
        for (w1, h1), c1 in self._t.items():
            for (w2, h2), c2 in other._t.items():
                _acc(out, {(w1 + w2, h1 + h2): c1 * c2})
        return Expr._wrap(out)

    def __rmul__(self, other) -> Expr:
        return self._lift(other) * self

    def __truediv__(self, other) -> Expr:
        if isinstance(other, (int, Rational, mpq)) and not isinstance(other, bool):
            return self.scale(GaussRat(mpq(1) / mpq(other)))
        raise TypeError("only division by a nonzero rational is supported")

    def __pow__(self, n: int) -> Expr:
        if n < 0:
            raise ValueError("negative powers are not words; use an inverse letter")
        out = Expr.one()
        for _ in range(n):
            out = out * self
        return out

    def scale(self, coef, hbar_power: int = 0) -> Expr:
        g = _coef(coef)
        out: dict = {}
        _acc(out, self._t, g, hbar_power)
        return Expr._wrap(out)

    def map_words(self, fn) -> Expr:
        """Apply ``fn(word) -> Expr`` to every word and sum with coefficients."""
        out: dict = {}
        for (w, h), c in self._t.items():
            _acc(out, fn(w)._t, c, h)
        return Expr._wrap(out)

    def __eq__(self, other) -> bool:
        if isinstance(other, Expr):
            return self._t == other._t
        if isinstance(other, (int, Rational, Scalar)):
            return self._t == Expr.const(other)._t
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __str__(self) -> str:
        from .parser import format_expr

        return format_expr(self)

    def __repr__(self) -> str:
        return f"Expr({str(self)!r})"


class Normalizer:
    """Memoised PBW straightening for one algebra.

    ``alg`` must provide ``rank`` (letter -> position in the total order),
    ``letter_bracket(a, b) -> Expr`` (already normal ordered) and
    ``reductions``: a sequence of ``(pattern_word, replacement_terms)``
    applied to sorted words (inverse cancellations).
    """

    def __init__(self, alg, budget: int = DEFAULT_STEP_BUDGET):
        self.alg = alg
        self.rank = alg.rank
        self.budget = budget
        self.memo: dict[Word, dict] = {}
        self.steps = 0
        self._trace: list = []

    def reset_budget(self) -> None:
        self.steps = 0
        self._trace = []

    def nf(self, word: Word) -> dict:
        hit = self.memo.get(word)
        if hit is not None:
            return hit
        self.steps += 1
        if self.steps > self.budget:
            self._trace.append(word)
            raise RewriteBudgetExceeded(self.budget, self._trace)
        rank = self.rank
        out: dict = {}
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if rank[a] > rank[b]:
                pre, post = word[:i], word[i + 2 :]
                _acc(out, self.nf(pre + (b, a) + post))
                br = self.alg.letter_bracket(a, b)
                for (w, h), c in br._t.items():
                    _acc(out, self.nf(pre + w + post), c.times_i(), h + 1)
                self.memo[word] = out
                return out
        for pattern, repl in self.alg.reductions:
            n = len(pattern)
            for i in range(len(word) - n + 1):
                if word[i : i + n] == pattern:
                    pre, post = word[:i], word[i + n :]
                    for (w, h), c in repl._t.items():
                        _acc(out, self.nf(pre + w + post), c, h)
                    self.memo[word] = out
                    return out
        out[(word, 0)] = ONE
        self.memo[word] = out
        return out


def _normalizer(alg) -> Normalizer:
    nz = getattr(alg, "_normalizer", None)
    if nz is None:
        nz = Normalizer(alg, getattr(alg, "step_budget", DEFAULT_STEP_BUDGET))
        object.__setattr__(alg, "_normalizer", nz)
    return nz


def _check_letters(e: Expr, alg) -> None:
    for x in e.letters():
        if x not in alg.rank:
            raise RejectedInput(f"letter {x!r} does not belong to algebra {alg.name}")


def _prepare(e: Expr, alg) -> Expr:
    if not isinstance(e, Expr):
        e = Expr._lift(e)
    if any(x in alg.derived for x in e.letters()):
        e = alg.expand(e)
    _check_letters(e, alg)
    return e


def normalize(e: Expr, alg) -> Expr:
    """Canonical PBW form of ``e`` (derived symbols are expanded first)."""
    e = _prepare(e, alg)
    nz = _normalizer(alg)
    nz.reset_budget()
    out: dict = {}
    for (w, h), c in e._t.items():
        _acc(out, nz.nf(w), c, h)
    return Expr._wrap(out)


def commutator(a: Expr, b: Expr, alg) -> Expr:
    """The normal-ordered bracket ``(a, b) = [a, b] / (i hbar)``.

    Computed letter by letter with the Leibniz rule, so no division by hbar
    is ever needed.
    """
    a = _prepare(a, alg)
    b = _prepare(b, alg)
    nz = _normalizer(alg)
    nz.reset_budget()
    bracket = alg.letter_bracket
    out: dict = {}
    for (u, hu), cu in a._t.items():
        for (v, hv), cv in b._t.items():
            c = cu * cv
            h = hu + hv
            for i, x in enumerate(u):
                for j, y in enumerate(v):
                    br = bracket(x, y)
                    if not br._t:
                        continue
                    pre = u[:i] + v[:j]
                    post = v[j + 1 :] + u[i + 1 :]
                    for (w, hw), cw in br._t.items():
                        _acc(out, nz.nf(pre + w + post), c * cw, h + hw)
    return Expr._wrap(out)


def sym_product(a: Expr, b: Expr) -> Expr:
    """``a . b = (ab + ba) / 2`` (not normal ordered)."""
    a = Expr._lift(a)
    b = Expr._lift(b)
    return (a * b + b * a).scale(GaussRat(mpq(1, 2)))


def has_inverse_letters(e: Expr, alg) -> bool:
    return any(x in alg.invertibles for x in e.letters())


def equals(a: Expr, b: Expr, alg) -> bool:
    """True iff ``normalize(a - b) == 0``.

    Raises :class:`InconclusiveError` when the normalized difference is
    nonzero but still carries inverse letters.
    """
    d = normalize(Expr._lift(a) - Expr._lift(b), alg)
    if d.is_zero():
        return True
    if has_inverse_letters(d, alg):
        raise InconclusiveError(d)
    return False
