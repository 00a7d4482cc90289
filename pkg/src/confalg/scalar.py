"""Exact scalars: Gaussian rationals times non-negative powers of a formal hbar."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

__all__ = ["GaussRat", "Scalar", "as_rational"]


def as_rational(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, (int, Rational, str)):
        return mpq(x)
    raise TypeError(f"cannot use {x!r} as an exact rational")


class GaussRat:
    """A Gaussian rational ``re + i*im``.

    Used for the coefficient of a single (word, hbar-power) slot in
    :class:`confalg.ncalg.Expr`; kept tiny because it sits in the hot loop.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def _raw(cls, re, im):
        g = object.__new__(cls)
        g.re = re
        g.im = im
        return g

    def __add__(self, other: GaussRat) -> GaussRat:
        return GaussRat._raw(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussRat) -> GaussRat:
        return GaussRat._raw(self.re - other.re, self.im - other.im)

    def __neg__(self) -> GaussRat:
        return GaussRat._raw(-self.re, -self.im)

    def __mul__(self, other: GaussRat) -> GaussRat:
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussRat._raw(a * c - b * d, a * d + b * c)

    def times_i(self) -> GaussRat:
        return GaussRat._raw(-self.im, self.re)

    def conjugate(self) -> GaussRat:
        return GaussRat._raw(self.re, -self.im)

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"GaussRat({self.re}, {self.im})"


ONE = GaussRat(1)
ZERO = GaussRat(0)
I_UNIT = GaussRat(0, 1)


class Scalar:
    """Finite sum ``sum_b c_b * hbar**b`` with Gaussian-rational ``c_b``.

    Instances are immutable and canonical: zero coefficients are dropped, so
    equality is plain dictionary equality.
    """

    __slots__ = ("_c",)

    def __init__(self, value=0):
        if isinstance(value, Scalar):
            self._c = value._c
            return
        if isinstance(value, GaussRat):
            self._c = {0: value} if value else {}
            return
        if isinstance(value, complex):
            raise TypeError("floating point scalars are not supported")
        g = GaussRat(value)
        self._c = {0: g} if g else {}

    @classmethod
    def from_powers(cls, coeffs: dict[int, GaussRat]) -> Scalar:
        s = object.__new__(cls)
        s._c = {p: c for p, c in sorted(coeffs.items()) if c}
        for p in s._c:
            if p < 0:
                raise ValueError("negative hbar power")
        return s

    @classmethod
    def i(cls) -> Scalar:
        return cls(I_UNIT)

    @classmethod
    def hbar(cls, power: int = 1) -> Scalar:
        return cls.from_powers({power: ONE})

    @property
    def coeffs(self) -> dict[int, GaussRat]:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def _coerce(self, other) -> Scalar:
        return other if isinstance(other, Scalar) else Scalar(other)

    def __add__(self, other) -> Scalar:
        other = self._coerce(other)
        out = dict(self._c)
        for p, c in other._c.items():
            out[p] = out[p] + c if p in out else c
        return Scalar.from_powers(out)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar.from_powers({p: -c for p, c in self._c.items()})

    def __sub__(self, other) -> Scalar:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Scalar:
        return self._coerce(other) - self

    def __mul__(self, other) -> Scalar:
        if not isinstance(other, (Scalar, GaussRat, int, Rational, mpq)):
            return NotImplemented
        other = self._coerce(other)
        out: dict[int, GaussRat] = {}
        for p, c in self._c.items():
            for q, d in other._c.items():
                v = c * d
                out[p + q] = out[p + q] + v if p + q in out else v
        return Scalar.from_powers(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussRat)):
            other = Scalar(other)
        if isinstance(other, Scalar):
            return self._c == other._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._c.items()))

    def evaluate(self, hbar: float = 1.0) -> complex:
        return sum((complex(c) * hbar**p for p, c in self._c.items()), 0j)

    def __str__(self) -> str:
        from .parser import format_scalar

        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({str(self)!r})"
