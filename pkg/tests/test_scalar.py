from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from confalg.scalar import GaussRat, Scalar, as_rational

rats = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
gauss = st.builds(GaussRat, rats, rats)
scalars = st.dictionaries(st.integers(0, 3), gauss, max_size=3).map(Scalar.from_powers)


def test_as_rational_accepts_exact_types():
    assert as_rational(3) == mpq(3)
    assert as_rational(Fraction(1, 3)) == mpq(1, 3)
    assert as_rational("2/7") == mpq(2, 7)
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


def test_i_squared_is_minus_one():
    i = Scalar.i()
    assert i * i == Scalar(-1)
    assert GaussRat(0, 1).times_i() == GaussRat(-1)


def test_hbar_powers_and_evaluate():
    s = Scalar.hbar(2) * Scalar(Fraction(1, 4)) + Scalar.i()
    assert s.coeffs.keys() == {0, 2}
    assert s.evaluate(2.0) == pytest.approx(1 + 1j)
    assert str(s) == "i + 1/4*hbar^2"


def test_zero_coefficients_are_dropped():
    s = Scalar.hbar() - Scalar.hbar()
    assert s.is_zero() and not s
    assert s == Scalar(0)


def test_negative_hbar_power_rejected():
    with pytest.raises(ValueError):
        Scalar.from_powers({-1: GaussRat(1)})


def test_float_rejected():
    with pytest.raises(TypeError):
        Scalar(1.5 + 0j)


@given(scalars, scalars, scalars)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == Scalar(0)


@given(gauss, gauss)
def test_gauss_matches_complex(x, y):
    assert complex(x * y) == pytest.approx(complex(x) * complex(y))
    assert complex(x.conjugate()) == pytest.approx(complex(x).conjugate())
