import pytest
from hypothesis import given, strategies as st

from confalg import Expr, normalize
from confalg.algebras import make_algebra
from confalg.parser import Namespace, ParseError, format_expr, parse_expr

from test_ncalg import exprs

CONF2D = make_algebra("conf2d")


@pytest.mark.parametrize(
    "text, normal",
    [
        ("comm(E, sym(D, inv(E)))", "1"),
        ("E*inv(E)", "1"),
        ("inv(E)*E", "1"),
        ("(1/2)*hbar^2 + C.E - D*D", "1/2*hbar^2 - i*hbar*D - D^2 + E*C"),
        ("-2*i*hbar*E^2 + (1/3)*D", "1/3*D - 2*i*hbar*E^2"),
        ("U", "1/2*i*hbar*inv(E) + inv(E)*D"),
        ("comm(E, D)", "E"),
        ("comm(E, C)", "2*D"),
        ("comm(D, C)", "C"),
    ],
)
def test_golden_normal_forms(text, normal):
    assert format_expr(normalize(parse_expr(text, CONF2D), CONF2D)) == normal


def test_symmetric_product_is_not_reordered():
    assert format_expr(parse_expr("C.E", CONF2D)) == "1/2*C*E + 1/2*E*C"


def test_dot_and_star_share_precedence():
    a = parse_expr("D*E.C", CONF2D)
    b = parse_expr("(D*E).C", CONF2D)
    assert a == b


def test_power_binds_tighter_than_product():
    assert parse_expr("2*E^2", CONF2D) == parse_expr("2*(E*E)", CONF2D)


@pytest.mark.parametrize(
    "text, pos",
    [("E + * D", 4), ("E*(D", 4), ("Foo", 0), ("inv(D)", 4), ("E^x", 2), ("3/0", 2), ("", 0), ("E D", 2)],
)
def test_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text, CONF2D)
    assert info.value.pos == pos
    assert "^" in str(info.value)


def test_antisymmetric_indices(conf4d):
    assert parse_expr("J10", conf4d) == -Expr.letter("J01")
    with pytest.raises(ParseError, match="equal indices"):
        parse_expr("J00", conf4d)


def test_inverse_of_psq(conf4d, pair, poincare):
    assert parse_expr("inv(Psq)", conf4d) == Expr.letter("Q")
    assert parse_expr("inv(Psq)", pair) == Expr.letter("Q")
    with pytest.raises(ParseError, match="not designated invertible"):
        parse_expr("inv(Psq)", poincare)


def test_comm_needs_algebra():
    ns = Namespace(letters={"A", "B"}, name="toy")
    assert parse_expr("sym(A, B)", ns) == parse_expr("sym(B, A)", ns)
    with pytest.raises(ParseError, match="full algebra"):
        parse_expr("comm(A, B)", ns)


def test_zero_prints_as_zero():
    assert format_expr(parse_expr("E - E", CONF2D)) == "0"


@given(exprs(CONF2D.order))
def test_print_parse_round_trip(e):
    text = format_expr(e)
    assert parse_expr(text, CONF2D) == e
    assert format_expr(parse_expr(text, CONF2D)) == text


def test_symmetrised_golden():
    # (DE + ED)/2 with DE = ED - i hbar E
    assert format_expr(normalize(parse_expr("sym(D, E)", CONF2D), CONF2D)) == "-1/2*i*hbar*E + E*D"
