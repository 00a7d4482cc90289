import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from confalg import Expr, RejectedInput, commutator, derived_definition, normalize
from confalg.algebras import (
    ALGEBRA_NAMES,
    dump_algebra,
    eps_lower,
    eps_upper,
    eta,
    jacobi_sweep,
    load_algebra,
    make_algebra,
)
from confalg.parser import parse_expr

L = Expr.letter
idx = st.integers(0, 3)


# -------------------------------------------------------------------- tensors


def test_metric_signature():
    assert [eta(m, m) for m in range(4)] == [1, -1, -1, -1]
    assert eta(0, 1) == 0


def test_eps_normalisation():
    assert eps_lower(0, 1, 2, 3) == 1
    assert eps_upper(0, 1, 2, 3) == -1
    assert eps_lower(0, 0, 2, 3) == 0


@given(idx, idx, idx, idx)
def test_eps_antisymmetry(m, n, r, s):
    e = eps_lower(m, n, r, s)
    assert e == -eps_lower(m, n, s, r) == -eps_lower(m, r, n, s) == -eps_lower(n, m, r, s)


@given(idx, idx, idx, idx)
def test_eps_raising(m, n, r, s):
    assert eps_upper(m, n, r, s) == eta(m, m) * eta(n, n) * eta(r, r) * eta(s, s) * eps_lower(m, n, r, s)


# --------------------------------------------------------------------- tables


@pytest.mark.parametrize(
    "name, triples",
    [("conf2d", 1), ("conf2d-pair", 20), ("poincare4d", 120), ("conf4d", 455)],
)
def test_jacobi_sweeps(name, triples):
    res = list(jacobi_sweep(make_algebra(name)))
    assert len(res) == triples
    assert all(r.is_zero() for _, r in res)


def test_tables_are_antisymmetric():
    for name in ALGEBRA_NAMES:
        alg = make_algebra(name)
        for (a, b), v in alg.table.items():
            assert alg.table[(b, a)] == -v


def test_dilatation_grading(conf4d):
    for m in range(4):
        assert commutator(L("D"), L(f"P{m}"), conf4d) == L(f"P{m}")
        assert commutator(L("D"), L(f"C{m}"), conf4d) == -L(f"C{m}")
    for m, n in itertools.combinations(range(4), 2):
        assert commutator(L("D"), L(f"J{m}{n}"), conf4d).is_zero()


@given(idx, idx, idx)
def test_lorentz_vector_law(m, n, r):
    alg = make_algebra("poincare4d")
    if m == n:
        return
    Jmn = parse_expr(f"J{m}{n}", alg)
    want = (L(f"P{m}").scale(eta(n, r)) - L(f"P{n}").scale(eta(m, r)))
    assert commutator(Jmn, L(f"P{r}"), alg) == want


def test_momenta_commute(poincare):
    for a, b in itertools.combinations(range(4), 2):
        assert commutator(L(f"P{a}"), L(f"P{b}"), poincare).is_zero()


def test_sectors_commute(pair):
    for a in ("Ep", "Dp", "Cp", "invEp"):
        for b in ("Em", "Dm", "Cm", "invEm"):
            assert commutator(L(a), L(b), pair).is_zero()


# -------------------------------------------------------------------- derived


def test_transversality(poincare, conf4d):
    pw = sum((L(f"P{m}") * L(f"W{m}")).scale(eta(m, m)) for m in range(4))
    assert normalize(pw, poincare).is_zero()
    for n in range(4):
        ps = sum((parse_expr(f"P{m}*S{m}{n}", conf4d)).scale(eta(m, m)) for m in range(4) if m != n)
        assert normalize(ps, conf4d).is_zero()


def test_pair_mass_is_four_ep_em(pair):
    assert normalize(parse_expr("Psq - 4*Ep*Em", pair), pair).is_zero()
    assert normalize(parse_expr("Q*Psq", pair), pair) == Expr.one()


def test_delta_with_acceleration(conf4d):
    a = (1, Fraction(-1, 2), 2, Fraction(3, 4))
    d = derived_definition(conf4d, "Delta", a)
    assert d == parse_expr("1/2*C0 - 1/4*C1 + C2 + 3/8*C3", conf4d)
    with pytest.raises(RejectedInput):
        derived_definition(conf4d, "Delta", (1, 0))
    with pytest.raises(RejectedInput):
        derived_definition(make_algebra("conf2d"), "Delta", (1, 0))


def test_representation_only_symbol(conf2d):
    with pytest.raises(RejectedInput):
        derived_definition(conf2d, "N")


def test_massless_guard(poincare):
    for sym in ("X0", "S12"):
        with pytest.raises(RejectedInput, match="P\\^2"):
            derived_definition(poincare, sym)


def test_unknown_algebra():
    with pytest.raises(RejectedInput):
        make_algebra("so(3)")


def test_expand_leaves_only_letters(conf4d):
    e = conf4d.expand(L("X1"))
    assert e.letters() <= set(conf4d.letters)
    assert "Q" in e.letters()


# --------------------------------------------------------------- file format


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_serialization_round_trip(name):
    alg = make_algebra(name)
    text = dump_algebra(alg)
    again = load_algebra(text)
    assert dump_algebra(again) == text
    assert again.order == alg.order
    assert again.table == alg.table


def test_loaded_algebra_computes(tmp_path):
    path = tmp_path / "conf2d.json"
    path.write_text(dump_algebra(make_algebra("conf2d")))
    alg = load_algebra(path.read_text())
    U = parse_expr("U", alg)
    assert normalize(commutator(L("E"), U, alg), alg) == Expr.one()


def test_mutated_table_is_a_copy(conf2d):
    m = conf2d.with_table_entry("E", "D", L("E") + L("D"))
    assert m.table[("D", "E")] == -(L("E") + L("D"))
    assert conf2d.table[("E", "D")] == L("E")
