from fractions import Fraction

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from confalg import Expr, RejectedInput
from confalg.algebras import make_algebra
from confalg.fockrep import (
    NumericConfig,
    ResourceGuard,
    alpha2_expr,
    build_discrete_series,
    build_grid_rep,
    build_laurent_rep,
    build_two_sector,
    casimir_basis_values,
    casimir_samples,
    commutator_residual,
    convergence_check,
    dump_matrices,
    evaluate,
    evaluate_full,
    fock_block_sizes,
    ladder,
    opnorm,
    random_expr,
    run_numerical_suite,
    second_quantize,
)
from confalg.parser import parse_expr

CONF2D = make_algebra("conf2d")
PAIR = make_algebra("conf2d-pair")


def P(text, alg=CONF2D):
    return parse_expr(text, alg)


@pytest.fixture(scope="module")
def ds():
    return build_discrete_series(16)


@pytest.fixture(scope="module")
def fock():
    return second_quantize(build_discrete_series(10), 2)


@pytest.fixture(scope="module")
def two():
    f = lambda: second_quantize(build_discrete_series(8), 2)
    return build_two_sector(f(), f())


# ------------------------------------------------------------ one particle


def test_ladder_small():
    K0, Kp, Km = ladder(4, 1)
    assert np.allclose(np.diag(K0), [1, 2, 3, 4])
    assert np.allclose(np.diag(Kp, -1) ** 2, [2, 6, 12])
    assert np.allclose(Km, Kp.T)


@pytest.mark.parametrize("dim, k", [(7, 1), (16, 0), (16, -1), (16, "x")])
def test_discrete_series_rejects(dim, k):
    with pytest.raises(RejectedInput):
        build_discrete_series(dim, k)


def test_generators_hermitian(ds):
    for g in "EDC":
        M = ds.matrix(g)
        assert np.allclose(M, M.conj().T)


@pytest.mark.parametrize("a, b, x", [("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C")])
@pytest.mark.parametrize("hbar", [1.0, 0.37])
def test_single_particle_brackets(a, b, x, hbar):
    r = build_discrete_series(12, hbar=hbar)
    assert commutator_residual(r, P(a), P(b), P(x), r.window(2)) < 1e-12


@pytest.mark.parametrize("k", [Fraction(1, 2) + Fraction(1, 4), 1, Fraction(3, 2), 2, 5])
@pytest.mark.parametrize("hbar", [1.0, 2.5])
def test_casimir_value(k, hbar):
    r = build_discrete_series(20, k, hbar)
    A = evaluate(alpha2_expr(), r, r.window(2))
    want = hbar**2 * float(k - Fraction(1, 2)) ** 2
    assert np.allclose(A, want * np.eye(A.shape[0]), atol=1e-9 * max(1, hbar**2))


def test_unknown_letter_matrix(ds):
    with pytest.raises(RejectedInput):
        ds.matrix("P0")


# --------------------------------------------------------------- evaluation


def test_evaluate_identity(ds):
    assert np.allclose(evaluate(Expr.one(), ds), np.eye(ds.dim))


@settings(max_examples=30)
@given(st.integers(0, 10_000))
def test_evaluate_is_linear_and_multiplicative(seed):
    r = build_discrete_series(10)
    rng = np.random.default_rng(seed)
    a, b = random_expr(rng), random_expr(rng)
    A, B = evaluate_full(a, r), evaluate_full(b, r)
    assert np.allclose(evaluate_full(a + b + b, r), A + 2 * B)
    assert np.allclose(evaluate_full(a * b, r), A @ B)


def test_hbar_in_coefficients():
    r = build_discrete_series(10, hbar=0.5)
    assert np.allclose(evaluate(P("hbar^2*E"), r), 0.25 * r.E)


def test_opnorm_bounds():
    rng = np.random.default_rng(1)
    M = rng.standard_normal((40, 40))
    exact = np.linalg.norm(M, 2)
    assert abs(opnorm(M) - exact) < 1e-9
    S = sp.csr_array(M)
    assert opnorm(S) == pytest.approx(exact)


# -------------------------------------------------------------------- Laurent


@pytest.mark.parametrize("rel", [("E", "U", "1"), ("D", "U", "U"), ("C", "U", "U^2 - alpha2*inv(E)^2"),
                                 ("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C")])
def test_laurent_relations_exact(rel):
    r = build_laurent_rep(12, hbar=0.7)
    a, b, x = (P(t) for t in rel)
    assert commutator_residual(r, a, b, x, r.window(8)) < 1e-12


def test_laurent_inverse_exact():
    r = build_laurent_rep(6)
    w = r.window(1)
    assert np.allclose((r.E @ r.invE)[np.ix_(w, w)], np.eye(len(w)))


# ----------------------------------------------------------------------- Fock


def test_block_sizes():
    assert fock_block_sizes(8, 3) == [1, 8, 36, 120]
    f = second_quantize(build_discrete_series(8), 3)
    assert f.size == 165
    assert [len(f.window(0, blocks=(n,))) for n in range(4)] == [1, 8, 36, 120]


def test_vacuum_only():
    f = second_quantize(build_discrete_series(8), 0)
    assert f.size == 1
    for g in "EDC":
        assert opnorm(f.matrix(g)) == 0


def test_one_photon_block_is_the_base(fock):
    b = fock.block(1)
    for g in "EDC":
        assert np.allclose(fock.matrix(g).toarray()[b, b], fock.base.matrix(g))


def test_lift_commutes_with_number(fock):
    rng = np.random.default_rng(5)
    A = rng.standard_normal((10, 10))
    L = fock.lift(A)
    assert abs(L @ fock.N - fock.N @ L).max() == 0


def test_lift_is_a_homomorphism(fock):
    rng = np.random.default_rng(6)
    A, B = rng.standard_normal((2, 10, 10))
    lhs = fock.lift(A) @ fock.lift(B) - fock.lift(B) @ fock.lift(A)
    assert abs(lhs - fock.lift(A @ B - B @ A)).max() < 1e-12


def test_ladder_operators(fock):
    a0, a0d = fock.annihilator(0), fock.creator(0)
    one = fock.window(0, blocks=(0, 1))
    comm = (a0 @ a0d - a0d @ a0).toarray()[np.ix_(one, one)]
    assert np.allclose(comm, np.eye(len(one)))


@pytest.mark.parametrize("a, b, x", [("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C"), ("E", "alpha2", "0")])
def test_fock_brackets(fock, a, b, x):
    assert commutator_residual(fock, P(a), P(b), P(x), fock.window(3)) < 1e-10


def test_fock_shift_one_photon(fock):
    assert commutator_residual(fock, P("E"), P("U"), P("1"), fock.window(4, blocks=(1, 2))) < 1e-10
    assert commutator_residual(fock, P("D"), P("U"), P("U"), fock.window(4, blocks=(1,))) < 1e-10


def test_fock_inverse_misses_vacuum(fock):
    assert 0 not in fock.inverse_blocks


def test_resource_guard():
    with pytest.raises(ResourceGuard):
        second_quantize(build_discrete_series(64), 4, budget=10_000)


def test_casimir_on_fock(fock):
    vals = casimir_basis_values(fock, 1)
    assert np.allclose(vals, 0.25)
    s = casimir_samples(fock, 50, seed=3)
    assert s.min() >= 0.25 - 1e-8
    assert np.array_equal(s, casimir_samples(fock, 50, seed=3))


@pytest.mark.parametrize("blocks", [(0,), (0, 1)])
def test_casimir_rejects_vacuum(fock, blocks):
    with pytest.raises(RejectedInput, match="vacuum"):
        casimir_samples(fock, 4, blocks=blocks)
    with pytest.raises(RejectedInput, match="vacuum"):
        casimir_basis_values(fock, 0)


# ----------------------------------------------------------------- two sectors


def test_two_sector_shape(two):
    assert two.size == 45 * 45
    mask = two.massive_mask()
    assert set(two.window(0)) <= set(np.nonzero(mask)[0])


def test_sectors_commute_numerically(two):
    for a in ("Ep", "Dp", "Cp"):
        for b in ("Em", "Dm", "Cm"):
            A, B = two.matrix(a), two.matrix(b)
            assert abs(A @ B - B @ A).max() < 1e-12


def test_pair_canonical(two):
    w = two.window(2)
    assert commutator_residual(two, P("P1", PAIR), P("X1", PAIR), P("1", PAIR), w) < 1e-9
    assert commutator_residual(two, P("X0", PAIR), P("X1", PAIR), P("0", PAIR), w) < 1e-9


def test_pair_rejects_vacuum_only_sector():
    f = second_quantize(build_discrete_series(8), 0)
    g = second_quantize(build_discrete_series(8), 1)
    with pytest.raises(RejectedInput, match="massive window"):
        build_two_sector(f, g)


def test_pair_rejects_mixed_hbar():
    f = second_quantize(build_discrete_series(8), 1)
    g = second_quantize(build_discrete_series(8, hbar=2.0), 1)
    with pytest.raises(RejectedInput, match="hbar"):
        build_two_sector(f, g)


# ---------------------------------------------------------------------- grid


def test_grid_rejects_small():
    with pytest.raises(RejectedInput):
        build_grid_rep(32)


def test_grid_second_order():
    res = convergence_check((128, 256), which="E.D")
    assert res["order"][0] > 1.8
    res = convergence_check((128, 256), which="alpha2")
    assert res["order"][0] > 1.8


@pytest.mark.parametrize("which", ["E.C", "D.C"])
def test_grid_exact_relations(which):
    res = convergence_check((128, 256), which=which)
    assert max(res["residual"]) < 1e-9


def test_grid_hermitian():
    g = build_grid_rep(64)
    for name in "EDC":
        M = g.matrix(name)
        assert abs(M - M.conj().T).max() < 1e-12


# --------------------------------------------------------------------- misc


def test_dump_matrices(tmp_path, ds):
    path = tmp_path / "ds.npz"
    dump_matrices(ds, path)
    with np.load(path) as z:
        assert set(z.files) == {"E", "D", "C", "hbar"}
        assert np.array_equal(z["D"], ds.D)


def test_config_env_and_overrides():
    c = NumericConfig.from_env({"CONFALG_DIM": "24", "CONFALG_SEED": "9"}, seed=4, photons=None)
    assert (c.dim, c.seed, c.photons) == (24, 4, 3)
    with pytest.raises(RejectedInput):
        NumericConfig.from_env({"CONFALG_GRID": "big"})


def test_small_suite_passes():
    cfg = NumericConfig(dim=12, photons=2, grid=256, samples=50, oracle_count=20)
    rep = run_numerical_suite(cfg)
    bad = [(e.id, e.value) for e in rep["entries"] if e.counted and e.status != "PASS"]
    assert bad == []
