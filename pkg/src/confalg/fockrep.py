"""Numerical oracle: truncated lowest-weight representations of the 2d
conformal generators, their second quantization, a two-sector product for
localisation observables, and a finite-difference frequency grid.

Conventions (frozen; the symbolic side uses the same bracket)::

    K0|n> = (n+k)|n>,  K+|n> = sqrt((n+1)(n+2k))|n+1>
    K1 = (K+ + K-)/2,  K2 = (K+ - K-)/(2i)
    E = hbar (K0 - K1),  D = hbar K2,  C = hbar (K0 + K1)

With ``(A, B) = [A, B]/(i hbar)`` this gives ``(E,D) = E``, ``(E,C) = 2D``,
``(D,C) = C`` and ``alpha^2 = hbar^2 (k - 1/2)^2``.  Expressions of letter
degree ``d`` are exact on ``window(d)``: basis states whose mode indices all
stay below ``dim - d``.

Inverse letters are realized by spectral inversion of ``E`` on its positive
spectral subspace (the photon blocks ``N >= 1``).  Relations where an
inverse sits between two truncation defects, such as ``(D, U) = U``, are
only exact in the one-photon block; in higher blocks the residual shrinks
with ``dim`` but does not reach rounding level.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp

from .ncalg import Expr, RejectedInput

__all__ = [
    "SingleParticleRep",
    "FockRep",
    "TwoSectorRep",
    "GridRep",
    "ResourceGuard",
    "build_discrete_series",
    "build_laurent_rep",
    "second_quantize",
    "cached_fock",
    "build_two_sector",
    "build_grid_rep",
    "evaluate",
    "commutator_residual",
    "casimir_samples",
    "casimir_basis_values",
    "convergence_check",
    "gaussian_profile",
    "grid_alpha2",
    "opnorm",
    "dump_matrices",
    "DEFAULT_BUDGET",
    "DEFAULT_EPS_MIN",
    "NumericConfig",
    "NumericalSuite",
    "run_numerical_suite",
    "run_numerical_record",
    "random_expr",
]

DEFAULT_BUDGET = 250_000  # Fock states
DEFAULT_EPS_MIN = 1e-6
DENSE_INVERSE_LIMIT = 2500  # largest photon block inverted densely
EXACT_NORM_LIMIT = 1500


class ResourceGuard(RejectedInput):
    """A requested construction is larger than the configured budget."""


# ------------------------------------------------------------------ norms


def _dense(M) -> np.ndarray:
    return M.toarray() if sp.issparse(M) else np.asarray(M)


def opnorm(M, bound: str = "upper") -> float:
    """Operator 2-norm; exact for small matrices.

    Large sparse matrices get a cheap bound: ``sqrt(|M|_1 |M|_inf)`` from
    above, or the largest column 2-norm from below.
    """
    if M.shape[0] == 0 or M.shape[1] == 0:
        return 0.0
    if max(M.shape) <= EXACT_NORM_LIMIT:
        return float(np.linalg.norm(_dense(M), 2))
    if bound == "upper":
        A = abs(sp.csr_array(M))
        return float(math.sqrt(A.sum(axis=0).max() * A.sum(axis=1).max()))
    A = sp.csc_array(M)
    return float(np.sqrt(np.asarray(abs(A).power(2).sum(axis=0)).max()))


# ------------------------------------------------------- single particle


def _coerce_k(k) -> Fraction:
    try:
        k = Fraction(k)
    except (TypeError, ValueError) as exc:
        raise RejectedInput(f"weight k must be rational, got {k!r}") from exc
    if k <= 0:
        raise RejectedInput(f"weight k must be positive, got {k}")
    return k


def ladder(dim: int, k) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(K0, K+, K-)`` on the first ``dim`` states of the weight-``k`` series."""
    k = float(_coerce_k(k))
    n = np.arange(dim, dtype=float)
    K0 = np.diag(n + k)
    Kp = np.diag(np.sqrt((n[:-1] + 1) * (n[:-1] + 2 * k)), -1)
    return K0, Kp, Kp.T.copy()


@dataclass(eq=False)
class SingleParticleRep:
    dim: int
    k: Fraction
    hbar: float
    E: np.ndarray
    D: np.ndarray
    C: np.ndarray
    algebra: str = "conf2d"

    def window(self, d: int = 0) -> np.ndarray:
        return np.arange(max(self.dim - d, 0))

    @cached_property
    def invE(self) -> np.ndarray:
        return np.linalg.inv(self.E)

    def matrix(self, letter: str):
        if letter in ("E", "D", "C"):
            return getattr(self, letter)
        if letter == "invE":
            return self.invE
        raise RejectedInput(f"no matrix for letter {letter!r} in {type(self).__name__}")

    @property
    def size(self) -> int:
        return self.dim

    def identity(self):
        return np.eye(self.dim, dtype=complex)


def build_discrete_series(dim: int, k=1, hbar: float = 1.0) -> SingleParticleRep:
    """Truncated lowest-weight realization of E, D, C (all hermitian)."""
    if dim < 8:
        raise RejectedInput(f"dim must be at least 8, got {dim}")
    if hbar <= 0:
        raise RejectedInput("hbar must be positive")
    k = _coerce_k(k)
    K0, Kp, Km = ladder(dim, k)
    K1 = (Kp + Km) / 2
    K2 = (Kp - Km) / 2j
    return SingleParticleRep(
        dim=dim,
        k=k,
        hbar=float(hbar),
        E=hbar * (K0 - K1).astype(complex),
        D=hbar * K2,
        C=hbar * (K0 + K1).astype(complex),
    )


@dataclass(eq=False)
class LaurentRep(SingleParticleRep):
    """Monomial realization of the one-photon operators on powers of ``w``.

    ``E`` multiplies by ``w`` (so ``invE`` is an exact shift), ``D`` is
    diagonal and ``C`` lowers by one.  Not unitary; used only as an exact
    cross-check of inverse-letter algebra.  The window trims ``d`` states
    from both ends.
    """

    offset: int = 0

    def window(self, d: int = 0) -> np.ndarray:
        return np.arange(d, max(self.dim - d, d))

    @cached_property
    def invE(self) -> np.ndarray:
        return np.eye(self.dim, k=1, dtype=complex) / self.hbar


def build_laurent_rep(half_width: int, hbar: float = 1.0) -> LaurentRep:
    """Exact banded realization on ``w^a``, ``a = n + 1/2``, ``-L <= n < L``."""
    if half_width < 4:
        raise RejectedInput("half_width must be at least 4")
    dim = 2 * half_width
    a = np.arange(-half_width, half_width, dtype=float) + 0.5
    E = hbar * np.eye(dim, k=-1, dtype=complex)
    D = -1j * hbar * np.diag(a + 0.5).astype(complex)
    C = -hbar * np.diag(((a + 0.5) * (a - 0.5))[1:], 1).astype(complex)
    return LaurentRep(dim=dim, k=Fraction(1), hbar=float(hbar), E=E, D=D, C=C, offset=half_width)


# --------------------------------------------------------------- Fock space


def fock_block_sizes(dim: int, nmax: int) -> list[int]:
    return [math.comb(dim + n - 1, n) for n in range(nmax + 1)]


@dataclass(eq=False)
class FockRep:
    """Symmetric Fock space over the truncated one-particle space.

    States are sorted tuples of occupied mode indices, grouped by photon
    number; lifts ``sum A_jl a_j^dag a_l`` are block diagonal.
    """

    base: SingleParticleRep
    nmax: int
    states: list
    offsets: list
    lifts: dict = field(default_factory=dict)
    eps_min: float = DEFAULT_EPS_MIN
    algebra: str = "conf2d"

    @property
    def hbar(self) -> float:
        return self.base.hbar

    @property
    def size(self) -> int:
        return len(self.states)

    def block(self, n: int) -> slice:
        return slice(self.offsets[n], self.offsets[n + 1])

    @cached_property
    def photon_number(self) -> np.ndarray:
        return np.array([len(s) for s in self.states])

    @cached_property
    def N(self):
        return sp.diags(self.photon_number.astype(complex)).tocsr()

    @cached_property
    def _index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def window(self, d: int = 0, blocks=None) -> np.ndarray:
        """States whose modes all lie below ``dim - d``, optionally by block."""
        cut = self.base.dim - d
        keep = []
        for i, s in enumerate(self.states):
            if blocks is not None and len(s) not in blocks:
                continue
            if all(m < cut for m in s):
                keep.append(i)
        return np.array(keep, dtype=int)

    def lift(self, A) -> sp.csr_array:
        A = np.asarray(A)
        rows, cols, vals = [], [], []
        index = self._index
        nz = [np.nonzero(A[:, l])[0] for l in range(A.shape[1])]
        for i, s in enumerate(self.states):
            for l in set(s):
                nl = s.count(l)
                rest = list(s)
                rest.remove(l)
                for j in nz[l]:
                    t = tuple(sorted(rest + [int(j)]))
                    rows.append(index[t])
                    cols.append(i)
                    vals.append(A[j, l] * math.sqrt(nl * t.count(j)))
        n = self.size
        return sp.csr_array((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))

    def annihilator(self, j: int) -> sp.csr_array:
        rows, cols, vals = [], [], []
        for i, s in enumerate(self.states):
            if j in s:
                rest = list(s)
                rest.remove(j)
                rows.append(self._index[tuple(rest)])
                cols.append(i)
                vals.append(math.sqrt(s.count(j)))
        n = self.size
        return sp.csr_array((np.array(vals, dtype=complex), (rows, cols)), shape=(n, n))

    def creator(self, j: int) -> sp.csr_array:
        return self.annihilator(j).conj().T.tocsr()

    @cached_property
    def inverse_blocks(self) -> tuple:
        """Photon blocks small enough to invert E densely (vacuum excluded)."""
        return tuple(
            n
            for n in range(1, self.nmax + 1)
            if self.offsets[n + 1] - self.offsets[n] <= DENSE_INVERSE_LIMIT
        )

    @cached_property
    def invE(self) -> sp.csr_array:
        """Spectral inverse of E on its positive part, block by block.

        Blocks listed outside :attr:`inverse_blocks` are left at zero and
        must not be part of any window that evaluates inverse letters.
        """
        E = self.lifts["E"]
        blocks = []
        for n in range(self.nmax + 1):
            b = self.block(n)
            size = b.stop - b.start
            if n not in self.inverse_blocks:
                blocks.append(sp.csr_array((size, size), dtype=complex))
                continue
            Eb = E[b, b].toarray()
            if not Eb.imag.any():
                Eb = Eb.real  # E is real in the ladder basis; much faster
            w, v = np.linalg.eigh(Eb)
            if w.min() <= self.eps_min:
                raise RejectedInput(
                    f"E has eigenvalue {w.min():.3g} <= eps_min in block N={n}"
                )
            blocks.append((v / w) @ v.conj().T)
        return sp.block_diag(blocks, format="csr").astype(complex)

    def matrix(self, letter: str):
        if letter in self.lifts:
            return self.lifts[letter]
        if letter == "invE":
            return self.invE
        if letter == "N":
            return self.N
        raise RejectedInput(f"no matrix for letter {letter!r} in FockRep")

    def identity(self):
        return sp.identity(self.size, dtype=complex, format="csr")


def second_quantize(rep: SingleParticleRep, nmax: int, budget: int = DEFAULT_BUDGET) -> FockRep:
    if nmax < 0:
        raise RejectedInput("nmax must be non-negative")
    sizes = fock_block_sizes(rep.dim, nmax)
    if sum(sizes) > budget:
        raise ResourceGuard(
            f"Fock space with dim={rep.dim}, nmax={nmax} has {sum(sizes)} states; budget is {budget}"
        )
    states = []
    offsets = [0]
    for n in range(nmax + 1):
        states.extend(itertools.combinations_with_replacement(range(rep.dim), n))
        offsets.append(len(states))
    fock = FockRep(base=rep, nmax=nmax, states=states, offsets=offsets)
    for name in ("E", "D", "C"):
        fock.lifts[name] = fock.lift(rep.matrix(name))
    return fock


@lru_cache(maxsize=8)
def cached_fock(dim: int, nmax: int, k=1, hbar: float = 1.0) -> FockRep:
    return second_quantize(build_discrete_series(dim, k, hbar), nmax)


# --------------------------------------------------------------- two sectors

_PAIR = {"Ep": ("E", 0), "Dp": ("D", 0), "Cp": ("C", 0), "invEp": ("invE", 0),
         "Em": ("E", 1), "Dm": ("D", 1), "Cm": ("C", 1), "invEm": ("invE", 1)}


@dataclass(eq=False)
class TwoSectorRep:
    plus: FockRep
    minus: FockRep
    eps_min: float
    algebra: str = "conf2d-pair"

    @property
    def hbar(self) -> float:
        return self.plus.hbar

    @property
    def size(self) -> int:
        return self.plus.size * self.minus.size

    @cached_property
    def _cache(self) -> dict:
        return {}

    def matrix(self, letter: str):
        if letter not in _PAIR:
            raise RejectedInput(f"no matrix for letter {letter!r} in TwoSectorRep")
        if letter not in self._cache:
            base, side = _PAIR[letter]
            Ip = sp.identity(self.plus.size, dtype=complex, format="csr")
            Im = sp.identity(self.minus.size, dtype=complex, format="csr")
            if side == 0:
                M = sp.kron(self.plus.matrix(base), Im, format="csr")
            else:
                M = sp.kron(Ip, self.minus.matrix(base), format="csr")
            self._cache[letter] = M
        return self._cache[letter]

    def window(self, d: int = 0, massive: bool = True) -> np.ndarray:
        bp = self.plus.inverse_blocks if massive else None
        bm = self.minus.inverse_blocks if massive else None
        wp = self.plus.window(d, bp)
        wm = self.minus.window(d, bm)
        return (wp[:, None] * self.minus.size + wm[None, :]).ravel()

    def massive_mask(self) -> np.ndarray:
        npl = self.plus.photon_number
        nmi = self.minus.photon_number
        return ((npl[:, None] >= 1) & (nmi[None, :] >= 1)).ravel()

    def identity(self):
        return sp.identity(self.size, dtype=complex, format="csr")


def build_two_sector(plus: FockRep, minus: FockRep, eps_min: float = DEFAULT_EPS_MIN) -> TwoSectorRep:
    if eps_min <= 0:
        raise RejectedInput("eps_min must be positive")
    if plus.hbar != minus.hbar:
        raise RejectedInput("sectors use different hbar")
    for name, f in (("plus", plus), ("minus", minus)):
        f.eps_min = eps_min
        if not f.inverse_blocks:
            raise RejectedInput(
                f"empty massive window: {name} sector has no invertible photon block (nmax={f.nmax})"
            )
        f.invE  # spectral check raises if a block touches eps_min
    return TwoSectorRep(plus=plus, minus=minus, eps_min=eps_min)


# ------------------------------------------------------------------ grid


@dataclass(eq=False)
class GridRep:
    """One-photon frequency representation on ``w_j = j dw``, ``j = 1..M``.

    ``E = hbar w``, ``D = hbar sqrt(w) (-i d/dw) sqrt(w)`` and
    ``C = hbar sqrt(w) (-d^2/dw^2) sqrt(w)``, with central differences and
    zero boundary values.
    """

    M: int
    omega_max: float
    hbar: float
    omega: np.ndarray
    E: sp.csr_array
    D: sp.csr_array
    C: sp.csr_array
    algebra: str = "conf2d"

    @property
    def d_omega(self) -> float:
        return self.omega_max / self.M

    @property
    def size(self) -> int:
        return self.M

    def window(self, d: int = 0) -> np.ndarray:
        return np.arange(d, self.M - d)

    @cached_property
    def invE(self):
        return sp.diags(1.0 / (self.hbar * self.omega)).astype(complex).tocsr()

    def matrix(self, letter: str):
        if letter in ("E", "D", "C"):
            return getattr(self, letter)
        if letter == "invE":
            return self.invE
        raise RejectedInput(f"no matrix for letter {letter!r} in GridRep")

    def identity(self):
        return sp.identity(self.M, dtype=complex, format="csr")


def build_grid_rep(M: int, omega_max: float = 20.0, hbar: float = 1.0) -> GridRep:
    if M < 64:
        raise RejectedInput(f"grid size must be at least 64, got {M}")
    if M > 2**22:
        raise ResourceGuard(f"grid size {M} is too large")
    h = omega_max / M
    w = h * np.arange(1, M + 1)
    s = sp.diags(np.sqrt(w))
    d1 = sp.diags([-np.ones(M - 1), np.ones(M - 1)], [-1, 1]) / (2 * h)
    d2 = sp.diags([np.ones(M - 1), -2 * np.ones(M), np.ones(M - 1)], [-1, 0, 1]) / h**2
    E = sp.diags(hbar * w).astype(complex)
    D = hbar * (s @ (-1j * d1) @ s)
    C = hbar * (s @ (-d2) @ s)
    return GridRep(
        M=M, omega_max=float(omega_max), hbar=float(hbar), omega=w,
        E=sp.csr_array(E), D=sp.csr_array(D), C=sp.csr_array(C.astype(complex)),
    )


# --------------------------------------------------------------- evaluation


def _expanded(e: Expr, rep) -> Expr:
    from .algebras import make_algebra

    alg = make_algebra(rep.algebra)
    return alg.expand(e)


def evaluate_full(e: Expr, rep):
    """Matrix of ``e`` on the whole truncated space (no window applied)."""
    e = _expanded(e, rep)
    hbar = rep.hbar
    sparse = not isinstance(rep, SingleParticleRep)
    acc = None
    cache: dict = {}

    def word_matrix(w):
        if w in cache:
            return cache[w]
        if len(w) == 1:
            M = rep.matrix(w[0])
        else:
            M = word_matrix(w[:-1]) @ rep.matrix(w[-1])
        cache[w] = M
        return M

    for word, coef in sorted(e.terms().items()):
        c = coef.evaluate(hbar)
        M = rep.identity() if not word else word_matrix(word)
        acc = c * M if acc is None else acc + c * M
    if acc is None:
        acc = 0 * rep.identity()
    if sparse:
        acc = sp.csr_array(acc)
    return acc


def restrict(M, window):
    if window is None:
        return M
    window = np.asarray(window)
    if sp.issparse(M):
        return sp.csr_array(M)[window][:, window]
    return M[np.ix_(window, window)]


def evaluate(e: Expr, rep, window=None):
    """Matrix of ``e`` restricted to ``window`` (index array; None = all)."""
    return restrict(evaluate_full(e, rep), window)


def commutator_residual(rep, A: Expr, B: Expr, expected: Expr, window=None) -> float:
    """``|[A,B]/(i hbar) - expected|`` on the window over ``max(1, |A||B|)``."""
    a = evaluate_full(A, rep)
    b = evaluate_full(B, rep)
    x = evaluate_full(expected, rep)
    R = restrict((a @ b - b @ a) / (1j * rep.hbar) - x, window)
    if R.shape[0] == 0:
        raise RejectedInput("empty window")
    scale = max(1.0, opnorm(restrict(a, window), "lower") * opnorm(restrict(b, window), "lower"))
    return opnorm(R, "upper") / scale


# ----------------------------------------------------------------- Casimir


def alpha2_expr() -> Expr:
    from .algebras import make_algebra

    return make_algebra("conf2d").derived["alpha2"]


def casimir_basis_values(fock: FockRep, photons: int = 1) -> np.ndarray:
    """Diagonal of alpha^2 on the window(2) basis states of one photon block."""
    if photons < 1:
        raise RejectedInput("vacuum excluded: E vanishes there")
    A = evaluate_full(alpha2_expr(), fock)
    win = fock.window(2, blocks=(photons,))
    return np.real(restrict(A, win).diagonal())


def casimir_samples(fock: FockRep, nstates: int, seed: int = 0, blocks=None) -> np.ndarray:
    """Expectation of alpha^2 in random normalized states.

    State ``i`` lives in block ``blocks[i % len(blocks)]`` (default: every
    block with ``N >= 1``), restricted to window(2), with complex gaussian
    coefficients drawn from a generator seeded by ``(seed, i)``.
    """
    if blocks is None:
        blocks = tuple(range(1, fock.nmax + 1))
    blocks = tuple(blocks)
    if not blocks or min(blocks) < 1:
        raise RejectedInput("vacuum excluded: E vanishes there")
    if max(blocks) > fock.nmax:
        raise RejectedInput(f"block N={max(blocks)} exceeds nmax={fock.nmax}")
    A = evaluate_full(alpha2_expr(), fock)
    wins = {n: fock.window(2, blocks=(n,)) for n in blocks}
    subs = {n: restrict(A, wins[n]) for n in blocks}
    out = np.empty(nstates)
    for i in range(nstates):
        n = blocks[i % len(blocks)]
        rng = np.random.default_rng([seed, i])
        m = len(wins[n])
        v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        v /= np.linalg.norm(v)
        out[i] = np.real(np.vdot(v, subs[n] @ v))
    return out


# ----------------------------------------------------------------- grid checks


def gaussian_profile(grid: GridRep, center: float | None = None, width: float | None = None) -> np.ndarray:
    c = 0.4 * grid.omega_max if center is None else center
    s = 0.06 * grid.omega_max if width is None else width
    return np.exp(-((grid.omega - c) ** 2) / (2 * s * s)).astype(complex)


_GRID_RELATIONS = {
    "E.D": ("E", "D", "E"),
    "E.C": ("E", "C", "2*D"),
    "D.C": ("D", "C", "C"),
}


def grid_relation_residual(grid: GridRep, which: str = "E.D", f=None) -> float:
    from .algebras import make_algebra
    from .parser import parse_expr

    a, b, x = _GRID_RELATIONS[which]
    alg = make_algebra("conf2d")
    A, B, X = (evaluate_full(parse_expr(t, alg), grid) for t in (a, b, x))
    f = gaussian_profile(grid) if f is None else f
    r = (A @ (B @ f) - B @ (A @ f)) / (1j * grid.hbar) - X @ f
    inner = grid.window(2)
    return float(np.linalg.norm(r[inner]) / np.linalg.norm(f))


def grid_alpha2(grid: GridRep, f=None) -> float:
    f = gaussian_profile(grid) if f is None else f
    A = evaluate_full(alpha2_expr(), grid)
    return float(np.real(np.vdot(f, A @ f) / np.vdot(f, f)))


def convergence_check(Ms=(256, 512), omega_max: float = 20.0, hbar: float = 1.0, which: str = "E.D") -> dict:
    """Residuals of one bracket relation on successive grids and the order.

    ``which`` is ``E.D``, ``E.C``, ``D.C`` or ``alpha2`` (error of the
    one-photon Casimir against ``hbar^2/4``).
    """
    Ms = tuple(int(m) for m in Ms)
    res = []
    for M in Ms:
        g = build_grid_rep(M, omega_max, hbar)
        if which == "alpha2":
            res.append(abs(grid_alpha2(g) - hbar**2 / 4))
        else:
            res.append(grid_relation_residual(g, which))
    orders = [
        math.log(res[i] / res[i + 1], Ms[i + 1] / Ms[i]) for i in range(len(Ms) - 1)
    ]
    return {"M": list(Ms), "residual": res, "order": orders}


# -------------------------------------------------------------------- dump


def dump_matrices(rep, path, letters=("E", "D", "C")) -> None:
    """Write the generator matrices to an ``.npz`` archive (dense arrays)."""
    arrays = {name: _dense(rep.matrix(name)) for name in letters}
    arrays["hbar"] = np.array(rep.hbar)
    np.savez(path, **arrays)


# ------------------------------------------------------------ random exprs


def random_expr(rng: np.random.Generator, letters=("E", "D", "C"), max_degree: int = 3, max_terms: int = 3) -> Expr:
    """Small random expression with rational and imaginary coefficients."""
    from .scalar import GaussRat

    out = Expr.zero()
    for _ in range(int(rng.integers(1, max_terms + 1))):
        deg = int(rng.integers(1, max_degree + 1))
        word = tuple(str(x) for x in rng.choice(letters, size=deg))
        re = Fraction(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))
        im = Fraction(int(rng.integers(-1, 2)), 2)
        if re == 0 and im == 0:
            re = Fraction(1)
        out = out + Expr.word(word, GaussRat(re, im))
    return out


# --------------------------------------------------------------- the suite


@dataclass(frozen=True)
class NumericConfig:
    dim: int = 64
    photons: int = 3
    grid: int = 512
    seed: int = 0
    hbar: float = 1.0
    samples: int = 1000
    pair_dim: int = 8
    pair_photons: int = 2
    oracle_count: int = 100
    omega_max: float = 20.0

    ENV = {"dim": "CONFALG_DIM", "photons": "CONFALG_PHOTONS", "grid": "CONFALG_GRID", "seed": "CONFALG_SEED"}

    @classmethod
    def from_env(cls, environ=None, **overrides) -> NumericConfig:
        """Defaults, then ``CONFALG_*`` variables, then non-None overrides."""
        import os

        environ = os.environ if environ is None else environ
        vals = {}
        for key, var in cls.ENV.items():
            if var in environ:
                try:
                    vals[key] = int(environ[var])
                except ValueError:
                    raise RejectedInput(f"{var} must be an integer, got {environ[var]!r}") from None
        vals.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**vals)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _outcome(id, status, value, tol, note="", counted=True, family=None):
    from .catalog import Outcome

    fam = family or ".".join(id.split(".")[:2])
    return Outcome(
        id=id, family=fam, algebra="numerical", status=status, recipe="numerical",
        residual=f"{value:.6e}", note=note if note else f"tolerance {tol:.0e}",
        counted=counted, value=float(value),
    )


def _bounded(id, value, tol, note="", counted=True, family=None):
    return _outcome(id, "PASS" if value < tol else "FAIL", value, tol, note, counted, family)


class NumericalSuite:
    """Lazily built representations plus the individual checks."""

    def __init__(self, config: NumericConfig | None = None):
        self.config = config or NumericConfig()
        self._alg = None

    # -- shared objects
    def parse(self, text: str, algebra: str = "conf2d") -> Expr:
        from .algebras import make_algebra
        from .parser import parse_expr

        return parse_expr(text, make_algebra(algebra))

    @cached_property
    def single(self) -> SingleParticleRep:
        c = self.config
        return build_discrete_series(c.dim, 1, c.hbar)

    @cached_property
    def fock(self) -> FockRep:
        c = self.config
        return cached_fock(c.dim, c.photons, 1, c.hbar)

    @cached_property
    def laurent(self) -> LaurentRep:
        return build_laurent_rep(16, self.config.hbar)

    @cached_property
    def pair(self) -> TwoSectorRep:
        c = self.config
        plus = second_quantize(build_discrete_series(c.pair_dim, 1, c.hbar), c.pair_photons)
        minus = second_quantize(build_discrete_series(c.pair_dim, 1, c.hbar), c.pair_photons)
        return build_two_sector(plus, minus)

    def _rel(self, rep, a, b, x, window, algebra="conf2d"):
        return commutator_residual(rep, self.parse(a, algebra), self.parse(b, algebra), self.parse(x, algebra), window)

    # -- checks; each yields Outcomes
    def single_particle(self):
        r = self.single
        for a, b, x in (("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C")):
            yield _bounded(f"ds.bracket.{a}.{b}", self._rel(r, a, b, x, r.window(2)), 1e-12)
        A = evaluate(self.parse("alpha2"), r, r.window(2))
        h2 = r.hbar**2
        dev = opnorm(A - h2 / 4 * np.eye(A.shape[0])) / h2
        yield _bounded("ds.casimir.value", dev, 1e-10, "alpha2 = hbar^2/4 on window(2) at k=1")
        for g in "EDC":
            yield _bounded(f"ds.casimir.inv.{g}", self._rel(r, g, "alpha2", "0", r.window(3)), 1e-10)
        yield _bounded("ds.transfU.E", self._rel(r, "E", "U", "1", r.window(4)), 1e-10)
        yield _bounded("ds.transfU.D", self._rel(r, "D", "U", "U", r.window(4)), 1e-10)
        yield _bounded("ds.energy.C.E.D", self._rel(r, "C", "E", "-2*D", r.window(2)), 1e-10)
        yield _bounded("ds.energy.C.E.U", self._rel(r, "C", "E", "-2*E.U", r.window(4)), 1e-10)

    def laurent_checks(self):
        r = self.laurent
        w = r.window(8)
        yield _bounded("laurent.transfU.D", self._rel(r, "D", "U", "U", w), 1e-12)
        yield _bounded("laurent.shift.U.C", self._rel(r, "C", "U", "U^2 - alpha2*inv(E)^2", w), 1e-12)
        diff = evaluate(self.parse("C - U*E*U - alpha2*inv(E)"), r, w)
        yield _bounded("laurent.casimir.def", opnorm(diff) / max(1.0, opnorm(evaluate(self.parse("C"), r, w))), 1e-12)

    def fock_checks(self):
        f = self.fock
        w2, w3 = f.window(2), f.window(3)
        for a, b, x in (("E", "D", "E"), ("E", "C", "2*D"), ("D", "C", "C")):
            yield _bounded(f"fock.bracket.{a}.{b}", self._rel(f, a, b, x, w2), 1e-10)
        yield from self.number_checks()
        for g in "EDC":
            yield _bounded(f"fock.casimir.inv.{g}", self._rel(f, g, "alpha2", "0", w3), 1e-10)
        inv = f.inverse_blocks
        if inv:
            wi = f.window(4, blocks=inv)
            note = f"photon blocks {list(inv)}"
            yield _bounded("fock.transfU.E", self._rel(f, "E", "U", "1", wi), 1e-10, note)
            yield _bounded("fock.energy.C.E.U", self._rel(f, "C", "E", "-2*E.U", wi), 1e-10, note)
            yield _bounded("fock.transfU.D", self._rel(f, "D", "U", "U", f.window(4, blocks=(1,))), 1e-10,
                           "one-photon block")
            multi = tuple(n for n in inv if n >= 2)
            if multi:
                v = self._rel(f, "D", "U", "U", f.window(4, blocks=multi))
                yield _outcome("fock.transfU.D.multiphoton", "INFO", v, 0,
                               f"truncated inverse in blocks {list(multi)}; shrinks with dim, not window-exact",
                               counted=False)

    def number_checks(self):
        f = self.fock
        for g in "EDC":
            yield _bounded(f"fock.number.{g}", _number_residual(f, g), 1e-13, family="number.inv")

    def casimir_checks(self):
        f = self.fock
        h2 = f.hbar**2
        vals = casimir_basis_values(f, 1)
        yield _bounded("casimir.bound.basis", float(np.max(np.abs(vals - h2 / 4))), 1e-10,
                       f"{len(vals)} one-photon window basis states", family="casimir.bound")
        s = casimir_samples(f, self.config.samples, self.config.seed)
        gap = max(0.0, h2 / 4 - float(s.min()))
        yield _bounded("casimir.bound.random", gap, 1e-8,
                       f"{len(s)} random states, seed {self.config.seed}, min {s.min():.12f}",
                       family="casimir.bound")

    def grid_checks(self):
        c = self.config
        Ms = (c.grid // 2, c.grid)
        for which in ("E.D", "alpha2"):
            res = convergence_check(Ms, c.omega_max, c.hbar, which)
            order = res["order"][0]
            st = "PASS" if order >= 1.9 else "FAIL"
            yield _outcome(f"grid.order.{which}", st, order, 1.9,
                           f"residuals {res['residual'][0]:.3e} -> {res['residual'][1]:.3e}; order must be >= 1.9")
        a_half = grid_alpha2(build_grid_rep(Ms[0], c.omega_max, c.hbar))
        a_full = grid_alpha2(build_grid_rep(Ms[1], c.omega_max, c.hbar))
        ds = float(np.real(evaluate(self.parse("alpha2"), self.single, self.single.window(2))[0, 0]))
        envelope = 2 * abs(a_half - a_full) / 3
        yield _outcome("grid.alpha2.crossoracle", "PASS" if abs(a_full - ds) <= envelope else "FAIL",
                       abs(a_full - ds), envelope, f"grid {a_full:.10f} vs ladder {ds:.10f}, envelope {envelope:.3e}")

    def pair_checks(self):
        two = self.pair
        w = two.window(2)
        A = "conf2d-pair"
        yield _bounded("pair.positions.commute", self._rel(two, "X0", "X1", "0", w, A), 1e-9)
        for m in range(2):
            for n in range(2):
                x = "-1" if m == n == 0 else "1" if m == n else "0"
                yield _bounded(f"pair.canonical.P{m}.X{n}", self._rel(two, f"P{m}", f"X{n}", x, w, A), 1e-9)
        for x in ("X0", "X1"):
            M = evaluate(self.parse(x, A), two, two.window(0))
            yield _bounded(f"pair.hermitian.{x}", opnorm(M - M.conj().T) / max(1.0, opnorm(M)), 1e-12)
        P2 = _dense(evaluate(self.parse("Psq", A), two, two.window(0)))
        lo = float(np.linalg.eigvalsh(P2).min())
        yield _outcome("pair.psq.positive", "PASS" if lo > 0 else "FAIL", lo, 0, "smallest eigenvalue of P^2")
        win = set(two.window(0).tolist())
        leaked = sum(
            1 for i in range(two.size) if i in win and not two.massive_mask()[i]
        )
        single_sector = [i for i in range(two.size) if two.minus.photon_number[i % two.minus.size] == 0
                         and two.plus.photon_number[i // two.minus.size] >= 1]
        st = "PASS" if leaked == 0 and not (set(single_sector) & win) else "FAIL"
        yield _outcome("pair.massive.window", st, float(leaked), 0,
                       f"{len(win)} massive states; {len(single_sector)} single-sector states excluded")

    def oracle_checks(self):
        from .algebras import make_algebra
        from .ncalg import commutator, normalize

        alg = make_algebra("conf2d")
        r = self.single
        worst_c = worst_n = 0.0
        n = self.config.oracle_count
        for i in range(n):
            rng = np.random.default_rng([self.config.seed, 7, i])
            a = random_expr(rng)
            b = random_expr(rng)
            c = commutator(a, b, alg)
            w = r.window(a.degree() + b.degree())
            worst_c = max(worst_c, commutator_residual(r, a, b, c, w))
            wa = r.window(a.degree())
            A = evaluate(a, r, wa)
            worst_n = max(worst_n, opnorm(A - evaluate(normalize(a, alg), r, wa)) / max(1.0, opnorm(A)))
        yield _bounded("oracle.commutator", worst_c, 1e-9, f"{n} random pairs, seed {self.config.seed}")
        yield _bounded("oracle.straightening", worst_n, 1e-10, f"{n} random expressions")

    GROUPS = ("single_particle", "laurent_checks", "fock_checks", "casimir_checks",
              "grid_checks", "pair_checks", "oracle_checks")

    def run(self, groups=None) -> list:
        out = []
        for g in groups or self.GROUPS:
            out.extend(getattr(self, g)())
        return out


def _number_residual(f: FockRep, g: str) -> float:
    A = f.lifts[g]
    R = (A @ f.N - f.N @ A) / (1j * f.hbar)
    return opnorm(R) / max(1.0, opnorm(A, "lower") * opnorm(f.N, "lower"))


def run_numerical_suite(config: NumericConfig | None = None, groups=None) -> dict:
    from .catalog import build_report

    suite = NumericalSuite(config)
    entries = suite.run(groups)
    return build_report(entries, config=suite.config.as_dict(), kind="numerical")


_RECORD_GROUPS = {"casimir.bound": "casimir_checks", "number.inv": "number_checks"}


@lru_cache(maxsize=4)
def _record_results(config: NumericConfig, group: str) -> dict:
    return {o.id: o for o in getattr(NumericalSuite(config), group)()}


def run_numerical_record(rec, config: NumericConfig | None = None):
    """Outcome for a numerical-only catalog record."""
    config = config or NumericConfig.from_env()
    group = _RECORD_GROUPS.get(rec.family)
    if group is None:
        raise RejectedInput(f"no numerical check for record {rec.id}")
    key = rec.id if rec.family == "casimir.bound" else "fock.number." + rec.id.rsplit(".", 1)[1]
    o = _record_results(config, group)[key]
    return replace_outcome(o, rec)


def replace_outcome(o, rec):
    from dataclasses import replace as _replace

    return _replace(o, id=rec.id, family=rec.family, algebra=rec.algebra, recipe=rec.recipe)
