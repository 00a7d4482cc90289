"""The shipped algebras, Minkowski/Levi-Civita tensors and derived observables.

Four algebras are available through :func:`make_algebra`:

``conf2d``       E, D, C with the inverse letter ``invE``.
``conf2d-pair``  two commuting copies (suffixes ``p``/``m`` for the two
                 propagation directions) with ``invEp``/``invEm``.
``poincare4d``   P_mu and J_{mu nu} (mu < nu), no inverse letters.
``conf4d``       Poincare + D + C_mu, with ``Q`` the inverse of P^2.

Index conventions: all 4d symbols are stored with lower indices, eta has
signature (+,-,-,-), ``J10`` means ``-J01``.  Derived symbols (U, X_mu, W_mu,
S_{mu nu}, ...) are definitions in terms of letters, see
:func:`derived_definition`.

2d pairing convention (chosen so that (P_mu, X_nu) = -eta_{mu nu}):

    P_0 = -(E+ + E-)      P_1 = E+ - E-       P^2 = 4 E+ E-
    D   = -(D+ + D-)      J_01 = D- - D+
    C_0 = -(C+ + C-)      C_1 = C- - C+
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

from gmpy2 import mpq

from .ncalg import Expr, RejectedInput, UnresolvableBracket, commutator, normalize, sym_product
from .scalar import GaussRat, Scalar

__all__ = [
    "ALGEBRA_NAMES",
    "AlgebraSpec",
    "make_algebra",
    "derived_definition",
    "expand_derived",
    "jacobi",
    "jacobi_sweep",
    "eta",
    "eps_lower",
    "eps_upper",
    "J",
    "dump_algebra",
    "load_algebra",
    "REPRESENTATION_ONLY",
]

ALGEBRA_NAMES = ("conf2d", "conf2d-pair", "poincare4d", "conf4d")

# symbols that only exist in a concrete representation
REPRESENTATION_ONLY = frozenset({"N"})

L = Expr.letter
HALF = GaussRat(mpq(1, 2))


# ---------------------------------------------------------------- tensors


def eta(mu: int, nu: int) -> int:
    """Minkowski metric, signature (+,-,-,-). Its own inverse."""
    if mu != nu:
        return 0
    return 1 if mu == 0 else -1


def _perm_sign(p: Sequence[int]) -> int:
    p = list(p)
    sign = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def eps_lower(mu: int, nu: int, rho: int, sigma: int) -> int:
    """epsilon_{mu nu rho sigma} with epsilon_{0123} = +1."""
    idx = (mu, nu, rho, sigma)
    if len(set(idx)) < 4:
        return 0
    return _perm_sign(idx)


def eps_upper(mu: int, nu: int, rho: int, sigma: int) -> int:
    """epsilon^{mu nu rho sigma}; raising all four indices gives epsilon^{0123} = -1."""
    return eta(mu, mu) * eta(nu, nu) * eta(rho, rho) * eta(sigma, sigma) * eps_lower(
        mu, nu, rho, sigma
    )


def J(mu: int, nu: int) -> Expr:
    """J_{mu nu} as an expression (antisymmetric, stored for mu < nu)."""
    if mu == nu:
        return Expr.zero()
    if mu < nu:
        return L(f"J{mu}{nu}")
    return -L(f"J{nu}{mu}")


def _J_upper(mu: int, nu: int) -> Expr:
    return J(mu, nu).scale(eta(mu, mu) * eta(nu, nu))


def P(mu: int) -> Expr:
    return L(f"P{mu}")


def C(mu: int) -> Expr:
    return L(f"C{mu}")


# ---------------------------------------------------------------- algebra type


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """A named algebra: generators, bracket table, inverse letters, order.

    ``table`` maps ordered generator pairs to their bracket (only nonzero
    entries, both orders).  ``invertibles`` maps an inverse letter to the
    element it inverts; brackets with inverse letters follow from
    ``(A, X^-1) = -X^-1 (A, X) X^-1`` and are derived once.
    """

    name: str
    generators: tuple
    table: Mapping
    invertibles: Mapping
    order: tuple
    derived: Mapping = field(default_factory=dict)
    step_budget: int = 10**6
    precompute: bool = True

    def __post_init__(self):
        set_ = object.__setattr__
        letters = tuple(self.order)
        if sorted(letters) != sorted(tuple(self.generators) + tuple(self.invertibles)):
            raise ValueError("order must list every generator and inverse letter once")
        set_(self, "rank", {x: i for i, x in enumerate(letters)})
        set_(self, "_brackets", {})
        set_(self, "_in_progress", set())
        set_(self, "_normalizer", None)
        set_(self, "_expanded", {})
        set_(self, "reductions", tuple(self._build_reductions()))
        # derive every inverse-letter bracket up front
        for q in self.invertibles if self.precompute else ():
            for x in letters:
                self.letter_bracket(x, q)

    # -- letters
    @property
    def letters(self) -> tuple:
        return tuple(self.order)

    def kind(self, symbol: str) -> str:
        if symbol in self.invertibles:
            return "inverse"
        if symbol in self.generators:
            return "generator"
        if symbol in self.derived:
            return "derived"
        raise RejectedInput(f"{symbol!r} is not a symbol of {self.name}")

    def inverse_of(self, base: str) -> str:
        """Inverse letter of a single-letter invertible (``E`` -> ``invE``)."""
        for q, x in self.invertibles.items():
            if x == L(base):
                return q
        raise RejectedInput(f"{base!r} is not designated invertible in {self.name}")

    def _build_reductions(self):
        for q, base in self.invertibles.items():
            if self.rank.get(q) is None:
                raise ValueError(f"inverse letter {q} missing from order")
            words = sorted(base.raw_terms(), key=lambda k: (-len(k[0]), [self.rank[x] for x in k[0]]))
            (lead, h0) = words[0]
            c0 = base.raw_terms()[(lead, h0)]
            if h0 != 0 or any(self.rank[x] < self.rank[q] for x in lead):
                raise ValueError(f"cannot build a cancellation rule for {q}")
            rest = base - Expr({(lead, 0): c0})
            inv_c0 = GaussRat(1) if c0 == GaussRat(1) else _gauss_inverse(c0)
            # q * lead = (1 - q * rest) / c0
            repl = (Expr.one() - L(q) * rest).scale(inv_c0)
            yield (q,) + lead, repl

    # -- brackets
    def letter_bracket(self, a: str, b: str) -> Expr:
        key = (a, b)
        hit = self._brackets.get(key)
        if hit is not None:
            return hit
        for x in key:
            if x not in self.rank:
                raise RejectedInput(f"letter {x!r} does not belong to algebra {self.name}")
        if a == b:
            res = Expr.zero()
        elif a in self.invertibles or b in self.invertibles:
            if key in self._in_progress:
                raise UnresolvableBracket(f"cyclic inverse-letter bracket {key}")
            self._in_progress.add(key)
            try:
                if b in self.invertibles:
                    # (a, q) = -q (a, X) q
                    inner = commutator(L(a), self.invertibles[b], self)
                    res = normalize(-(L(b) * inner * L(b)), self)
                else:
                    res = -self.letter_bracket(b, a)
            finally:
                self._in_progress.discard(key)
        else:
            res = self.table.get(key)
            if res is None:
                res = Expr.zero()
        self._brackets[key] = res
        return res

    # -- derived symbols
    def expand(self, e: Expr) -> Expr:
        """Replace derived symbols recursively until only letters remain."""
        return e.map_words(lambda w: self._expand_word(w, ()))

    def _expand_word(self, word, stack) -> Expr:
        out = Expr.one()
        for x in word:
            out = out * self._expand_symbol(x, stack)
        return out

    def _expand_symbol(self, x: str, stack) -> Expr:
        if x not in self.derived:
            return L(x)
        hit = self._expanded.get(x)
        if hit is not None:
            return hit
        if x in stack:
            raise RuntimeError(f"cycle in derived definitions: {' -> '.join(stack + (x,))}")
        res = self.derived[x].map_words(lambda w: self._expand_word(w, stack + (x,)))
        self._expanded[x] = res
        return res

    def with_table_entry(self, a: str, b: str, value: Expr) -> AlgebraSpec:
        """Copy with ``(a, b) := value`` and ``(b, a) := -value``.

        Nothing is verified, and inverse-letter brackets are derived lazily,
        since a broken table may not admit them at all.
        """
        table = dict(self.table)
        table[(a, b)] = value
        table[(b, a)] = -value
        return AlgebraSpec(
            name=self.name + "*",
            generators=self.generators,
            table=table,
            invertibles=self.invertibles,
            order=self.order,
            derived=self.derived,
            step_budget=self.step_budget,
            precompute=False,
        )

    def __repr__(self) -> str:
        return f"AlgebraSpec({self.name!r}, {len(self.generators)} generators)"


def _gauss_inverse(c: GaussRat) -> GaussRat:
    n = c.re * c.re + c.im * c.im
    return GaussRat(c.re / n, -c.im / n)


# ---------------------------------------------------------------- tables


def _table_from(entries: dict) -> dict:
    table = {}
    for (a, b), v in entries.items():
        if v.is_zero():
            continue
        if (b, a) in table and table[(b, a)] != -v:
            raise ValueError(f"table not antisymmetric at ({a}, {b})")
        table[(a, b)] = v
        table[(b, a)] = -v
    return table


def _conf2d_entries(s: str = "") -> dict:
    E, D, Cc = L("E" + s), L("D" + s), L("C" + s)
    return {
        ("E" + s, "D" + s): E,
        ("E" + s, "C" + s): D.scale(2),
        ("D" + s, "C" + s): Cc,
    }


def _poincare_entries() -> dict:
    out = {}
    pairs = [(m, n) for m in range(4) for n in range(m + 1, 4)]
    for (m, n) in pairs:
        for r in range(4):
            out[(f"J{m}{n}", f"P{r}")] = P(m).scale(eta(n, r)) - P(n).scale(eta(m, r))
        for (r, s) in pairs:
            if (r, s) <= (m, n):
                continue
            out[(f"J{m}{n}", f"J{r}{s}")] = (
                J(m, s).scale(eta(n, r))
                + J(n, r).scale(eta(m, s))
                - J(n, s).scale(eta(m, r))
                - J(m, r).scale(eta(n, s))
            )
    return out


def _conformal_entries() -> dict:
    out = _poincare_entries()
    D = L("D")
    pairs = [(m, n) for m in range(4) for n in range(m + 1, 4)]
    for mu in range(4):
        out[("D", f"P{mu}")] = P(mu)
        out[("D", f"C{mu}")] = -C(mu)
        for nu in range(4):
            out[(f"P{mu}", f"C{nu}")] = D.scale(-2 * eta(mu, nu)) - J(mu, nu).scale(2)
    for (m, n) in pairs:
        for r in range(4):
            out[(f"J{m}{n}", f"C{r}")] = C(m).scale(eta(n, r)) - C(n).scale(eta(m, r))
    return out


_J_NAMES = tuple(f"J{m}{n}" for m in range(4) for n in range(m + 1, 4))
_P_NAMES = tuple(f"P{m}" for m in range(4))
_C_NAMES = tuple(f"C{m}" for m in range(4))


def _sym(a: Expr, b: Expr) -> Expr:
    return sym_product(a, b)


def _conf2d_derived(s: str = "") -> dict:
    E, D, Cc, inv = L("E" + s), L("D" + s), L("C" + s), L("invE" + s)
    return {
        "U" + s: _sym(D, inv),
        "alpha2" + s: _sym(Cc, E) - D * D + Expr.const(Scalar.hbar(2)).scale(GaussRat(mpq(1, 4))),
    }


def _pair_derived() -> dict:
    d = {}
    d.update(_conf2d_derived("p"))
    d.update(_conf2d_derived("m"))
    Ep, Em = L("Ep"), L("Em")
    d["X0"] = (L("Um") + L("Up")).scale(HALF)
    d["X1"] = (L("Up") - L("Um")).scale(HALF)
    d["P0"] = -(Ep + Em)
    d["P1"] = Ep - Em
    d["Psq"] = L("P0") * L("P0") - L("P1") * L("P1")
    d["Q"] = (L("invEp") * L("invEm")).scale(GaussRat(mpq(1, 4)))
    d["D"] = -(L("Dp") + L("Dm"))
    d["J01"] = L("Dm") - L("Dp")
    d["C0"] = -(L("Cp") + L("Cm"))
    d["C1"] = L("Cm") - L("Cp")
    for mu in range(2):
        d[f"Delta{mu}"] = L(f"C{mu}").scale(HALF)
    return d


def _pauli_lubanski() -> dict:
    d = {}
    for mu in range(4):
        w = Expr.zero()
        for nu, rho, sig in itertools.permutations([i for i in range(4) if i != mu]):
            e = eps_upper(mu, nu, rho, sig)
            w = w + (J(nu, rho) * P(sig)).scale(GaussRat(mpq(-e, 2)))
        # lower the index
        d[f"W{mu}"] = w.scale(eta(mu, mu))
    d["Psq"] = sum((P(m) * P(m)).scale(eta(m, m)) for m in range(4))
    d["Wsq"] = sum((L(f"W{m}") * L(f"W{m}")).scale(eta(m, m)) for m in range(4))
    return d


def _conformal_derived() -> dict:
    d = _pauli_lubanski()
    Q = L("Q")
    for mu, nu in itertools.combinations(range(4), 2):
        s = Expr.zero()
        for rho, sig in itertools.permutations([i for i in range(4) if i not in (mu, nu)]):
            e = eps_lower(mu, nu, rho, sig) * eta(rho, rho) * eta(sig, sig)
            s = s + (L(f"W{rho}") * P(sig) * Q).scale(e)
        d[f"S{mu}{nu}"] = s
    s2 = Expr.zero()
    for mu in range(4):
        for nu in range(4):
            if mu != nu:
                s2 = s2 + (_S(mu, nu) * _S(nu, mu)).scale(eta(mu, mu) * eta(nu, nu))
    d["Ssq"] = s2.scale(HALF)
    for mu in range(4):
        # X^mu = (P^mu/P^2) . D - (P_nu/P^2) . J^{mu nu}, then lowered
        x_up = _sym(P(mu).scale(eta(mu, mu)) * Q, L("D"))
        for nu in range(4):
            if nu != mu:
                x_up = x_up - _sym(P(nu) * Q, _J_upper(mu, nu))
        d[f"X{mu}"] = x_up.scale(eta(mu, mu))
        d[f"Delta{mu}"] = C(mu).scale(HALF)
    return d


def _S(mu: int, nu: int) -> Expr:
    if mu == nu:
        return Expr.zero()
    if mu < nu:
        return L(f"S{mu}{nu}")
    return -L(f"S{nu}{mu}")


def _build(name: str) -> AlgebraSpec:
    if name == "conf2d":
        return AlgebraSpec(
            name=name,
            generators=("E", "D", "C"),
            table=_table_from(_conf2d_entries()),
            invertibles={"invE": L("E")},
            order=("invE", "E", "D", "C"),
            derived=_conf2d_derived(),
        )
    if name == "conf2d-pair":
        table = _table_from({**_conf2d_entries("p"), **_conf2d_entries("m")})
        return AlgebraSpec(
            name=name,
            generators=("Ep", "Dp", "Cp", "Em", "Dm", "Cm"),
            table=table,
            invertibles={"invEp": L("Ep"), "invEm": L("Em")},
            # each inverse letter sits right before its base so cancellations are adjacent
            order=("invEp", "Ep", "invEm", "Em", "Dp", "Dm", "Cp", "Cm"),
            derived=_pair_derived(),
        )
    if name == "poincare4d":
        return AlgebraSpec(
            name=name,
            generators=_P_NAMES + _J_NAMES,
            table=_table_from(_poincare_entries()),
            invertibles={},
            order=_P_NAMES + _J_NAMES,
            derived=_pauli_lubanski(),
        )
    if name == "conf4d":
        p2 = sum((P(m) * P(m)).scale(eta(m, m)) for m in range(4))
        return AlgebraSpec(
            name=name,
            generators=_P_NAMES + _J_NAMES + ("D",) + _C_NAMES,
            table=_table_from(_conformal_entries()),
            invertibles={"Q": p2},
            order=("Q",) + _P_NAMES + ("D",) + _J_NAMES + _C_NAMES,
            derived=_conformal_derived(),
        )
    raise RejectedInput(f"unknown algebra {name!r}; expected one of {ALGEBRA_NAMES}")


@lru_cache(maxsize=None)
def make_algebra(name: str) -> AlgebraSpec:
    """Build (once) and Jacobi-verify one of the shipped algebras."""
    alg = _build(name)
    bad = [t for t, r in jacobi_sweep(alg) if not r.is_zero()]
    if bad:
        raise RuntimeError(f"Jacobi identity fails for {name} at {bad[:3]}")
    return alg


# ---------------------------------------------------------------- operations


_NEEDS_Q = ("S", "X")


def derived_definition(alg: AlgebraSpec, sym: str, accel: Sequence | None = None) -> Expr:
    """The defining expression of a derived symbol.

    ``sym="Delta"`` with ``accel=(a^0, a^1, ...)`` gives ``(1/2) a^mu C_mu``
    for any exact rational acceleration vector.
    """
    if sym in REPRESENTATION_ONLY:
        raise RejectedInput(f"{sym} is representation-level only (see confalg.fockrep)")
    if sym == "Delta":
        if accel is None:
            raise RejectedInput("Delta needs an acceleration vector")
        dim = 2 if alg.name == "conf2d-pair" else 4
        if alg.name not in ("conf2d-pair", "conf4d") or len(accel) != dim:
            raise RejectedInput(f"Delta_a needs a {dim}-vector on conf4d or conf2d-pair")
        out = Expr.zero()
        for mu, a in enumerate(accel):
            out = out + L(f"C{mu}").scale(GaussRat(mpq(a) / 2))
        return out
    if sym not in alg.derived:
        if alg.name == "poincare4d" and sym.startswith(_NEEDS_Q):
            raise RejectedInput(
                f"{sym} needs the inverse of P^2, which {alg.name} does not provide "
                "(massless sector)"
            )
        raise RejectedInput(f"{sym!r} is not defined for {alg.name}")
    return alg.derived[sym]


def expand_derived(e: Expr, alg: AlgebraSpec) -> Expr:
    return alg.expand(e)


def jacobi(alg: AlgebraSpec, g1: str, g2: str, g3: str) -> Expr:
    """Normalized cyclic sum ((g1,g2),g3) + ((g2,g3),g1) + ((g3,g1),g2)."""
    a, b, c = L(g1), L(g2), L(g3)
    total = (
        commutator(commutator(a, b, alg), c, alg)
        + commutator(commutator(b, c, alg), a, alg)
        + commutator(commutator(c, a, alg), b, alg)
    )
    return normalize(total, alg)


def jacobi_sweep(alg: AlgebraSpec):
    """Yield ``((g1, g2, g3), residual)`` over all generator triples."""
    for t in itertools.combinations(alg.generators, 3):
        yield t, jacobi(alg, *t)


# ---------------------------------------------------------------- file format


def dump_algebra(alg: AlgebraSpec) -> str:
    """Serialize to JSON text.

    Schema: ``name``, ``generators`` (list), ``order`` (list),
    ``invertibles`` ({inverse letter: expr}), ``table`` (list of
    ``[a, b, expr]`` for rank(a) < rank(b), nonzero only), ``derived``
    ({symbol: expr}), ``step_budget``.  Expressions use the operator
    grammar of :mod:`confalg.parser`.
    """
    from .parser import format_expr

    table = []
    for a, b in sorted(alg.table, key=lambda k: (alg.rank[k[0]], alg.rank[k[1]])):
        if alg.rank[a] < alg.rank[b]:
            table.append([a, b, format_expr(alg.table[(a, b)])])
    doc = {
        "name": alg.name,
        "generators": list(alg.generators),
        "order": list(alg.order),
        "invertibles": {q: format_expr(x) for q, x in alg.invertibles.items()},
        "table": table,
        "derived": {k: format_expr(v) for k, v in alg.derived.items()},
        "step_budget": alg.step_budget,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_algebra(text: str) -> AlgebraSpec:
    from .parser import Namespace, parse_expr

    doc = json.loads(text)
    ns = Namespace(
        letters=set(doc["generators"]) | set(doc["invertibles"]),
        invertibles={q: None for q in doc["invertibles"]},
        derived=set(doc["derived"]),
    )
    invertibles = {q: parse_expr(s, ns) for q, s in doc["invertibles"].items()}
    ns.invertibles = invertibles
    entries = {(a, b): parse_expr(s, ns) for a, b, s in doc["table"]}
    derived = {k: parse_expr(s, ns) for k, s in doc["derived"].items()}
    return AlgebraSpec(
        name=doc["name"],
        generators=tuple(doc["generators"]),
        table=_table_from(entries),
        invertibles=invertibles,
        order=tuple(doc["order"]),
        derived=derived,
        step_budget=doc.get("step_budget", 10**6),
    )
