"""The identity catalog and its verifier.

Each :class:`IdentityRecord` states ``lhs = rhs`` in the text grammar of
:mod:`confalg.parser` over one of the shipped algebras, together with a
recipe:

``direct``
    ``normalize(lhs - rhs) == 0``.
``clear``
    multiply the difference by invertible elements first (``left(E)``,
    ``right(Psq)``, ...) so no inverse letter survives normal ordering.
``numerical``
    checked in :mod:`confalg.fockrep` only.
``reject``
    ``lhs`` names a symbol whose expansion must be refused; a nonempty
    ``rhs`` must occur in the refusal message.

Records carrying indices are expanded into one record per index instance;
``family`` groups them again.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field, replace

from .algebras import derived_definition, eps_lower, eta, make_algebra
from .ncalg import (
    Expr,
    RejectedInput,
    RewriteBudgetExceeded,
    UnresolvableBracket,
    has_inverse_letters,
    normalize,
)
from .parser import format_expr, parse_expr

__all__ = [
    "IdentityRecord",
    "Outcome",
    "RejectedRecord",
    "shipped_catalog",
    "catalog_families",
    "verify_identity",
    "verify_all",
    "report_to_json",
    "report_from_json",
    "dump_catalog",
    "load_catalog",
    "mutation_check",
    "REPORT_SCHEMA",
]

REPORT_SCHEMA = "confalg.report/1"
STATUSES = ("PASS", "FAIL", "INCONCLUSIVE")


class RejectedRecord(RejectedInput):
    """A catalog record that cannot be run as written."""


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    family: str
    algebra: str
    lhs: str
    rhs: str
    recipe: str = "direct"
    ref: str = ""
    tags: tuple = ()
    note: str = ""

    @property
    def kind(self) -> str:
        return self.recipe.split(":", 1)[0]

    def clearing_steps(self) -> list[tuple[str, str]]:
        """``[(side, multiplier_text), ...]`` of a ``clear:`` recipe."""
        if self.kind != "clear":
            return []
        out = []
        for part in _split_top(self.recipe.split(":", 1)[1]):
            part = part.strip()
            side, _, rest = part.partition("(")
            if side not in ("left", "right") or not rest.endswith(")"):
                raise RejectedRecord(f"{self.id}: bad clearing step {part!r}")
            out.append((side, rest[:-1]))
        if not out:
            raise RejectedRecord(f"{self.id}: empty clearing recipe")
        return out

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "family": self.family,
            "algebra": self.algebra,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "recipe": self.recipe,
            "ref": self.ref,
            "tags": list(self.tags),
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> IdentityRecord:
        return cls(
            id=d["id"],
            family=d.get("family", d["id"]),
            algebra=d["algebra"],
            lhs=d["lhs"],
            rhs=d["rhs"],
            recipe=d.get("recipe", "direct"),
            ref=d.get("ref", ""),
            tags=tuple(d.get("tags", ())),
            note=d.get("note", ""),
        )


def _split_top(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts


# ----------------------------------------------------------- text helpers


def lin(*terms) -> str:
    """Join ``(coef, text)`` pairs into grammar text, dropping zeros."""
    out = []
    for c, t in terms:
        if c == 0:
            continue
        mag = abs(c)
        body = t if mag == 1 else f"{mag}*{t}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out) or "0"


def _J(m: int, n: int) -> tuple[int, str]:
    """(sign, letter) for J_{mn}; sign 0 when m == n."""
    if m == n:
        return 0, "J01"
    return (1, f"J{m}{n}") if m < n else (-1, f"J{n}{m}")


def _S(m: int, n: int) -> tuple[int, str]:
    s, name = _J(m, n)
    return s, "S" + name[1:]


# --------------------------------------------------------------- the catalog

_I4 = range(4)
_PAIRS4 = list(itertools.combinations(_I4, 2))


def _rec(id, algebra, lhs, rhs, recipe="direct", ref="", tags=(), family=None, note=""):
    return IdentityRecord(
        id=id,
        family=family or id,
        algebra=algebra,
        lhs=lhs,
        rhs=rhs,
        recipe=recipe,
        ref=ref,
        tags=tuple(sorted(set(tags) | {algebra})),
        note=note,
    )


def _jacobi_records() -> list[IdentityRecord]:
    out = []
    for name in ("conf2d", "conf2d-pair", "poincare4d", "conf4d"):
        alg = make_algebra(name)
        fam = f"jacobi.{name}"
        for a, b, c in itertools.combinations(alg.generators, 3):
            lhs = f"comm(comm({a}, {b}), {c}) + comm(comm({b}, {c}), {a}) + comm(comm({c}, {a}), {b})"
            out.append(_rec(f"{fam}.{a}.{b}.{c}", name, lhs, "0", ref="Jacobi identity of the bracket table",
                            tags=("jacobi",), family=fam))
    return out


def _conf2d_records() -> list[IdentityRecord]:
    A = "conf2d"
    r = []
    r.append(_rec("shift.U.E", A, "comm(E, U)", "1", ref="U is shifted by one unit under E", tags=("shift",)))
    r.append(_rec("shift.U.D", A, "comm(D, U)", "U", ref="U scales with weight one under D", tags=("shift",)))
    r.append(_rec("shift.E.E", A, "comm(E, E)", "0", ref="energy preserved under translations",
                  tags=("shift",), family="shift.E"))
    r.append(_rec("shift.E.D", A, "comm(D, E)", "-E", ref="energy rescaled by dilatation",
                  tags=("shift",), family="shift.E"))
    r.append(_rec("shift.E.C.D", A, "comm(C, E)", "-2*D", ref="energy shift under conformal transformation",
                  tags=("shift",), family="shift.E.C"))
    r.append(_rec("shift.E.C.U", A, "comm(C, E)", "-2*E.U", ref="energy shift written with U",
                  tags=("shift",), family="shift.E.C"))
    r.append(_rec("casimir.def", A, "C", "U*E*U + alpha2*inv(E)", recipe="clear:left(E)",
                  ref="C as a classical looking term plus alpha2/E", tags=("casimir",)))
    r.append(_rec("shift.U.C", A, "comm(C, U)", "U^2 - alpha2*inv(E)^2", recipe="clear:left(E),left(E)",
                  ref="shift of U under C", tags=("shift", "casimir")))
    for g in "EDC":
        r.append(_rec(f"casimir.inv.{g}", A, f"comm({g}, alpha2)", "0", ref="alpha2 is a Casimir invariant",
                      tags=("casimir",), family="casimir.inv"))
    # representation-level facts, run by the numerical oracle
    r.append(_rec("casimir.bound.basis", A, "alpha2", "1/4*hbar^2", recipe="numerical",
                  ref="alpha2 equals hbar^2/4 on one-photon states", tags=("casimir", "numerical"),
                  family="casimir.bound"))
    r.append(_rec("casimir.bound.random", A, "alpha2", ">= 1/4*hbar^2", recipe="numerical",
                  ref="alpha2 bounded below by hbar^2/4", tags=("casimir", "numerical"),
                  family="casimir.bound"))
    for g in "EDC":
        r.append(_rec(f"number.inv.{g}", A, f"comm({g}, N)", "0", recipe="numerical",
                      ref="photon number is invariant", tags=("numerical",), family="number.inv"))
    return r


def _pair_records() -> list[IdentityRecord]:
    A = "conf2d-pair"
    r = []
    for a in ("Ep", "Dp", "Cp"):
        for b in ("Em", "Dm", "Cm"):
            r.append(_rec(f"sectors.commute.{a}.{b}", A, f"comm({a}, {b})", "0",
                          ref="the two chiral sets commute", tags=("sectors",), family="sectors.commute"))
    for m in range(2):
        for n in range(2):
            r.append(_rec(f"canonical.2d.P{m}.X{n}", A, f"comm(P{m}, X{n})", lin((-eta(m, n), "1")),
                          ref="canonical shifts of positions under momenta", tags=("canonical",),
                          family="canonical.2d"))
    r.append(_rec("positions.commute.2d", A, "comm(X0, X1)", "0",
                  ref="positions commute in the absence of spin", tags=("canonical",)))
    r.append(_rec("psq.2d", A, "Psq", "4*Ep*Em", ref="mass squared as product of chiral energies",
                  tags=("convention",)))
    pdotx = lin((1, "P0.X0"), (-1, "P1.X1"))
    r.append(_rec("jd.2d.D", A, "D", pdotx, recipe="clear:left(Psq)",
                  ref="dilatation is P.X in two dimensions", tags=("jd",), family="jd.2d"))
    r.append(_rec("jd.2d.J01", A, "J01", lin((1, "P0.X1"), (-1, "P1.X0")), recipe="clear:left(Psq)",
                  ref="boost is purely orbital in two dimensions", tags=("jd",), family="jd.2d"))
    for m in range(2):
        # X^m = (P^m Q).D - (P_n Q).J^{mn}, lowered; J^{mn} = -J_{mn} here
        n = 1 - m
        s, jn = _J(m, n)
        upper = lin((1, f"({eta(m, m)}*P{m}*Q).D"), (s, f"(P{n}*Q).{jn}"))
        r.append(_rec(f"covariant.2d.X{m}", A, f"X{m}", f"{eta(m, m)}*({upper})", recipe="clear:left(Psq)",
                      ref="covariant position formula reproduces the chiral one", tags=("jd",),
                      family="covariant.2d"))
    return r


def _poincare_records() -> list[IdentityRecord]:
    A = "poincare4d"
    r = []
    for m in _I4:
        for rho in _I4:
            r.append(_rec(f"pw.momentum.P{m}.W{rho}", A, f"comm(P{m}, W{rho})", "0",
                          ref="Pauli-Lubanski vector is translation invariant", tags=("pw",),
                          family="pw.momentum"))
    for m, n in _PAIRS4:
        for rho in _I4:
            rhs = lin((eta(n, rho), f"W{m}"), (-eta(m, rho), f"W{n}"))
            r.append(_rec(f"pw.lorentz.J{m}{n}.W{rho}", A, f"comm(J{m}{n}, W{rho})", rhs,
                          ref="Pauli-Lubanski vector is a Lorentz vector", tags=("pw",), family="pw.lorentz"))
    for m, n in _PAIRS4:
        terms = []
        for rho, sig in itertools.permutations([i for i in _I4 if i not in (m, n)]):
            terms.append((eps_lower(m, n, rho, sig) * eta(rho, rho) * eta(sig, sig), f"W{rho}*P{sig}"))
        r.append(_rec(f"ww.spin.W{m}.W{n}", A, f"comm(W{m}, W{n})", lin(*terms),
                      ref="W brackets close on the spin tensor", tags=("spin",), family="ww.spin"))
    r.append(_rec("transversality.PW", A, lin(*[(eta(m, m), f"P{m}*W{m}") for m in _I4]), "0",
                  ref="W is transverse to momentum", tags=("spin",), family="transversality"))
    for sym in ("X0", "S01"):
        r.append(_rec(f"massless.guard.{sym}", A, sym, "P^2", recipe="reject",
                      ref="positions need a nonvanishing mass", tags=("guard",), family="massless.guard"))
    return r


def _conf4d_records() -> list[IdentityRecord]:
    A = "conf4d"
    r = []
    clear = "clear:left(Psq)"
    for m, n in _PAIRS4:
        r.append(_rec(f"ww.spin.conf4d.W{m}.W{n}", A, f"comm(W{m}, W{n})", f"Psq*S{m}{n}",
                      ref="W brackets in terms of P^2 and the spin tensor", tags=("spin",), family="ww.spin"))
    for n in _I4:
        terms = []
        for m in _I4:
            s, name = _S(m, n)
            terms.append((eta(m, m) * s, f"P{m}*{name}"))
        r.append(_rec(f"transversality.S.{n}", A, lin(*terms), "0",
                      ref="spin tensor is transverse to momentum", tags=("spin",), family="transversality"))
    r.append(_rec("s2.consistency", A, "Wsq*Q", "Ssq", recipe="clear:left(Psq),left(Psq)",
                  ref="spin number from W^2/P^2 and S.S", tags=("spin",)))
    for m, n in _PAIRS4:
        rhs = lin((1, f"P{m}.X{n}"), (-1, f"P{n}.X{m}"), (1, f"S{m}{n}"))
        r.append(_rec(f"jd.reconstruct.J{m}{n}", A, f"J{m}{n}", rhs, recipe=clear,
                      ref="Lorentz generators split into orbital and spin parts", tags=("jd",),
                      family="jd.reconstruct",
                      note="index-consistent spin term; the mixed-variance form fails for 0i pairs"))
    r.append(_rec("jd.reconstruct.D", A, "D", lin(*[(eta(m, m), f"P{m}.X{m}") for m in _I4]), recipe=clear,
                  ref="dilatation as P.X", tags=("jd",), family="jd.reconstruct"))
    for m in _I4:
        for n in _I4:
            r.append(_rec(f"px.canonical.P{m}.X{n}", A, f"comm(P{m}, X{n})", lin((-eta(m, n), "1")),
                          recipe=clear, ref="canonical shifts of positions under momenta",
                          tags=("canonical",), family="px.canonical"))
    for m in _I4:
        r.append(_rec(f"px.canonical.D.X{m}", A, f"comm(D, X{m})", f"-X{m}", recipe=clear,
                      ref="positions carry dilatation weight -1", tags=("canonical",), family="px.canonical"))
    for m, n in _PAIRS4:
        for rho in _I4:
            rhs = lin((eta(n, rho), f"X{m}"), (-eta(m, rho), f"X{n}"))
            r.append(_rec(f"px.canonical.J{m}{n}.X{rho}", A, f"comm(J{m}{n}, X{rho})", rhs, recipe=clear,
                          ref="positions form a Lorentz vector", tags=("canonical",), family="px.canonical"))
    for m, n in _PAIRS4:
        r.append(_rec(f"xx.spin.X{m}.X{n}", A, f"Psq*comm(X{m}, X{n})", f"S{m}{n}", recipe=clear,
                      ref="position components fail to commute through spin", tags=("spin",), family="xx.spin"))
    # redshifts, with unit acceleration vectors a = e_rho (a^mu = delta^mu_rho)
    for rho in _I4:
        r.append(_rec(f"redshift.mass.a{rho}", A, f"comm(Delta{rho}, Psq)", f"2*Psq.X{rho}", recipe=clear,
                      ref="mass redshift under acceleration", tags=("redshift",), family="redshift.mass"))
    r.append(_rec("redshift.mass.generic", A,
                  "comm(Delta0 - 1/2*Delta1 + 2*Delta2 + 3/4*Delta3, Psq)",
                  "2*Psq.(X0 - 1/2*X1 + 2*X2 + 3/4*X3)", recipe=clear,
                  ref="mass redshift under acceleration", tags=("redshift",), family="redshift.mass"))
    pdotx = lin(*[(eta(m, m), f"P{m}.X{m}") for m in _I4])
    for rho in _I4:
        for n in _I4:
            s, jn = _J(rho, n)
            rhs = lin((eta(rho, rho) * (rho == n), "D"), (-s, jn))
            r.append(_rec(f"redshift.momentum.a{rho}.P{n}", A, f"comm(Delta{rho}, P{n})", rhs,
                          ref="momentum redshift under acceleration", tags=("redshift",),
                          family="redshift.momentum"))
            s2, sn = _S(rho, n)
            spin = lin(
                (eta(rho, rho) * (rho == n), f"({pdotx})"),
                (-1, f"P{rho}.X{n}"),
                (1, f"X{rho}.P{n}"),
                (-s2, sn),
            )
            r.append(_rec(f"redshift.momentum.spin.a{rho}.P{n}", A, f"comm(Delta{rho}, P{n})", spin,
                          recipe=clear, ref="momentum redshift through spin observables",
                          tags=("redshift",), family="redshift.momentum",
                          note="all products symmetrised; plain products fail when the indices coincide"))
    for rho in _I4:
        for m in _I4:
            for n in _I4:
                tag = f"a{rho}.P{m}.X{n}"
                r.append(_rec(f"canonical.preserved.{tag}", A, f"comm(Delta{rho}, comm(P{m}, X{n}))", "0",
                              recipe=clear, ref="canonical relations commute with Delta_a",
                              tags=("redshift",), family="canonical.preserved"))
                r.append(_rec(f"jacobi.consistency.{tag}", A, f"comm(comm(Delta{rho}, P{m}), X{n})",
                              f"comm(comm(Delta{rho}, X{n}), P{m})", recipe=clear,
                              ref="two evaluations of a double bracket agree", tags=("redshift", "metric"),
                              family="jacobi.consistency"))
                rhs = lin(
                    (-eta(rho, rho) * (rho == m), f"X{n}"),
                    (-eta(m, n), f"X{rho}"),
                    (eta(rho, rho) * (rho == n), f"X{m}"),
                )
                r.append(_rec(f"metric.eval.{tag}", A, f"comm(comm(Delta{rho}, P{m}), X{n})", rhs,
                              recipe=clear, ref="metric factor from a double bracket",
                              tags=("redshift", "metric"), family="metric.eval"))
        for m in _I4:
            for n in range(m, 4):
                rhs = lin((-2 * eta(m, n), f"X{rho}"))
                r.append(_rec(f"metric.sym.first.a{rho}.P{m}.P{n}", A,
                              f"comm(comm(Delta{rho}, P{m}), X{n}) + comm(comm(Delta{rho}, P{n}), X{m})", rhs,
                              recipe=clear, ref="symmetrised metric factor", tags=("redshift", "metric"),
                              family="metric.sym"))
                r.append(_rec(f"metric.sym.second.a{rho}.P{m}.P{n}", A,
                              f"comm(comm(Delta{rho}, X{n}), P{m}) + comm(comm(Delta{rho}, X{m}), P{n})", rhs,
                              recipe=clear, ref="symmetrised metric factor", tags=("redshift", "metric"),
                              family="metric.sym"))
    for m in _I4:
        r.append(_rec(f"weights.P{m}", A, f"comm(D, P{m})", f"P{m}", ref="conformal weight of momenta",
                      tags=("weights",), family="weights"))
        r.append(_rec(f"weights.C{m}", A, f"comm(D, C{m})", f"-C{m}", ref="conformal weight of C",
                      tags=("weights",), family="weights"))
    for m, n in _PAIRS4:
        r.append(_rec(f"weights.J{m}{n}", A, f"comm(D, J{m}{n})", "0", ref="Lorentz generators have weight zero",
                      tags=("weights",), family="weights"))
    return r


def shipped_catalog() -> list[IdentityRecord]:
    """Every shipped record, sorted by id."""
    recs = _jacobi_records() + _conf2d_records() + _pair_records() + _poincare_records() + _conf4d_records()
    ids = [r.id for r in recs]
    if len(ids) != len(set(ids)):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise RuntimeError(f"duplicate record ids {dup}")
    return sorted(recs, key=lambda r: r.id)


def catalog_families(records=None) -> list[str]:
    records = shipped_catalog() if records is None else records
    return sorted({r.family for r in records})


# ------------------------------------------------------------- verification


@dataclass
class Outcome:
    id: str
    family: str
    algebra: str
    status: str
    recipe: str
    residual: str = "0"
    steps: int = 0
    seconds: float = 0.0
    counted: bool = True
    note: str = ""
    value: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "id": self.id,
            "family": self.family,
            "algebra": self.algebra,
            "status": self.status,
            "recipe": self.recipe,
            "residual": self.residual,
            "steps": self.steps,
            "counted": self.counted,
            "note": self.note,
        }
        if self.value is not None:
            d["value"] = self.value
        if timing:
            d["seconds"] = round(self.seconds, 6)
        return d


def _validate_multiplier(text: str, alg, rec) -> Expr:
    """Parse a clearing multiplier and check that it is invertible in ``alg``."""
    try:
        m = parse_expr(text, alg)
    except RejectedInput as exc:
        raise RejectedRecord(f"{rec.id}: unknown multiplier {text!r}: {exc}") from None
    nm = normalize(m, alg)
    terms = nm.raw_terms()
    singles = {base.raw_terms().popitem()[0][0][0] for base in alg.invertibles.values()
               if len(base.raw_terms()) == 1 and len(next(iter(base.raw_terms()))[0]) == 1}
    singles |= set(alg.invertibles)
    if len(terms) == 1:
        (w, h), c = next(iter(terms.items()))
        if w and all(x in singles for x in w):
            return m
    for base in alg.invertibles.values():
        nb = normalize(base, alg)
        (w0, h0), c0 = next(iter(nb.raw_terms().items()))
        if (w0, h0) in terms:
            ratio = terms[(w0, h0)]
            if normalize(nb.scale(ratio) - nm.scale(c0), alg).is_zero():
                return m
    raise RejectedRecord(f"{rec.id}: multiplier {text!r} is not invertible in {alg.name}")


def cleared_sides(rec: IdentityRecord, alg=None) -> tuple[Expr, Expr]:
    """Both sides after the record's clearing multipliers (not normalized)."""
    alg = alg or make_algebra(rec.algebra)
    lhs = parse_expr(rec.lhs, alg)
    rhs = parse_expr(rec.rhs, alg)
    for side, text in rec.clearing_steps():
        m = _validate_multiplier(text, alg, rec)
        if side == "left":
            lhs, rhs = m * lhs, m * rhs
        else:
            lhs, rhs = lhs * m, rhs * m
    return lhs, rhs


def verify_identity(rec: IdentityRecord, alg=None, numerical=False) -> Outcome:
    """Check one record.

    ``numerical`` decides what happens to numerical-only records: False
    marks them SKIPPED, True runs them with the environment's numeric
    config, and a :class:`confalg.fockrep.NumericConfig` runs them with that.
    """
    start = time.perf_counter()
    if rec.kind == "numerical":
        if not numerical:
            out = Outcome(rec.id, rec.family, rec.algebra, "SKIPPED", rec.recipe, residual="",
                          counted=False, note="numerical-only; run with the numerical suite")
        else:
            from .fockrep import run_numerical_record

            out = run_numerical_record(rec, numerical if not isinstance(numerical, bool) else None)
            out.counted = False
        out.seconds = time.perf_counter() - start
        return out
    alg = alg or make_algebra(rec.algebra)
    if rec.kind == "reject":
        reason = "expected a rejection"
        if rec.lhs not in alg.order:
            try:
                derived_definition(alg, rec.lhs)
                parse_expr(rec.lhs, alg)
            except RejectedInput as exc:
                if rec.rhs in str(exc):
                    return Outcome(rec.id, rec.family, rec.algebra, "PASS", rec.recipe, residual="",
                                   note=f"rejected: {exc}", seconds=time.perf_counter() - start)
                reason = f"rejected for another reason: {exc}"
        return Outcome(rec.id, rec.family, rec.algebra, "FAIL", rec.recipe, residual="",
                       note=reason, seconds=time.perf_counter() - start)
    if rec.kind not in ("direct", "clear"):
        raise RejectedRecord(f"{rec.id}: unknown recipe {rec.recipe!r}")
    try:
        lhs, rhs = cleared_sides(rec, alg)
        diff = alg.expand(lhs - rhs)
        residual = normalize(diff, alg)
    except (UnresolvableBracket, RewriteBudgetExceeded) as exc:
        # cannot happen for a table whose inverse brackets were derived at
        # construction; a mutated table may have no normal form at all
        return Outcome(rec.id, rec.family, rec.algebra, "FAIL", rec.recipe, residual="",
                       note=f"no normal form: {exc}", seconds=time.perf_counter() - start)
    if residual.is_zero():
        status = "PASS"
    elif has_inverse_letters(residual, alg):
        status = "INCONCLUSIVE"
    else:
        status = "FAIL"
    return Outcome(
        rec.id, rec.family, rec.algebra, status, rec.recipe,
        residual=format_expr(residual), steps=len(diff), note=rec.note,
        seconds=time.perf_counter() - start,
    )


def select(records, ids=None, algebra=None, tag=None, family=None):
    out = []
    for r in records:
        if ids is not None and r.id not in ids:
            continue
        if algebra is not None and r.algebra != algebra:
            continue
        if tag is not None and tag not in r.tags:
            continue
        if family is not None and r.family != family:
            continue
        out.append(r)
    return out


def verify_all(algebra=None, tag=None, family=None, ids=None, records=None, numerical=False,
               algebras: dict | None = None) -> dict:
    """Run every matching record (Jacobi sweeps are ordinary records).

    Returns a report dict; ``summary.status`` is PASS only when no counted
    record is FAIL or INCONCLUSIVE.  ``algebras`` may map names to
    replacement specs (used for mutation runs).
    """
    records = shipped_catalog() if records is None else records
    chosen = select(records, ids=ids, algebra=algebra, tag=tag, family=family)
    entries = []
    for rec in chosen:
        alg = None
        if algebras and rec.algebra in algebras:
            alg = algebras[rec.algebra]
        entries.append(verify_identity(rec, alg, numerical=numerical))
    return build_report(entries, config={
        "algebra": algebra, "tag": tag, "family": family,
        "ids": sorted(ids) if ids else None,
        "numerical": numerical if isinstance(numerical, bool) else numerical.as_dict(),
    }, kind="symbolic")


def build_report(entries: list[Outcome], config: dict, kind: str) -> dict:
    entries = sorted(entries, key=lambda e: e.id)
    counts = {s: 0 for s in STATUSES + ("SKIPPED",)}
    for e in entries:
        counts[e.status] = counts.get(e.status, 0) + 1
    counted = [e for e in entries if e.counted]
    ok = all(e.status == "PASS" for e in counted)
    return {
        "schema": REPORT_SCHEMA,
        "kind": kind,
        "config": config,
        "entries": entries,
        "summary": {
            "records": len(entries),
            "families": len({e.family for e in entries}),
            "counts": counts,
            "counted": len(counted),
            "status": "PASS" if ok else "FAIL",
        },
    }


def report_to_json(report: dict, timing: bool = False) -> str:
    """Deterministic JSON text; wall times only when ``timing`` is set."""
    doc = dict(report)
    doc["entries"] = [e.to_dict(timing) if isinstance(e, Outcome) else e for e in report["entries"]]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("schema") != REPORT_SCHEMA:
        raise RejectedInput(f"not a {REPORT_SCHEMA} document")
    entries = []
    for d in doc["entries"]:
        d = dict(d)
        seconds = d.pop("seconds", 0.0)
        entries.append(Outcome(**d, seconds=seconds))
    doc["entries"] = entries
    return doc


def report_text(report: dict) -> str:
    lines = []
    for e in report["entries"]:
        e = e if isinstance(e, Outcome) else Outcome(**e)
        tail = "" if e.status == "PASS" else f"  residual: {e.residual}"
        if e.note and e.status != "PASS":
            tail += f"  ({e.note})"
        lines.append(f"{e.status:<12} {e.id}{tail}")
    s = report["summary"]
    c = s["counts"]
    lines.append(
        f"{s['status']}: {s['records']} records in {s['families']} families; "
        + ", ".join(f"{k.lower()} {v}" for k, v in sorted(c.items()) if v)
    )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- file I/O


def dump_catalog(records=None) -> str:
    records = shipped_catalog() if records is None else records
    doc = {"schema": "confalg.catalog/1", "records": [r.to_dict() for r in records]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_catalog(text: str) -> list[IdentityRecord]:
    doc = json.loads(text)
    return [IdentityRecord.from_dict(d) for d in doc["records"]]


# ---------------------------------------------------------------- mutations


@dataclass
class MutationResult:
    pair: tuple
    value: str
    failures: list = field(default_factory=list)

    @property
    def detected(self) -> bool:
        return bool(self.failures)


def mutation_check(algebra: str, a: str, b: str, value: str, records=None, stop_at_first: bool = True) -> MutationResult:
    """Replace ``(a, b)`` in the table and rerun the algebra's records.

    Jacobi records run first since they catch most mutations cheaply.
    """
    base = make_algebra(algebra)
    mutated = base.with_table_entry(a, b, parse_expr(value, base))
    records = shipped_catalog() if records is None else records
    mine = [r for r in records if r.algebra == algebra and r.kind in ("direct", "clear")]
    mine.sort(key=lambda r: (not r.family.startswith("jacobi"), r.id))
    out = MutationResult((a, b), value)
    for rec in mine:
        try:
            res = verify_identity(rec, mutated)
        except RejectedInput as exc:
            out.failures.append((rec.id, f"rejected: {exc}"))
        else:
            if res.status != "PASS":
                out.failures.append((rec.id, res.status))
        if out.failures and stop_at_first:
            break
    return out


def with_recipe(rec: IdentityRecord, recipe: str) -> IdentityRecord:
    return replace(rec, recipe=recipe)


def sample_mutations(n: int = 10, seed: int = 0, algebras=("conf2d", "poincare4d", "conf4d", "conf2d-pair")):
    """Deterministic sample of single-entry table mutations.

    Each item is ``(algebra, a, b, new_value_text)``: the bracket is doubled,
    dropped, or has a generator added to it.
    """
    import random

    rng = random.Random(seed)
    out = []
    while len(out) < n:
        name = algebras[len(out) % len(algebras)]
        alg = make_algebra(name)
        a, b = rng.sample(list(alg.generators), 2)
        cur = alg.table.get((a, b))
        kind = rng.choice(("scale", "drop", "add")) if cur is not None else "add"
        if kind == "scale":
            value = f"2*({format_expr(cur)})"
        elif kind == "drop":
            value = "0"
        else:
            g = rng.choice(list(alg.generators))
            value = g if cur is None else f"{format_expr(cur)} + {g}"
        item = (name, a, b, value)
        if item not in out:
            out.append(item)
    return out
