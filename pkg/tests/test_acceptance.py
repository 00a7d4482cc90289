"""One test per acceptance criterion, at the stated tolerances.

Each test prints ``criterion N: PASS|FAIL ...`` and appends the same line to
the terminal summary.
"""

import time

import pytest

from confalg.catalog import (
    catalog_families,
    mutation_check,
    report_to_json,
    sample_mutations,
    shipped_catalog,
    verify_all,
)
from confalg.fockrep import NumericConfig, run_numerical_suite

CONFIG = NumericConfig(dim=64, photons=3, grid=512, seed=0, hbar=1.0, samples=1000, oracle_count=100)


@pytest.fixture(scope="module")
def numerical():
    rep = run_numerical_suite(CONFIG)
    return rep, {e.id: e for e in rep["entries"]}


@pytest.fixture
def report(acceptance_log):
    def emit(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        acceptance_log.append(line)
        return ok

    return emit


def _worst(entries, prefixes):
    chosen = [e for e in entries.values() if e.id.startswith(prefixes) and e.counted]
    return chosen, max(e.value for e in chosen)


def test_criterion_1_symbolic_catalog(report):
    t0 = time.perf_counter()
    rep = verify_all(numerical=False)
    wall = time.perf_counter() - t0
    entries = [e for e in rep["entries"] if e.status != "SKIPPED"]
    families = {e.family for e in entries}
    required = {"px.canonical", "xx.spin", "redshift.mass", "redshift.momentum", "metric.eval", "metric.sym"}
    bad = [e.id for e in entries if e.status != "PASS"]
    ok = len(families) >= 28 and required <= families and not bad and wall < 60
    assert report(1, ok, f"{len(entries)} records in {len(families)} symbolic families, "
                         f"{len(bad)} not PASS, {wall:.1f} s")


def test_criterion_2_jacobi_sweeps(report):
    t0 = time.perf_counter()
    counts = {}
    for name in ("conf2d", "conf2d-pair", "poincare4d", "conf4d"):
        rep = verify_all(family=f"jacobi.{name}")
        counts[name] = (rep["summary"]["counts"]["PASS"], rep["summary"]["records"])
    wall = time.perf_counter() - t0
    ok = (
        counts["conf4d"] == (455, 455)
        and counts["poincare4d"] == (120, 120)
        and all(p == n > 0 for p, n in counts.values())
        and wall < 30
    )
    detail = ", ".join(f"{k} {p}/{n}" for k, (p, n) in counts.items())
    assert report(2, ok, f"{detail}, {wall:.1f} s")


def test_criterion_3_mutations(report):
    catalog = shipped_catalog()
    sample = sample_mutations(10, seed=0)
    results = [mutation_check(*m, records=catalog) for m in sample]
    caught = sum(r.detected for r in results)
    assert report(3, caught == len(sample) == 10, f"{caught}/{len(sample)} mutations detected")


def test_criterion_4_numerical_suite(numerical, report):
    _, entries = numerical
    chosen, worst = _worst(entries, ("ds.bracket", "ds.transfU", "ds.energy", "ds.casimir.inv",
                                     "fock.bracket", "fock.transfU", "fock.energy", "fock.casimir.inv",
                                     "laurent."))
    ok = all(e.status == "PASS" for e in chosen) and worst < 1e-10
    assert report(4, ok, f"{len(chosen)} residuals at dim=64 nmax=3, worst {worst:.2e} (< 1e-10)")


def test_criterion_5_casimir_bound(numerical, report):
    _, entries = numerical
    basis, rand = entries["casimir.bound.basis"], entries["casimir.bound.random"]
    ok = basis.value <= 1e-10 and rand.value <= 1e-8
    assert report(5, ok, f"basis max deviation {basis.value:.2e} (1e-10); "
                         f"random shortfall {rand.value:.2e} (1e-8), {rand.note}")


def test_criterion_6_number_invariance(numerical, report):
    _, entries = numerical
    chosen, worst = _worst(entries, ("fock.number.",))
    ok = len(chosen) == 3 and worst < 1e-13
    assert report(6, ok, f"(E,N) (D,N) (C,N) worst {worst:.2e} (< 1e-13)")


def test_criterion_7_oracle(numerical, report):
    _, entries = numerical
    c = entries["oracle.commutator"]
    ok = c.value < 1e-9 and entries["oracle.straightening"].status == "PASS"
    assert report(7, ok, f"{c.note}, worst residual {c.value:.2e} (< 1e-9)")


def test_criterion_8_two_sector(numerical, report):
    _, entries = numerical
    chosen, worst = _worst(entries, ("pair.positions", "pair.canonical"))
    window = entries["pair.massive.window"]
    ok = len(chosen) == 5 and worst < 1e-9 and window.status == "PASS"
    assert report(8, ok, f"(X0,X1) and (P,X)+eta worst {worst:.2e} (< 1e-9); {window.note}")


def test_criterion_9_grid(numerical, report):
    _, entries = numerical
    ed, a2, cross = entries["grid.order.E.D"], entries["grid.order.alpha2"], entries["grid.alpha2.crossoracle"]
    ok = ed.value >= 1.9 and a2.value >= 1.9 and cross.status == "PASS"
    assert report(9, ok, f"order (E,D) {ed.value:.3f}, alpha2 {a2.value:.3f}; {cross.note}")


def test_criterion_10_determinism(numerical, report):
    sym = [report_to_json(verify_all(numerical=CONFIG)) for _ in range(2)]
    first, _ = numerical
    again = run_numerical_suite(CONFIG)
    num = [report_to_json(first), report_to_json(again)]
    ok = sym[0] == sym[1] and num[0] == num[1]
    same = lambda pair: "identical" if pair[0] == pair[1] else "DIFFERENT"
    assert report(10, ok, f"symbolic {len(sym[0])} bytes {same(sym)}, numerical {len(num[0])} bytes {same(num)}")
