"""Quick invariant checks across all modules, runnable without pytest."""
from __future__ import annotations

import itertools
import random
import time
import traceback
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bnc, combinat, cumulant, ensemble, limits, mc
from .words import Diag, Var, Word


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


CHECKS: list[tuple[str, Callable[[], str]]] = []


def check(name: str):
    def deco(fn):
        CHECKS.append((name, fn))
        return fn

    return deco


@check("combinat.catalan_counts")
def _catalan_counts():
    for n in range(1, 9):
        got = len(combinat.enumerate_noncrossing(n))
        assert got == combinat.catalan(n), (n, got)
    return "|NC(n)| = Catalan(n), n <= 8"


@check("combinat.mobius_closed_form")
def _mobius():
    for n in range(1, 9):
        mu = combinat.nc_mobius(combinat.discrete(n), combinat.full(n))
        assert mu == (-1) ** (n - 1) * combinat.catalan(n - 1), (n, mu)
    return "mu(0_n, 1_n) = (-1)^(n-1) Catalan(n-1), n <= 8"


@check("combinat.kreweras_block_count")
def _kreweras():
    for n in range(1, 8):
        for p in combinat.enumerate_noncrossing(n):
            assert len(p) + len(combinat.kreweras_complement(p)) == n + 1, p
    return "|p| + |K(p)| = n + 1, n <= 7"


@check("combinat.pairing_cycles")
def _pairing_cycles():
    for m in range(1, 5):
        n = 2 * m
        gamma = combinat.long_cycle(n)
        for p in combinat.enumerate_pairings(n):
            cycles = len(combinat.cycle_partition(combinat.pairing_to_permutation(p) @ gamma))
            if combinat.is_noncrossing(p):
                assert cycles == 1 + m, p
                assert combinat.cycle_partition(combinat.pairing_to_permutation(p) @ gamma) == combinat.kreweras_complement(p)
            else:
                assert cycles < 1 + m, p
    return "#(pairing o gamma) = 1 + n/2 iff non-crossing, n <= 8"


@check("bnc.enumerate_matches_filter")
def _bnc_filter():
    for n in range(1, 7):
        allp = combinat.enumerate_set_partitions(n)
        for chi in itertools.product("lr", repeat=n):
            enum = set(bnc.enumerate_bnc(chi))
            assert len(enum) == combinat.catalan(n)
            assert enum == {p for p in allp if bnc.is_bi_noncrossing(p, chi)}, chi
    return "BNC(n, chi) enumeration = filter, all chi, n <= 6"


@check("cumulant.round_trip")
def _round_trip():
    rng = random.Random(20240101)
    for _ in range(10):
        n = rng.randint(1, 6)
        word = tuple(f"a{i}" for i in range(n))
        chi = tuple(rng.choice("lr") for _ in range(n))
        table = {sub: rng.uniform(-2, 2) for k in range(1, n + 1) for sub in itertools.combinations(word, k)}
        phi = cumulant.MomentOracle(table)
        got = cumulant.moment_from_cumulants(cumulant.cumulants_from_moments(phi), chi, word)
        assert abs(got - phi(word)) <= 1e-10 * max(1.0, abs(phi(word)))
    return "moments -> cumulants -> moments on 10 random tables"


@check("limits.semicircle_and_pair")
def _limits_values():
    C = limits.CovSpec.from_matrix(["x"], [], [[1.0]])
    assert [limits.clt_moment(C, ["x"] * n) for n in (4, 6, 8)] == [2.0, 5.0, 14.0]
    C2 = limits.CovSpec.from_matrix(["i"], ["j"], [[1.0, 0.5], [0.5, 1.0]])
    assert abs(limits.clt_moment(C2, ["i", "j", "i", "j"]) - 1.25) < 1e-15
    return "semicircle 2, 5, 14; (l,r,l,r) -> 1.25"


@check("limits.clt_vs_general")
def _clt_vs_general():
    C = limits.CovSpec.from_matrix(["i1", "i2"], ["j1"], [[1.0, 0.3, 0.2], [0.3, 2.0, -0.4], [0.2, -0.4, 1.5]])
    fam = [limits.CLTFamily("s", C)]
    rng = random.Random(7)
    for _ in range(20):
        idx = [rng.choice(C.indices) for _ in range(rng.randint(1, 6))]
        word = [Var(C.side_of(i), "s", i) for i in idx]
        a, b = limits.clt_moment(C, idx), limits.bifree_moment_general(fam, word)
        assert abs(a - b) <= 1e-10, (idx, a, b)
    return "clt_moment = bifree_moment_general on 20 words"


@check("limits.bifree_vanishing")
def _vanishing():
    C = limits.CovSpec.from_matrix(["i"], ["j"], [[1.0, 0.5], [0.5, 1.0]])
    fams = [limits.CLTFamily("a", C), limits.CLTFamily("b", C.scaled(2.0))]
    phi = limits.moment_oracle(fams)
    family_of = {Var(C.side_of(i), k, i): k for k in ("a", "b") for i in C.indices}
    assert cumulant.check_bifree_vanishing(phi, family_of, 4) == []
    return "no mixed cumulant above 1e-9 up to order 4"


@check("ensemble.determinism_symmetry")
def _ensemble():
    C = limits.CovSpec.from_matrix(["i"], ["j"], [[1.0, 0.5], [0.5, 1.0]])
    spec = ensemble.EnsembleSpec({"s": C}, 7, ensemble.EntryLaw.UNIFORM, 99)
    a, b = ensemble.sample_family(spec, 3), ensemble.sample_family(spec, 3)
    for key, m in a.matrices.items():
        assert np.array_equal(m, b[key]) and np.array_equal(m, m.T)
    L = ensemble.sqrt_factor(C)
    assert np.allclose(L @ L.T, C.matrix, atol=1e-10)
    return "bit-identical redraws, symmetric matrices, L L^T = C"


@check("mc.operator_semantics")
def _mc():
    rng = np.random.default_rng(5)
    N = 4
    fam = ensemble.SampledFamily(N, {("s", k): rng.standard_normal((N, N)) for k in "ABCD"})
    A, B, Cm, D = (fam[("s", k)] for k in "ABCD")
    w = Word.of([Var("l", "s", "A"), Var("r", "s", "B"), Var("l", "s", "C"), Var("r", "s", "D")])
    assert abs(mc.realize_word(w, fam) - np.trace(A @ Cm @ D @ B) / N) < 1e-12
    swapped = Word.of([Var("r", "s", "B"), Var("l", "s", "A"), Var("l", "s", "C"), Var("r", "s", "D")])
    assert mc.realize_word(swapped, fam) == mc.realize_word(w, fam)
    diag = {"d": np.diag([1.0, 2.0, 3.0, 4.0])}
    w2 = Word.of([Var("l", "s", "A"), Diag("l", "d"), Var("l", "s", "B")])
    assert abs(mc.realize_word(w2, fam, diag) - np.trace(A @ diag["d"] @ B) / N) < 1e-12
    return "L/R semantics, commuting faces, diagonal letters"


@check("mc.degenerate_N1")
def _n1():
    C = limits.CovSpec.from_matrix(["x"], [], [[4.0]])
    spec = ensemble.EnsembleSpec({"s": C}, 1, ensemble.EntryLaw.RADEMACHER, 1)
    est = mc.estimate_moment(Word.of([Var("l", "s", "x")] * 2), spec, None, 50)
    assert est.mean == 4.0 and est.stderr == 0.0, est
    return "N=1 Rademacher: mean c, stderr 0"


def run_selftest() -> list[CheckResult]:
    out = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            detail, ok = fn(), True
        except Exception as err:  # report, don't abort the suite
            ok = False
            detail = f"{type(err).__name__}: {err}" if str(err) else traceback.format_exc(limit=1).strip()
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out


def summarize(results: list[CheckResult]) -> tuple[int, int]:
    passed = sum(r.passed for r in results)
    return passed, len(results) - passed


if __name__ == "__main__":
    res = run_selftest()
    for r in res:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail} ({r.seconds:.2f}s)")
    p, f = summarize(res)
    print(f"{p} passed, {f} failed")
    raise SystemExit(1 if f else 0)
