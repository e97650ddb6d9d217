import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bifree_lab.combinat import SetPartition, SizeLimitError, catalan, discrete, full
from bifree_lab.cumulant import (
    CumulantOracle,
    MomentOracle,
    OracleGapError,
    bifree_cumulant,
    check_bifree_vanishing,
    cumulant_over_partition,
    cumulants_from_moments,
    moment_from_cumulants,
    phi_over_partition,
)
from bifree_lab.limits import CLTFamily, CovSpec, moment_oracle
from bifree_lab.words import Var

P = SetPartition.from_blocks


def semicircle_moments(max_n):
    return {("x",) * n: (float(catalan(n // 2)) if n % 2 == 0 else 0.0) for n in range(1, max_n + 1)}


def free_cumulants_recursive(m, n_max):
    """One-variable free cumulants from m_n = sum_s k_s sum_{i_1+..+i_s=n-s} m_{i_1}..m_{i_s}."""
    mom = [1.0] + [m[k] for k in range(1, n_max + 1)]
    kap = [0.0] * (n_max + 1)

    def comp_sum(total, parts):
        # sum over compositions of total into `parts` nonnegative pieces of the product of moments
        if parts == 0:
            return 1.0 if total == 0 else 0.0
        return sum(mom[i] * comp_sum(total - i, parts - 1) for i in range(total + 1))

    for n in range(1, n_max + 1):
        rest = sum(kap[s] * comp_sum(n - s, s) for s in range(1, n))
        kap[n] = mom[n] - rest
    return kap


def random_table(rng, alphabet, max_len):
    return {w: rng.uniform(-2, 2) for n in range(1, max_len + 1) for w in itertools.product(alphabet, repeat=n)}


# -- examples -----------------------------------------------------------------


def test_phi_over_partition_examples():
    phi = MomentOracle({("a",): 1.5, ("a", "a"): 2.0, ("b",): 3.0, ("a", "b", "a"): 7.0})
    assert phi_over_partition(phi, full(3), ("a", "b", "a")) == 7.0
    assert phi_over_partition(phi, discrete(2), ("a", "a")) == 1.5**2
    assert phi_over_partition(phi, P([[1, 3], [2]]), ("a", "b", "a")) == 6.0


def test_cumulant_low_order():
    phi = MomentOracle({("a",): 0.7, ("b",): -1.1, ("a", "b"): 2.5, ("b", "a"): 0.2})
    assert bifree_cumulant(phi, "l", ("a",)) == 0.7
    for chi in ("ll", "lr", "rl", "rr"):
        assert bifree_cumulant(phi, chi, ("a", "b")) == pytest.approx(2.5 - 0.7 * -1.1, abs=1e-15)


def test_semicircle_fourth_cumulant_vanishes():
    phi = MomentOracle(semicircle_moments(6))
    assert bifree_cumulant(phi, "llll", ("x",) * 4) == 0.0
    assert bifree_cumulant(phi, "ll", ("x",) * 2) == 1.0


def test_cumulant_over_partition_examples():
    kappa = CumulantOracle(fn=lambda sides, w: 0.5 if len(w) == 2 else (2.0 if len(w) == 1 else 0.0))
    assert cumulant_over_partition(kappa, "lrl", full(3), ("a", "b", "c")) == 0.0
    assert cumulant_over_partition(kappa, "lrl", discrete(3), ("a", "b", "c")) == 8.0
    assert cumulant_over_partition(kappa, "llll", P([[1, 2], [3, 4]]), "abcd") == 0.25


def test_moment_from_clt_cumulants():
    kappa = CumulantOracle(fn=lambda sides, w: 1.0 if len(w) == 2 else 0.0)
    assert moment_from_cumulants(kappa, "l", ("x",)) == 0.0
    assert moment_from_cumulants(kappa, "llll", ("x",) * 4) == 2.0


def test_oracle_gap_is_an_error():
    phi = MomentOracle({("a",): 1.0})
    with pytest.raises(OracleGapError):
        bifree_cumulant(phi, "ll", ("a", "a"))
    assert MomentOracle()(()) == 1.0


def test_size_limits():
    phi = MomentOracle(fn=lambda w: 0.0)
    with pytest.raises(SizeLimitError):
        bifree_cumulant(phi, "l" * 11, ("a",) * 11)
    with pytest.raises(SizeLimitError):
        check_bifree_vanishing(phi, {"a": 1}, 9, side_of=lambda s: "l")


# -- cross-checks against independent oracles ---------------------------------


@pytest.mark.parametrize("seed", range(5))
def test_all_left_single_variable_matches_free_recursion(seed):
    rng = random.Random(seed)
    m = {k: rng.uniform(-1, 1) for k in range(1, 8)}
    phi = MomentOracle({("x",) * k: v for k, v in m.items()})
    kap = free_cumulants_recursive(m, 7)
    for n in range(1, 8):
        assert bifree_cumulant(phi, "l" * n, ("x",) * n) == pytest.approx(kap[n], rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_cumulant_is_multilinear(seed):
    rng = random.Random(100 + seed)
    base = random_table(rng, "uv", 4)
    alpha, beta = rng.uniform(-2, 2), rng.uniform(-2, 2)

    def expand(w):
        # z = alpha*u + beta*v, expanded letter by letter
        total = 0.0
        choices = [[(1.0, c)] if c != "z" else [(alpha, "u"), (beta, "v")] for c in w]
        for pick in itertools.product(*choices):
            coef = 1.0
            for c, _ in pick:
                coef *= c
            total += coef * base[tuple(s for _, s in pick)]
        return total

    phi = MomentOracle(fn=expand)
    for n in range(1, 5):
        for chi in itertools.product("lr", repeat=n):
            word = tuple(rng.choice("uv") for _ in range(n))
            k = rng.randrange(n)
            zw = word[:k] + ("z",) + word[k + 1 :]
            lhs = bifree_cumulant(phi, chi, zw)
            rhs = alpha * bifree_cumulant(phi, chi, word[:k] + ("u",) + word[k + 1 :]) + beta * bifree_cumulant(
                phi, chi, word[:k] + ("v",) + word[k + 1 :]
            )
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.data())
def test_round_trip(n, data):
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    chi = data.draw(st.text(alphabet="lr", min_size=n, max_size=n))
    word = tuple(f"a{i}" for i in range(n))
    table = {sub: rng.uniform(-3, 3) for k in range(1, n + 1) for sub in itertools.combinations(word, k)}
    phi = MomentOracle(table)
    back = moment_from_cumulants(cumulants_from_moments(phi), chi, word)
    assert back == pytest.approx(phi(word), rel=1e-12, abs=1e-12)


# -- vanishing of mixed cumulants ---------------------------------------------


def pair_cov():
    return CovSpec.from_matrix(["i"], ["j"], [[1.0, 0.5], [0.5, 1.0]])


def letters(name, C):
    return [Var(C.side_of(i), name, i) for i in C.indices]


def test_two_clt_families_have_no_mixed_cumulants():
    C = pair_cov()
    D = CovSpec.from_matrix(["k"], ["m"], [[2.0, -0.3], [-0.3, 1.0]])
    phi = moment_oracle([CLTFamily("a", C), CLTFamily("b", D)])
    family_of = {v: v.family for v in letters("a", C) + letters("b", D)}
    assert check_bifree_vanishing(phi, family_of, 5) == []


def test_single_family_has_no_mixed_words():
    C = pair_cov()
    phi = moment_oracle([CLTFamily("a", C)])
    assert check_bifree_vanishing(phi, {v: "a" for v in letters("a", C)}, 4) == []


def test_planted_cross_covariance_is_reported():
    # x and y share one covariance matrix but are declared as different families
    C = CovSpec.from_matrix(["x", "y"], [], [[1.0, 0.3], [0.3, 1.0]])
    phi = moment_oracle([CLTFamily("s", C)])
    x, y = Var("l", "s", "x"), Var("l", "s", "y")
    found = check_bifree_vanishing(phi, {x: "A", y: "B"}, 4)
    assert {v.word for v in found if len(v.word) == 2} == {(x, y), (y, x)}
    assert all(len(v.word) == 2 and v.value == pytest.approx(0.3, abs=1e-15) for v in found)
