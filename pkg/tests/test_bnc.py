import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bifree_lab.bnc import SideMap, enumerate_bnc, is_bi_noncrossing, normalize_side, shuffle_permutation
from bifree_lab.combinat import SetPartition, catalan, enumerate_noncrossing, enumerate_set_partitions, is_noncrossing

P = SetPartition.from_blocks


def shuffle_bruteforce(chi):
    lefts = [k + 1 for k, s in enumerate(chi) if s == "l"]
    rights = [k + 1 for k, s in enumerate(chi) if s == "r"]
    return tuple(lefts + rights[::-1])


def bnc_bruteforce(chi):
    """Images of NC(n) under the shuffle, computed directly from the block lists."""
    s = shuffle_bruteforce(chi)
    return {P([[s[x - 1] for x in b] for b in q.blocks], len(chi)) for q in enumerate_noncrossing(len(chi))}


@pytest.mark.parametrize(
    "chi,images",
    [("lll", (1, 2, 3)), ("lrlr", (1, 3, 4, 2)), ("rr", (2, 1))],
)
def test_shuffle_examples(chi, images):
    assert shuffle_permutation(chi).images == images


def test_bi_noncrossing_examples():
    for p in enumerate_set_partitions(5):
        assert is_bi_noncrossing(p, "lllll") == is_noncrossing(p)
    assert is_bi_noncrossing(P([[1, 3], [2, 4]]), "lrlr")
    assert not is_bi_noncrossing(P([[1, 4], [2, 3]]), "lrlr")


def test_enumerate_bnc_examples():
    assert set(enumerate_bnc("lrlr", pairings_only=True)) == {P([[1, 2], [3, 4]]), P([[1, 3], [2, 4]])}
    assert set(enumerate_bnc("llll", pairings_only=True)) == {P([[1, 2], [3, 4]]), P([[1, 4], [2, 3]])}
    assert set(enumerate_bnc("lr")) == {P([[1], [2]]), P([[1, 2]])}


def test_sidemap_accepts_spellings():
    assert SideMap.of(["left", "r", "L", "Right"]).sides == ("l", "r", "l", "r")
    with pytest.raises(ValueError):
        normalize_side("up")


def test_length_mismatch():
    with pytest.raises(ValueError):
        is_bi_noncrossing(P([[1, 2]]), "lrl")


@pytest.mark.parametrize("n", range(1, 8))
def test_bnc_matches_filter_and_relabel(n):
    allp = enumerate_set_partitions(n)
    for chi in itertools.product("lr", repeat=n):
        got = enumerate_bnc(chi)
        assert len(got) == len(set(got)) == catalan(n)
        assert set(got) == bnc_bruteforce(chi)
        assert set(got) == {p for p in allp if is_bi_noncrossing(p, chi)}


@given(st.text(alphabet="lr", min_size=1, max_size=8))
def test_shuffle_matches_definition(chi):
    assert shuffle_permutation(chi).images == shuffle_bruteforce(chi)


@given(st.text(alphabet="lr", min_size=2, max_size=8))
def test_bnc_pairings_are_pairings(chi):
    n = len(chi)
    prs = enumerate_bnc(chi, pairings_only=True)
    assert all(p.is_pairing() for p in prs)
    assert len(prs) == (catalan(n // 2) if n % 2 == 0 else 0)


@given(st.text(alphabet="lr", min_size=1, max_size=7))
def test_swapping_faces_reverses(chi):
    # exchanging l and r reverses the position order of the shuffle
    flip = "".join("r" if c == "l" else "l" for c in chi)
    n = len(chi)
    rev = [n + 1 - x for x in range(1, n + 1)]
    assert {p.relabel(rev) for p in enumerate_bnc(chi)} == set(enumerate_bnc(flip[::-1]))
