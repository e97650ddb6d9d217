"""Moment functionals over partitions and the bi-free moment-cumulant transforms."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .bnc import SideMap, enumerate_bnc
from .combinat import SetPartition, SizeLimitError, enumerate_noncrossing, full, nc_mobius

MAX_CUMULANT_N = 10
MAX_VANISHING_N = 8
VANISHING_TOL = 1e-9


class OracleGapError(KeyError):
    """An oracle was asked for a word it does not define."""


class MomentOracle:
    """Word -> moment, backed by an explicit table.

    ``fn`` optionally fills the table lazily; without it a missing word is an
    error, never an implicit zero.  The empty word has moment 1.
    """

    def __init__(
        self,
        table: Mapping[tuple, float] | None = None,
        fn: Callable[[tuple], float] | None = None,
        max_len: int | None = None,
    ):
        self._table: dict[tuple, float] = {tuple(k): float(v) for k, v in (table or {}).items()}
        self._fn = fn
        self.max_len = max_len

    def __call__(self, word: Iterable[Hashable]) -> float:
        word = tuple(word)
        if not word:
            return 1.0
        try:
            return self._table[word]
        except KeyError:
            pass
        if self._fn is None or (self.max_len is not None and len(word) > self.max_len):
            raise OracleGapError(word)
        val = float(self._fn(word))
        # concurrent fills compute the same value, so last-writer-wins is harmless
        self._table[word] = val
        return val

    def __contains__(self, word) -> bool:
        return tuple(word) in self._table

    @classmethod
    def tabulate(cls, fn: Callable[[tuple], float], alphabet: Sequence[Hashable], max_len: int) -> "MomentOracle":
        """Eagerly evaluate ``fn`` on every word over ``alphabet`` up to ``max_len``."""
        table = {}
        for n in range(1, max_len + 1):
            for w in itertools.product(alphabet, repeat=n):
                table[w] = float(fn(w))
        return cls(table, max_len=max_len)


class CumulantOracle:
    """(side tuple, word) -> bi-free cumulant; same table/lazy-fill contract as MomentOracle."""

    def __init__(
        self,
        table: Mapping[tuple[tuple[str, ...], tuple], float] | None = None,
        fn: Callable[[tuple[str, ...], tuple], float] | None = None,
    ):
        self._table = {(tuple(c), tuple(w)): float(v) for (c, w), v in (table or {}).items()}
        self._fn = fn

    def __call__(self, chi, word) -> float:
        sides = chi.sides if isinstance(chi, SideMap) else SideMap(tuple(chi)).sides
        key = (sides, tuple(word))
        try:
            return self._table[key]
        except KeyError:
            pass
        if self._fn is None:
            raise OracleGapError(key)
        val = float(self._fn(*key))
        self._table[key] = val
        return val


def _sidemap(chi) -> SideMap:
    return chi if isinstance(chi, SideMap) else SideMap(tuple(chi))


def _check_lengths(chi: SideMap, word: Sequence, limit: int) -> None:
    if len(chi) != len(word):
        raise ValueError(f"side map length {len(chi)} != word length {len(word)}")
    if len(word) > limit:
        raise SizeLimitError(f"word length {len(word)} exceeds {limit}")


def phi_over_partition(phi: Callable[[tuple], float], p: SetPartition, word: Sequence) -> float:
    """Product over blocks of phi(word restricted to the block, in increasing order)."""
    if p.n != len(word):
        raise ValueError(f"partition of {p.n} points vs word of length {len(word)}")
    out = 1.0
    for b in p.blocks:
        out *= phi(tuple(word[x - 1] for x in b))
    return out


@lru_cache(maxsize=None)
def _top_mobius(n: int) -> tuple[int, ...]:
    """mu(q, 1_n) for q in enumerate_noncrossing(n) order."""
    top = full(n)
    return tuple(nc_mobius(q, top) for q in enumerate_noncrossing(n))


@lru_cache(maxsize=8192)
def _cumulant_terms(sides: tuple[str, ...]) -> tuple[tuple[tuple[tuple[int, ...], ...], int], ...]:
    # enumerate_bnc(chi)[i] is s_chi applied to enumerate_noncrossing(n)[i],
    # so the Moebius weight of the pulled-back partition lines up by index
    n = len(sides)
    return tuple(
        (tuple(tuple(x - 1 for x in b) for b in p.blocks), mu)
        for p, mu in zip(enumerate_bnc(sides), _top_mobius(n))
    )


def bifree_cumulant(phi: Callable[[tuple], float], chi, word: Sequence) -> float:
    """kappa_chi(word) as the Moebius-weighted sum of phi over BNC(n, chi)."""
    chi = _sidemap(chi)
    _check_lengths(chi, word, MAX_CUMULANT_N)
    word = tuple(word)
    total = []
    for blocks, mu in _cumulant_terms(chi.sides):
        prod = float(mu)
        for b in blocks:
            prod *= phi(tuple(word[x] for x in b))
        total.append(prod)
    return math.fsum(total)


def cumulant_over_partition(kappa: CumulantOracle, chi, p: SetPartition, word: Sequence) -> float:
    chi = _sidemap(chi)
    if not (p.n == len(chi) == len(word)):
        raise ValueError("partition, side map and word sizes differ")
    out = 1.0
    for b in p.blocks:
        out *= kappa(chi.restrict(b), tuple(word[x - 1] for x in b))
    return out


def moment_from_cumulants(kappa: CumulantOracle, chi, word: Sequence) -> float:
    """phi(word) as the sum over BNC(n, chi) of products of block cumulants."""
    chi = _sidemap(chi)
    _check_lengths(chi, word, MAX_CUMULANT_N)
    word = tuple(word)
    return math.fsum(cumulant_over_partition(kappa, chi, p, word) for p in enumerate_bnc(chi))


def cumulants_from_moments(phi: Callable[[tuple], float]) -> CumulantOracle:
    """Lazy cumulant oracle obtained from ``phi`` by Moebius inversion."""
    return CumulantOracle(fn=lambda sides, word: bifree_cumulant(phi, sides, word))


@dataclass(frozen=True)
class Violation:
    chi: str
    word: tuple
    value: float


def _default_side(symbol) -> str:
    return symbol.side


def check_bifree_vanishing(
    phi: Callable[[tuple], float],
    family_of: Mapping[Hashable, Hashable],
    max_n: int,
    side_of: Callable[[Hashable], str] = _default_side,
    tol: float = VANISHING_TOL,
) -> list[Violation]:
    """Mixed bi-free cumulants exceeding ``tol``, over all words up to ``max_n``.

    The alphabet is ``family_of``'s keys; each symbol's side fixes the side
    map of every word it appears in.  An empty result certifies bi-freeness
    of the families up to order ``max_n``.
    """
    if max_n > MAX_VANISHING_N:
        raise SizeLimitError(f"max_n={max_n} exceeds {MAX_VANISHING_N}")
    alphabet = list(family_of)
    sides = {a: side_of(a) for a in alphabet}
    out = []
    for n in range(2, max_n + 1):
        for w in itertools.product(alphabet, repeat=n):
            if len({family_of[a] for a in w}) == 1:
                continue
            chi = SideMap(tuple(sides[a] for a in w))
            val = bifree_cumulant(phi, chi, w)
            if abs(val) > tol:
                out.append(Violation(str(chi), w, val))
    return out


__all__ = [
    "CumulantOracle",
    "MomentOracle",
    "OracleGapError",
    "Violation",
    "bifree_cumulant",
    "check_bifree_vanishing",
    "cumulant_over_partition",
    "cumulants_from_moments",
    "moment_from_cumulants",
    "phi_over_partition",
]
