"""Set partitions, the non-crossing lattice and permutations on {1..n}.

Everything here is 1-based, matching the usual combinatorial notation.
Partitions are stored in canonical form: blocks sorted ascending, and the
block list sorted by minimum element.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Iterator, Sequence

MAX_ENUM_N = 12


class SizeLimitError(ValueError):
    """Raised when an enumeration would exceed the supported ground-set size."""


def _check_enum_size(n: int, limit: int = MAX_ENUM_N) -> None:
    if not isinstance(n, int) or n < 1 or n > limit:
        raise SizeLimitError(f"n={n} outside supported range 1..{limit}")


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        seen = [x for b in blocks for x in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("empty block")
        if sorted(seen) != list(range(1, self.n + 1)):
            raise ValueError(f"blocks {self.blocks} do not partition 1..{self.n}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "SetPartition":
        blocks = [tuple(b) for b in blocks]
        if n is None:
            n = sum(len(b) for b in blocks)
        return cls(n, tuple(blocks))

    @classmethod
    def from_labels(cls, labels: Sequence[Hashable]) -> "SetPartition":
        groups: dict = {}
        for pos, lab in enumerate(labels, start=1):
            groups.setdefault(lab, []).append(pos)
        return cls(len(labels), tuple(tuple(g) for g in groups.values()))

    @cached_property
    def labels(self) -> tuple[int, ...]:
        """Block number (0-based, in canonical block order) of each element."""
        lab = [0] * self.n
        for b, block in enumerate(self.blocks):
            for x in block:
                lab[x - 1] = b
        return tuple(lab)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.blocks)

    def is_pairing(self) -> bool:
        return all(len(b) == 2 for b in self.blocks)

    def relabel(self, f: Sequence[int]) -> "SetPartition":
        """Image partition {f(x) : x in V}; ``f`` is 1-based images of 1..n."""
        return SetPartition(self.n, tuple(tuple(f[x - 1] for x in b) for b in self.blocks))

    def restrict(self, subset: Sequence[int]) -> "SetPartition":
        """Restriction to ``subset`` (a union of blocks), renumbered 1..len(subset) in order."""
        pos = {x: i + 1 for i, x in enumerate(sorted(subset))}
        blocks = [tuple(pos[x] for x in b) for b in self.blocks if b[0] in pos]
        return SetPartition(len(pos), tuple(blocks))

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def discrete(n: int) -> SetPartition:
    return SetPartition(n, tuple((i,) for i in range(1, n + 1)))


def full(n: int) -> SetPartition:
    return SetPartition(n, (tuple(range(1, n + 1)),))


@dataclass(frozen=True)
class Permutation:
    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if len(images) != self.n or sorted(images) != list(range(1, self.n + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{self.n}")
        object.__setattr__(self, "images", images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __matmul__(self, other: "Permutation") -> "Permutation":
        # (self @ other)(i) = self(other(i)): apply ``other`` first
        if other.n != self.n:
            raise ValueError("size mismatch")
        return Permutation(self.n, tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(self.n, tuple(inv))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(n, tuple(range(1, n + 1)))


def long_cycle(n: int) -> Permutation:
    """The cycle i -> i+1, n -> 1."""
    return Permutation(n, tuple(list(range(2, n + 1)) + [1]))


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


# -- enumeration ---------------------------------------------------------


def _rgs(n: int, allowed) -> Iterator[list[int]]:
    """Restricted growth strings of length n; ``allowed(firsts, lasts, b)`` prunes extensions."""
    lab = [0] * n
    firsts: list[int] = []
    lasts: list[int] = []

    def rec(i: int):
        if i == n:
            yield lab
            return
        for b in range(len(firsts)):
            if allowed(firsts, lasts, b):
                old = lasts[b]
                lab[i] = b
                lasts[b] = i
                yield from rec(i + 1)
                lasts[b] = old
        lab[i] = len(firsts)
        firsts.append(i)
        lasts.append(i)
        yield from rec(i + 1)
        firsts.pop()
        lasts.pop()

    yield from rec(0)


def _always(firsts, lasts, b):
    return True


def _nc_allowed(firsts, lasts, b):
    # extending block b past its last element crosses any block that
    # started before lasts[b] and continued beyond it
    lb = lasts[b]
    return not any(firsts[c] < lb < lasts[c] for c in range(len(firsts)) if c != b)


@lru_cache(maxsize=None)
def _set_partitions_cached(n: int) -> tuple[SetPartition, ...]:
    return tuple(SetPartition.from_labels(lab) for lab in _rgs(n, _always))


def enumerate_set_partitions(n: int) -> list[SetPartition]:
    """All partitions of {1..n} in restricted-growth order; Bell(n) of them."""
    _check_enum_size(n)
    if n <= 9:
        return list(_set_partitions_cached(n))
    return [SetPartition.from_labels(lab) for lab in _rgs(n, _always)]


def _pairings(elems: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in _pairings(remaining):
            yield [(first, partner)] + tail


@lru_cache(maxsize=None)
def _pairings_cached(n: int) -> tuple[SetPartition, ...]:
    if n % 2:
        return ()
    return tuple(SetPartition(n, tuple(p)) for p in _pairings(tuple(range(1, n + 1))))


def enumerate_pairings(n: int) -> list[SetPartition]:
    """All pair partitions of {1..n}; (n-1)!! of them for even n, none for odd n."""
    _check_enum_size(n)
    return list(_pairings_cached(n))


def labels_noncrossing(labels: Sequence[Hashable]) -> bool:
    """Non-crossing test for the partition given by a block label per position."""
    last = {}
    for x, b in enumerate(labels):
        last[b] = x
    opened = set()
    stack: list = []
    for x, b in enumerate(labels):
        if b not in opened:
            opened.add(b)
            stack.append(b)
            continue
        # every block opened since b's previous element must already be finished
        while stack[-1] != b:
            top = stack.pop()
            if last[top] > x:
                return False
    return True


def is_noncrossing(p: SetPartition) -> bool:
    return labels_noncrossing(p.labels)


@lru_cache(maxsize=None)
def _noncrossing_cached(n: int, pairings_only: bool) -> tuple[SetPartition, ...]:
    if pairings_only:
        return tuple(p for p in _pairings_cached(n) if is_noncrossing(p))
    return tuple(SetPartition.from_labels(lab) for lab in _rgs(n, _nc_allowed))


def enumerate_noncrossing(n: int, pairings_only: bool = False) -> list[SetPartition]:
    """NC(n) (or NC_2(n)), in the same order as filtering the full enumeration."""
    _check_enum_size(n)
    return list(_noncrossing_cached(n, bool(pairings_only)))


# -- order relations -----------------------------------------------------


def refines(p: SetPartition, q: SetPartition) -> bool:
    """True iff every block of ``q`` is a union of blocks of ``p``."""
    if p.n != q.n:
        raise ValueError(f"ground sets differ: {p.n} vs {q.n}")
    qlab = q.labels
    return all(len({qlab[x - 1] for x in b}) == 1 for b in p.blocks)


def kernel_partition(labels: Sequence[Hashable]) -> SetPartition:
    """Positions sharing a label share a block."""
    if len(labels) == 0:
        raise ValueError("empty label sequence")
    return SetPartition.from_labels(labels)


# -- permutations ---------------------------------------------------------


def pairing_to_permutation(p: SetPartition) -> Permutation:
    if not p.is_pairing():
        raise ValueError(f"{p} is not a pairing")
    images = [0] * p.n
    for a, b in p.blocks:
        images[a - 1] = b
        images[b - 1] = a
    return Permutation(p.n, tuple(images))


def cycle_partition(perm: Permutation) -> SetPartition:
    seen = [False] * perm.n
    blocks = []
    for start in range(1, perm.n + 1):
        if seen[start - 1]:
            continue
        cyc = []
        x = start
        while not seen[x - 1]:
            seen[x - 1] = True
            cyc.append(x)
            x = perm(x)
        blocks.append(tuple(cyc))
    return SetPartition(perm.n, tuple(blocks))


def block_permutation(p: SetPartition) -> Permutation:
    """Each block as an increasing cycle."""
    images = [0] * p.n
    for b in p.blocks:
        for x, y in zip(b, b[1:] + b[:1]):
            images[x - 1] = y
    return Permutation(p.n, tuple(images))


def kreweras_complement(p: SetPartition) -> SetPartition:
    """Kreweras complement via the interleaved 1 < 1' < 2 < 2' < ... picture.

    The primed points i' and j' (i < j) can share a block exactly when no
    block of ``p`` has elements both inside {i+1..j} and outside it.
    """
    if not is_noncrossing(p):
        raise ValueError(f"{p} is crossing; Kreweras complement undefined")
    n = p.n
    lab = p.labels
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    sizes = [len(b) for b in p.blocks]
    for i in range(n):
        counts: dict[int, int] = {}
        for j in range(i + 1, n):
            b = lab[j]
            counts[b] = counts.get(b, 0) + 1
            # window {i+1..j} (0-based i+1..j) must be a union of whole blocks
            if all(counts[c] == sizes[c] for c in counts):
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x + 1)
    return SetPartition(n, tuple(tuple(g) for g in groups.values()))


# -- Moebius function --------------------------------------------------------


@lru_cache(maxsize=None)
def _mobius_full(k: int) -> int:
    """mu(0_k, 1_k) on NC(k) from the defining recursion.

    Each lower interval [0_k, rho] is a product of full lattices NC(|V|),
    so mu(0_k, rho) is the product of the smaller full-lattice values.
    """
    if k == 1:
        return 1
    total = 0
    for rho in _noncrossing_cached(k, False):
        if len(rho.blocks) == 1:
            continue
        prod = 1
        for b in rho.blocks:
            prod *= _mobius_full(len(b))
        total += prod
    return -total


def interval_type(sigma: SetPartition, tau: SetPartition) -> tuple[int, ...]:
    """Canonical form of [sigma, tau]: sorted sizes k of the NC(k) factors."""
    sizes = []
    for block in tau.blocks:
        sub = sigma.restrict(block)
        sizes.extend(len(w) for w in kreweras_complement(sub).blocks)
    return tuple(sorted(sizes))


@lru_cache(maxsize=None)
def _mobius_of_type(kind: tuple[int, ...]) -> int:
    prod = 1
    for k in kind:
        prod *= _mobius_full(k)
    return prod


def nc_mobius(sigma: SetPartition, tau: SetPartition) -> int:
    """Moebius function of the non-crossing partition lattice on [sigma, tau]."""
    if sigma.n != tau.n:
        raise ValueError("ground sets differ")
    if not (is_noncrossing(sigma) and is_noncrossing(tau)):
        raise ValueError("both arguments must be non-crossing")
    if not refines(sigma, tau):
        raise ValueError(f"{sigma} does not refine {tau}")
    return _mobius_of_type(interval_type(sigma, tau))
