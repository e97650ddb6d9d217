"""Left/right side maps and bi-non-crossing partitions."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .combinat import (
    MAX_ENUM_N,
    Permutation,
    SetPartition,
    _check_enum_size,
    enumerate_noncrossing,
    labels_noncrossing,
)

LEFT = "l"
RIGHT = "r"
_ALIASES = {"l": LEFT, "left": LEFT, "r": RIGHT, "right": RIGHT}


def normalize_side(side: str) -> str:
    try:
        return _ALIASES[str(side).lower()]
    except KeyError:
        raise ValueError(f"side must be left or right, got {side!r}") from None


@dataclass(frozen=True)
class SideMap:
    sides: tuple[str, ...]

    def __post_init__(self):
        sides = tuple(normalize_side(s) for s in self.sides)
        if not sides:
            raise ValueError("SideMap must be nonempty")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def of(cls, sides: Iterable[str] | str) -> "SideMap":
        """``SideMap.of("lrlr")`` or ``SideMap.of(["left", "right"])``."""
        return cls(tuple(sides))

    def __len__(self) -> int:
        return len(self.sides)

    def __getitem__(self, i):
        return self.sides[i]

    def restrict(self, positions: Iterable[int]) -> "SideMap":
        """Restriction to 1-based ``positions`` (kept in the given order)."""
        return SideMap(tuple(self.sides[x - 1] for x in positions))

    def __str__(self) -> str:
        return "".join(self.sides)


def _as_sidemap(chi) -> SideMap:
    return chi if isinstance(chi, SideMap) else SideMap(tuple(chi))


def shuffle_permutation(chi) -> Permutation:
    """Left positions ascending, then right positions descending."""
    chi = _as_sidemap(chi)
    n = len(chi)
    lefts = [i for i in range(1, n + 1) if chi[i - 1] == LEFT]
    rights = [i for i in range(n, 0, -1) if chi[i - 1] == RIGHT]
    return Permutation(n, tuple(lefts + rights))


@lru_cache(maxsize=4096)
def _shuffle_images(sides: tuple[str, ...]) -> tuple[int, ...]:
    return shuffle_permutation(SideMap(sides)).images


def is_bi_noncrossing(p: SetPartition, chi) -> bool:
    chi = _as_sidemap(chi)
    if p.n != len(chi):
        raise ValueError(f"partition of {p.n} points vs side map of length {len(chi)}")
    s = _shuffle_images(chi.sides)
    lab = p.labels
    # position k of the relabelled partition holds the element s(k)
    return labels_noncrossing([lab[s[k] - 1] for k in range(p.n)])


@lru_cache(maxsize=4096)
def _bnc_cached(sides: tuple[str, ...], pairings_only: bool) -> tuple[SetPartition, ...]:
    s = _shuffle_images(sides)
    return tuple(q.relabel(s) for q in enumerate_noncrossing(len(sides), pairings_only))


def enumerate_bnc(chi, pairings_only: bool = False) -> list[SetPartition]:
    """BNC(n, chi): the images s_chi(q) of the non-crossing partitions q of {1..n}.

    The i-th entry is the image of the i-th element of ``enumerate_noncrossing``.
    """
    chi = _as_sidemap(chi)
    _check_enum_size(len(chi), MAX_ENUM_N)
    return list(_bnc_cached(chi.sides, bool(pairings_only)))
