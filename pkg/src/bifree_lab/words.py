"""Letters and words over random-matrix variables and constant diagonals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .bnc import LEFT, SideMap, normalize_side

# family id of the constant diagonal family; never a valid config identifier
DIAG_FAMILY = "<diag>"


@dataclass(frozen=True, order=True)
class Var:
    """Variable ``index`` of family ``family`` acting on ``side``."""

    side: str
    family: str
    index: str

    def __post_init__(self):
        object.__setattr__(self, "side", normalize_side(self.side))

    def __str__(self) -> str:
        return f"{self.family}.{self.index}"


@dataclass(frozen=True, order=True)
class Diag:
    """Constant diagonal ``symbol`` acting on ``side``."""

    side: str
    symbol: str

    def __post_init__(self):
        object.__setattr__(self, "side", normalize_side(self.side))

    @property
    def family(self) -> str:
        return DIAG_FAMILY

    @property
    def index(self) -> str:
        return self.symbol

    def __str__(self) -> str:
        return f"{self.symbol}{'L' if self.side == LEFT else 'R'}"


Letter = Union[Var, Diag]


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        if not letters:
            raise ValueError("word must be nonempty")
        for a in letters:
            if not isinstance(a, (Var, Diag)):
                raise TypeError(f"not a letter: {a!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, letters: Iterable[Letter]) -> "Word":
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    @property
    def chi(self) -> SideMap:
        return SideMap(tuple(a.side for a in self.letters))

    @property
    def families(self) -> tuple[str, ...]:
        return tuple(a.family for a in self.letters)

    def has_diagonals(self) -> bool:
        return any(isinstance(a, Diag) for a in self.letters)

    def all_left(self) -> bool:
        return all(a.side == LEFT for a in self.letters)

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.letters)
