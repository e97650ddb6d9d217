"""Exact N -> infinity limits of normalized expected traces.

Four evaluators, from special to general:

* ``clt_moment`` -- one bi-free central limit family: sum over bi-non-crossing
  pairings of products of covariances.
* ``clt_moment_multi`` -- a bi-free collection of such families: only pairings
  that never pair letters from different families survive.
* ``free_moment_with_diagonals`` -- alternating words s d s d ... with constant
  diagonals free from the families; the diagonal factor is evaluated on the
  Kreweras complement of each pairing.
* ``bifree_moment_general`` -- any word over any families (central limit or
  given by moments), through the bi-free moment-cumulant expansion with mixed
  cumulants set to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Mapping, Sequence, Union

import numpy as np

from .bnc import LEFT, RIGHT, enumerate_bnc, is_bi_noncrossing
from .combinat import (
    MAX_ENUM_N,
    SizeLimitError,
    enumerate_noncrossing,
    enumerate_pairings,
    kernel_partition,
    kreweras_complement,
    refines,
)
from .cumulant import MAX_CUMULANT_N, MomentOracle, bifree_cumulant
from .words import DIAG_FAMILY, Diag, Var, Word

PSD_TOL = 1e-12
WEIGHT_TOL = 1e-12


class CovarianceError(ValueError):
    pass


@dataclass(frozen=True)
class CovSpec:
    """Covariance of a bi-free central limit family over left indices I and right indices J.

    ``cov`` is indexed by ``left + right`` in that order.
    """

    left: tuple[str, ...]
    right: tuple[str, ...]
    cov: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        left = tuple(str(i) for i in self.left)
        right = tuple(str(j) for j in self.right)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        idx = left + right
        if len(set(idx)) != len(idx):
            raise CovarianceError(f"left and right index sets must be disjoint and distinct: {idx}")
        if not idx:
            raise CovarianceError("covariance needs at least one index")
        a = np.asarray(self.cov, dtype=float)
        if a.shape != (len(idx), len(idx)):
            raise CovarianceError(f"covariance has shape {a.shape}, expected {(len(idx), len(idx))}")
        if not np.all(np.isfinite(a)):
            raise CovarianceError("covariance has non-finite entries")
        for r in range(len(idx)):
            for c in range(r + 1, len(idx)):
                if a[r, c] != a[c, r]:
                    raise CovarianceError(
                        f"covariance not symmetric at ({idx[r]}, {idx[c]}): {float(a[r, c])!r} != {float(a[c, r])!r}"
                    )
        lam = float(np.linalg.eigvalsh(a).min())
        if lam < -PSD_TOL:
            raise CovarianceError(f"covariance not positive semidefinite (smallest eigenvalue {lam:.3g})")
        object.__setattr__(self, "cov", tuple(tuple(float(v) for v in row) for row in a))
        object.__setattr__(self, "_pos", {k: i for i, k in enumerate(idx)})

    @classmethod
    def from_matrix(cls, left: Iterable, right: Iterable, matrix) -> "CovSpec":
        left, right = tuple(left), tuple(right)
        d = len(left) + len(right)
        a = np.asarray(matrix, dtype=float)
        if a.ndim == 1:
            if a.size != d * d:
                raise CovarianceError(f"row-major covariance needs {d * d} entries, got {a.size}")
            a = a.reshape(d, d)
        return cls(left, right, tuple(map(tuple, a.tolist())))

    @property
    def indices(self) -> tuple[str, ...]:
        return self.left + self.right

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.cov, dtype=float)

    def position(self, index) -> int:
        try:
            return self._pos[str(index)]
        except KeyError:
            raise KeyError(f"unknown index {index!r}; known: {self.indices}") from None

    def c(self, k, m) -> float:
        return self.cov[self.position(k)][self.position(m)]

    def side_of(self, index) -> str:
        return LEFT if self.position(index) < len(self.left) else RIGHT

    def scaled(self, lam: float) -> "CovSpec":
        return CovSpec(self.left, self.right, tuple(tuple(lam * v for v in row) for row in self.cov))


@dataclass(frozen=True)
class Atom:
    weight: float
    values: Mapping[str, float]


@dataclass(frozen=True)
class DiagonalLimit:
    """Atomic joint law of the diagonal symbols: atom ``a`` has mass ``weight``."""

    symbols: tuple[str, ...]
    atoms: tuple[Atom, ...]
    bound: Mapping[str, float] | None = None

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        atoms = tuple(Atom(float(a.weight), {str(k): float(v) for k, v in a.values.items()}) for a in atoms)
        if not atoms:
            raise ValueError("diagonal limit needs at least one atom")
        for a in atoms:
            if not 0.0 < a.weight <= 1.0:
                raise ValueError(f"atom weight {a.weight} outside (0, 1]")
            if set(a.values) != set(symbols):
                raise ValueError(f"atom values {sorted(a.values)} do not match symbols {sorted(symbols)}")
        total = math.fsum(a.weight for a in atoms)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"atom weights sum to {total!r}, not 1")
        observed = {s: max(abs(a.values[s]) for a in atoms) for s in symbols}
        bound = dict(observed if self.bound is None else {str(k): float(v) for k, v in self.bound.items()})
        for s in symbols:
            if s not in bound:
                raise ValueError(f"no bound for diagonal symbol {s!r}")
            if observed[s] > bound[s]:
                raise ValueError(f"|values| of {s!r} reach {observed[s]}, above bound {bound[s]}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "bound", bound)

    @classmethod
    def constant(cls, values: Mapping[str, float]) -> "DiagonalLimit":
        return cls(tuple(values), (Atom(1.0, dict(values)),))

    def moment(self, symbols: Sequence[str]) -> float:
        """Atom average of the product of the named diagonals."""
        for s in symbols:
            if s not in self.bound:
                raise KeyError(f"unknown diagonal symbol {s!r}")
        return math.fsum(a.weight * math.prod(a.values[s] for s in symbols) for a in self.atoms)


@dataclass(frozen=True)
class CLTFamily:
    name: str
    cov: CovSpec

    def cumulant(self, sides: tuple[str, ...], word: tuple) -> float:
        if len(word) != 2:
            return 0.0
        return self.cov.c(word[0].index, word[1].index)


@dataclass(eq=False)
class MomentFamily:
    """A family given by its joint moments; cumulants come from Moebius inversion."""

    name: str
    oracle: MomentOracle
    _cache: dict = field(default_factory=dict, repr=False)

    def cumulant(self, sides: tuple[str, ...], word: tuple) -> float:
        key = (sides, word)
        try:
            return self._cache[key]
        except KeyError:
            val = bifree_cumulant(self.oracle, sides, word)
            self._cache[key] = val
            return val


FamilySpec = Union[CLTFamily, MomentFamily]


def diagonal_family(diag: DiagonalLimit) -> MomentFamily:
    """The constant diagonals as a two-faced family; left and right copies share moments."""
    return MomentFamily(DIAG_FAMILY, MomentOracle(fn=lambda w: diag.moment([a.symbol for a in w])))


# -- evaluators ------------------------------------------------------------


@lru_cache(maxsize=4096)
def _bnc_pairings(sides: tuple[str, ...]):
    # filter of all pairings, independent of the s_chi image construction
    return tuple(p for p in enumerate_pairings(len(sides)) if is_bi_noncrossing(p, sides))


def _check_n(n: int, limit: int = MAX_ENUM_N) -> None:
    if n < 1:
        raise ValueError("empty word")
    if n > limit:
        raise SizeLimitError(f"word length {n} exceeds {limit}")


def clt_moment(C: CovSpec, chi_indices: Sequence) -> float:
    """Limit moment of one central limit family; the side of each letter is read off C."""
    idx = [str(i) for i in chi_indices]
    _check_n(len(idx))
    for i in idx:
        if str(i) not in C.indices:
            raise ValueError(f"unknown index {i!r}; known: {C.indices}")
    if len(idx) % 2:
        return 0.0
    sides = tuple(C.side_of(i) for i in idx)
    return math.fsum(
        math.prod(C.c(idx[a - 1], idx[b - 1]) for a, b in p.blocks) for p in _bnc_pairings(sides)
    )


def _multi_sides(Cs: Mapping[Hashable, CovSpec], idx: Sequence[str], eps: Sequence) -> tuple[str, ...]:
    if len(idx) != len(eps):
        raise ValueError(f"{len(idx)} indices vs {len(eps)} family labels")
    sides = []
    for i, k in zip(idx, eps):
        if k not in Cs:
            raise ValueError(f"unknown family {k!r}")
        if i not in Cs[k].indices:
            raise ValueError(f"unknown index {i!r} for family {k!r}")
        sides.append(Cs[k].side_of(i))
    return tuple(sides)


def clt_moment_multi(Cs: Mapping[Hashable, CovSpec], chi_indices: Sequence, eps: Sequence) -> float:
    """Limit moment of a word over a bi-free collection of central limit families."""
    idx = [str(i) for i in chi_indices]
    _check_n(len(idx))
    sides = _multi_sides(Cs, idx, eps)
    if len(idx) % 2:
        return 0.0
    ker = kernel_partition(list(eps))
    return math.fsum(
        math.prod(Cs[eps[a - 1]].c(idx[a - 1], idx[b - 1]) for a, b in p.blocks)
        for p in _bnc_pairings(sides)
        if refines(p, ker)
    )


def free_moment_with_diagonals(
    Cs: Mapping[Hashable, CovSpec],
    chi_indices: Sequence,
    alpha: Sequence,
    beta: Sequence[str],
    diag: DiagonalLimit,
) -> float:
    """Limit of phi_N(Y_1 D_1 Y_2 D_2 ... Y_n D_n) with Y_l from family alpha[l], D_l = D_beta[l]."""
    idx = [str(i) for i in chi_indices]
    _check_n(len(idx))
    if len(beta) != len(idx):
        raise ValueError(f"{len(idx)} indices vs {len(beta)} diagonal symbols")
    _multi_sides(Cs, idx, alpha)
    for s in beta:
        if s not in diag.symbols:
            raise ValueError(f"unknown diagonal symbol {s!r}")
    if len(idx) % 2:
        return 0.0
    ker = kernel_partition(list(alpha))
    terms = []
    for p in enumerate_noncrossing(len(idx), pairings_only=True):
        if not refines(p, ker):
            continue
        cov = math.prod(Cs[alpha[a - 1]].c(idx[a - 1], idx[b - 1]) for a, b in p.blocks)
        dmom = math.prod(diag.moment([beta[x - 1] for x in w]) for w in kreweras_complement(p).blocks)
        terms.append(cov * dmom)
    return math.fsum(terms)


def _family_table(families) -> dict:
    if isinstance(families, Mapping):
        families = families.values()
    out = {}
    for f in families:
        if f.name in out:
            raise ValueError(f"duplicate family {f.name!r}")
        out[f.name] = f
    return out


def bifree_moment_general(families: Sequence[FamilySpec] | Mapping[str, FamilySpec], word: Sequence) -> float:
    """phi(word) for families that are bi-free from one another.

    Each block of a bi-non-crossing partition must stay inside one family;
    mixed blocks are dropped since mixed cumulants vanish.
    """
    fam = _family_table(families)
    word = tuple(word)
    _check_n(len(word), MAX_CUMULANT_N)
    for a in word:
        f = fam.get(a.family)
        if f is None:
            raise ValueError(f"letter {a} references unknown family {a.family!r}")
        if isinstance(f, CLTFamily) and f.cov.side_of(a.index) != a.side:
            raise ValueError(f"letter {a} acts on side {a.side} but index {a.index!r} is on the other face")
    sides = tuple(a.side for a in word)
    fams = [a.family for a in word]
    terms = []
    for p in enumerate_bnc(sides):
        blocks = p.blocks
        if any(len({fams[x - 1] for x in b}) != 1 for b in blocks):
            continue
        if any(isinstance(fam[fams[b[0] - 1]], CLTFamily) and len(b) != 2 for b in blocks):
            continue
        prod = 1.0
        for b in blocks:
            f = fam[fams[b[0] - 1]]
            prod *= f.cumulant(tuple(sides[x - 1] for x in b), tuple(word[x - 1] for x in b))
        terms.append(prod)
    return math.fsum(terms)


def moment_oracle(families) -> MomentOracle:
    """Lazy MomentOracle of ``bifree_moment_general`` over ``families``."""
    fams = _family_table(families)
    return MomentOracle(fn=lambda w: bifree_moment_general(fams, w), max_len=MAX_CUMULANT_N)


# -- routing for word objects -------------------------------------------------


def _is_alternating_sd(word: Word) -> bool:
    n = len(word)
    return (
        n % 2 == 0
        and all(isinstance(word[2 * k], Var) and isinstance(word[2 * k + 1], Diag) for k in range(n // 2))
    )


def check_word(word: Word, covs: Mapping[str, CovSpec], diag: DiagonalLimit | None = None) -> None:
    """Every letter must resolve, and act on the face its index belongs to."""
    for a in word:
        if isinstance(a, Var):
            if a.family not in covs:
                raise ValueError(f"letter {a} references unknown family {a.family!r}")
            C = covs[a.family]
            if a.index not in C.indices:
                raise ValueError(f"letter {a} references unknown index {a.index!r}")
            if C.side_of(a.index) != a.side:
                raise ValueError(f"letter {a} acts on side {a.side} but index {a.index!r} is on the other face")
        else:
            if diag is None or a.symbol not in diag.symbols:
                raise ValueError(f"diagonal symbol {a.symbol!r} not declared")


def limit_moment(word: Word, covs: Mapping[str, CovSpec], diag: DiagonalLimit | None = None) -> tuple[float, str]:
    """Exact limit of the word together with the name of the evaluator used."""
    check_word(word, covs, diag)
    if not word.has_diagonals():
        idx = [a.index for a in word]
        fams = list(word.families)
        if len(set(fams)) == 1:
            return clt_moment(covs[fams[0]], idx), "clt_moment"
        return clt_moment_multi(covs, idx, fams), "clt_moment_multi"
    if word.all_left() and _is_alternating_sd(word) and len(word) // 2 <= MAX_ENUM_N:
        ys = word.letters[0::2]
        ds = word.letters[1::2]
        val = free_moment_with_diagonals(
            covs, [a.index for a in ys], [a.family for a in ys], [d.symbol for d in ds], diag
        )
        return val, "free_moment_with_diagonals"
    fams: list[FamilySpec] = [CLTFamily(k, C) for k, C in covs.items()]
    fams.append(diagonal_family(diag))
    return bifree_moment_general(fams, word.letters), "bifree_moment_general"


__all__ = [
    "Atom",
    "CLTFamily",
    "CovSpec",
    "CovarianceError",
    "DiagonalLimit",
    "FamilySpec",
    "MomentFamily",
    "bifree_moment_general",
    "check_word",
    "clt_moment",
    "clt_moment_multi",
    "diagonal_family",
    "free_moment_with_diagonals",
    "limit_moment",
    "moment_oracle",
]
