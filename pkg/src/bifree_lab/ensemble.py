"""Random two-faced matrix families with non-Gaussian entries, and constant diagonals.

Every upper-triangular position (i <= j) of every family gets an i.i.d.
standardized vector u (one coordinate per index of I+J), mixed to the target
covariance by a square-root factor L of C and scaled by 1/sqrt(N).  Lower
entries mirror the upper ones, so every matrix is real symmetric.

Random streams are keyed by (base_seed, sample_index, family) through a
Philox counter-based generator.  Position p of the upper triangle (row-major)
consumes the p-th slice of its family's stream, so a sample never depends on
which worker produced it.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .limits import PSD_TOL, CovarianceError, CovSpec, DiagonalLimit


class EntryLaw(str, Enum):
    """Mean-zero, variance-one entry distributions."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "uniform"
    CENTERED_EXPONENTIAL = "centered_exponential"

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self is EntryLaw.GAUSSIAN:
            return rng.standard_normal(shape)
        if self is EntryLaw.RADEMACHER:
            return 2.0 * rng.integers(0, 2, size=shape).astype(float) - 1.0
        if self is EntryLaw.UNIFORM:
            r = math.sqrt(3.0)
            return rng.uniform(-r, r, size=shape)
        return rng.standard_exponential(shape) - 1.0

    def abs_moment_bound(self, m: int) -> float:
        """Upper bound B(m) >= E|u|^m.

        Exact for the first three laws.  For Exp(1) - 1 the integral splits
        at 1: the [0, 1] part is at most 1 and the tail part is m!/e.
        """
        if m < 0:
            raise ValueError("moment order must be nonnegative")
        if self is EntryLaw.GAUSSIAN:
            return 2.0 ** (m / 2) * math.gamma((m + 1) / 2) / math.sqrt(math.pi)
        if self is EntryLaw.RADEMACHER:
            return 1.0
        if self is EntryLaw.UNIFORM:
            return math.sqrt(3.0) ** m / (m + 1)
        return 1.0 + math.factorial(m) / math.e


@dataclass(frozen=True)
class EnsembleSpec:
    families: Mapping[str, CovSpec]
    N: int
    law: EntryLaw = EntryLaw.RADEMACHER
    base_seed: int = 0

    def __post_init__(self):
        if int(self.N) < 1:
            raise ValueError(f"matrix size N must be >= 1, got {self.N}")
        if not self.families:
            raise ValueError("ensemble needs at least one family")
        for k, C in self.families.items():
            if not isinstance(C, CovSpec):
                raise TypeError(f"family {k!r}: expected CovSpec, got {type(C).__name__}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "law", EntryLaw(self.law))
        object.__setattr__(self, "base_seed", int(self.base_seed) % 2**64)

    def with_N(self, N: int) -> "EnsembleSpec":
        return EnsembleSpec(self.families, N, self.law, self.base_seed)


@dataclass
class SampledFamily:
    """One draw of every (family, index) matrix."""

    N: int
    matrices: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def __getitem__(self, key: tuple[str, str]) -> np.ndarray:
        return self.matrices[key]


def sqrt_factor(C) -> np.ndarray:
    """Symmetric square root of a PSD matrix; eigenvalues in [-1e-12, 0) are clamped to 0."""
    a = C.matrix if isinstance(C, CovSpec) else np.asarray(C, dtype=float)
    w, v = np.linalg.eigh(a)
    if w.min() < -PSD_TOL:
        raise CovarianceError(f"matrix not positive semidefinite (smallest eigenvalue {w.min():.3g})")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def _family_key(family: str) -> int:
    return zlib.crc32(str(family).encode("utf-8"))


def family_rng(base_seed: int, sample_index: int, family: str) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=int(base_seed) % 2**64, spawn_key=(int(sample_index), _family_key(family)))
    return np.random.Generator(np.random.Philox(seq))


def sample_family(spec: EnsembleSpec, sample_index: int, factors: Mapping[str, np.ndarray] | None = None) -> SampledFamily:
    """Deterministic draw number ``sample_index`` of every family in ``spec``.

    ``factors`` may carry precomputed ``sqrt_factor`` results per family.
    """
    N = spec.N
    iu, ju = np.triu_indices(N)
    out = SampledFamily(N)
    scale = 1.0 / math.sqrt(N)
    for k, C in spec.families.items():
        L = factors[k] if factors is not None else sqrt_factor(C)
        u = spec.law.draw(family_rng(spec.base_seed, sample_index, k), (iu.size, len(C.indices)))
        v = (u @ L.T) * scale
        for col, idx in enumerate(C.indices):
            m = np.empty((N, N))
            m[iu, ju] = v[:, col]
            m[ju, iu] = v[:, col]
            out.matrices[(k, idx)] = m
    return out


def allocate_atoms(weights, N: int) -> list[int]:
    """Floor allocation, remainder to the heaviest atoms (ties by atom order)."""
    counts = [math.floor(w * N) for w in weights]
    rem = N - sum(counts)
    order = sorted(range(len(weights)), key=lambda a: -weights[a])
    for a in order[:rem]:
        counts[a] += 1
    return counts


def make_diagonals(diag: DiagonalLimit, N: int) -> dict[str, np.ndarray]:
    """Constant diagonal N x N matrices whose joint moments approximate ``diag``."""
    if N < len(diag.atoms):
        raise ValueError(f"N={N} smaller than the number of atoms ({len(diag.atoms)})")
    counts = allocate_atoms([a.weight for a in diag.atoms], N)
    out = {}
    for s in diag.symbols:
        entries = np.concatenate([np.full(c, a.values[s]) for a, c in zip(diag.atoms, counts)])
        out[s] = np.diag(entries)
    return out


@dataclass(frozen=True)
class ValidationRow:
    kind: str  # "mean" or "cov"
    left: tuple[str, str]
    right: tuple[str, str] | None
    position: tuple[int, int]
    estimate: float
    target: float
    stderr: float
    z: float


@dataclass
class ValidationReport:
    n_samples: int
    N: int
    rows: list[ValidationRow]
    z_limit: float = 5.0

    @property
    def flags(self) -> list[ValidationRow]:
        return [r for r in self.rows if abs(r.z) > self.z_limit]

    @property
    def ok(self) -> bool:
        return not self.flags


def _z(est: float, target: float, se: float) -> float:
    if se == 0.0:
        # constant data (e.g. squared Rademacher entries): only rounding separates est from target
        return 0.0 if math.isclose(est, target, rel_tol=1e-9, abs_tol=1e-15) else math.inf
    return (est - target) / se


def validate_ensemble(spec: EnsembleSpec, n_samples: int, z_limit: float = 5.0) -> ValidationReport:
    """Empirical entry means and pair covariances against 0 and c/N.

    Checked positions: (1,1), (1,2) and (N,N) (1-based; duplicates dropped).
    Cross-family covariances have target 0.
    """
    if n_samples < 100:
        raise ValueError("validation needs at least 100 samples")
    N = spec.N
    positions = sorted({(0, 0), (0, min(1, N - 1)), (N - 1, N - 1)})
    keys = [(k, idx) for k, C in spec.families.items() for idx in C.indices]
    factors = {k: sqrt_factor(C) for k, C in spec.families.items()}
    upper = np.empty((n_samples, len(keys), len(positions)))
    lower = np.empty_like(upper)
    for s in range(n_samples):
        fam = sample_family(spec, s, factors)
        for a, key in enumerate(keys):
            m = fam[key]
            for p, (i, j) in enumerate(positions):
                upper[s, a, p] = m[i, j]
                lower[s, a, p] = m[j, i]
    rows = []
    root_n = math.sqrt(n_samples)
    for a, key in enumerate(keys):
        for p, pos in enumerate(positions):
            x = upper[:, a, p]
            est, se = float(x.mean()), float(x.std(ddof=1)) / root_n
            rows.append(ValidationRow("mean", key, None, (pos[0] + 1, pos[1] + 1), est, 0.0, se, _z(est, 0.0, se)))
    for a, ka in enumerate(keys):
        for b, kb in enumerate(keys):
            if b < a:
                continue
            if ka[0] == kb[0]:
                target = spec.families[ka[0]].c(ka[1], kb[1]) / N
            else:
                target = 0.0
            for p, pos in enumerate(positions):
                x = upper[:, a, p] * lower[:, b, p]
                est, se = float(x.mean()), float(x.std(ddof=1)) / root_n
                rows.append(ValidationRow("cov", ka, kb, (pos[0] + 1, pos[1] + 1), est, target, se, _z(est, target, se)))
    return ValidationReport(n_samples, N, rows, z_limit)
