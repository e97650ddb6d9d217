"""Monte Carlo estimates of normalized expected traces of two-faced words.

A word acts on the identity matrix: a left letter multiplies from the left,
a right letter from the right, so right letters compose in reverse order.
The realized value of a word is therefore

    (1/N) Tr(P_left @ P_right),

with P_left the product of left letters in word order and P_right the
product of right letters in reverse word order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bnc import LEFT
from .ensemble import EnsembleSpec, SampledFamily, make_diagonals, sample_family, sqrt_factor
from .limits import DiagonalLimit, check_word, limit_moment
from .words import Diag, Var, Word


@dataclass(frozen=True)
class TraceEstimate:
    mean: float
    stderr: float
    n_samples: int
    N: int

    def __post_init__(self):
        if self.stderr < 0 or self.n_samples < 1:
            raise ValueError("invalid estimate")


@dataclass(frozen=True)
class SweepRow:
    N: int
    mean: float
    stderr: float
    exact: float
    abs_err: float


def _chain(factors: Sequence[np.ndarray]):
    """Ordered product; 1-D arrays stand for diagonal matrices, None for the identity."""
    acc = None
    for f in factors:
        if acc is None:
            acc = f
        elif f.ndim == 1:
            acc = acc * f if acc.ndim == 1 else acc * f[None, :]
        elif acc.ndim == 1:
            acc = acc[:, None] * f
        else:
            acc = acc @ f
    return acc


def _normalized_trace(a, b, N: int) -> float:
    """(1/N) Tr(a @ b) without forming the product."""
    if a is None and b is None:
        return 1.0
    if a is None or b is None:
        m = a if b is None else b
        return float(np.sum(m if m.ndim == 1 else np.diagonal(m))) / N
    if a.ndim == 1 and b.ndim == 1:
        return float(np.sum(a * b)) / N
    if a.ndim == 1:
        return float(np.sum(a * np.diagonal(b))) / N
    if b.ndim == 1:
        return float(np.sum(np.diagonal(a) * b)) / N
    return float(np.sum(a * b.T)) / N


def _diag_vectors(diagonals: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {k: (np.diagonal(v).copy() if v.ndim == 2 else np.asarray(v)) for k, v in diagonals.items()}


def realize_word(word: Word, matrices: SampledFamily, diagonals: Mapping[str, np.ndarray] | None = None) -> float:
    """(1/N) Tr of the word applied to the identity."""
    N = matrices.N
    dvec = _diag_vectors(diagonals or {})
    left, right = [], []
    for a in word:
        if isinstance(a, Var):
            m = matrices[(a.family, a.index)]
            if m.shape != (N, N):
                raise ValueError(f"matrix for {a} has shape {m.shape}, expected {(N, N)}")
        else:
            m = dvec[a.symbol]
            if m.shape != (N,):
                raise ValueError(f"diagonal {a.symbol} has size {m.shape[0]}, expected {N}")
        (left if a.side == LEFT else right).append(m)
    return _normalized_trace(_chain(left), _chain(right[::-1]), N)


def mean_stderr(values: np.ndarray) -> tuple[float, float]:
    """Shifted, compensated mean and standard error; order-stable and exact for constant data."""
    values = np.asarray(values, dtype=float)
    n = values.size
    shift = float(values[0])
    mean = shift + math.fsum((values - shift).tolist()) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum(((values - mean) ** 2).tolist()) / (n - 1)
    return mean, math.sqrt(var / n)


def sample_values(
    word: Word,
    spec: EnsembleSpec,
    diag: DiagonalLimit | None,
    n_samples: int,
    threads: int = 1,
) -> np.ndarray:
    """Realized traces for sample indices 0..n_samples-1, in index order."""
    check_word(word, spec.families, diag)
    used = {a.family for a in word if isinstance(a, Var)}
    sub = EnsembleSpec({k: C for k, C in spec.families.items() if k in used}, spec.N, spec.law, spec.base_seed)
    factors = {k: sqrt_factor(C) for k, C in sub.families.items()}
    diagonals = _diag_vectors(make_diagonals(diag, spec.N)) if word.has_diagonals() else {}
    values = np.empty(n_samples)

    def work(lo: int, hi: int) -> None:
        for s in range(lo, hi):
            values[s] = realize_word(word, sample_family(sub, s, factors), diagonals)

    threads = max(1, int(threads))
    if threads == 1 or n_samples < 2 * threads:
        work(0, n_samples)
    else:
        bounds = np.linspace(0, n_samples, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for f in [pool.submit(work, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]:
                f.result()
    return values


def estimate_moment(
    word: Word,
    spec: EnsembleSpec,
    diag: DiagonalLimit | None,
    n_samples: int,
    threads: int = 1,
) -> TraceEstimate:
    """Sample mean and standard error of the realized word over independent draws."""
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    mean, se = mean_stderr(sample_values(word, spec, diag, n_samples, threads))
    return TraceEstimate(mean, se, n_samples, spec.N)


def convergence_sweep(
    word: Word,
    spec: EnsembleSpec,
    diag: DiagonalLimit | None,
    Ns: Sequence[int],
    n_samples: int,
    threads: int = 1,
) -> list[SweepRow]:
    """One estimate per matrix size, next to the exact limit of the word."""
    Ns = [int(N) for N in Ns]
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"Ns must be nonempty and strictly ascending, got {Ns}")
    exact, _ = limit_moment(word, spec.families, diag)
    rows = []
    for N in Ns:
        est = estimate_moment(word, spec.with_N(N), diag, n_samples, threads)
        rows.append(SweepRow(N, est.mean, est.stderr, exact, abs(est.mean - exact)))
    return rows
