"""Bi-free central limits: exact moments, cumulants and random-matrix estimates."""
from .bnc import LEFT, RIGHT, SideMap, enumerate_bnc, is_bi_noncrossing, shuffle_permutation
from .combinat import (
    Permutation,
    SetPartition,
    SizeLimitError,
    enumerate_noncrossing,
    enumerate_pairings,
    enumerate_set_partitions,
    is_noncrossing,
    kreweras_complement,
    nc_mobius,
    refines,
)
from .cumulant import (
    MomentOracle,
    OracleGapError,
    bifree_cumulant,
    check_bifree_vanishing,
    cumulants_from_moments,
    moment_from_cumulants,
)
from .ensemble import EnsembleSpec, EntryLaw, make_diagonals, sample_family, sqrt_factor, validate_ensemble
from .limits import (
    Atom,
    CLTFamily,
    CovSpec,
    DiagonalLimit,
    MomentFamily,
    bifree_moment_general,
    clt_moment,
    clt_moment_multi,
    free_moment_with_diagonals,
    limit_moment,
)
from .mc import TraceEstimate, convergence_sweep, estimate_moment, realize_word
from .words import Diag, Var, Word

__version__ = "0.1.0"
