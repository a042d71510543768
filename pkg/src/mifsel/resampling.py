"""K-fold resampling distributions, permutation nulls, p-values, percentiles.

Everything here is deterministic given the generator it is handed.
Sub-streams for the P permutation estimates are spawned from the parent
generator before dispatch, so parallel execution is bit-identical to
sequential execution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import beta

from ._util import parallel_map
from .estimator import MIQuery, _mi_profile, estimate_mi


@dataclass(frozen=True)
class FoldPartition:
    """K disjoint row-index folds covering 0..n-1, sizes differing by <= 1."""

    folds: Tuple[np.ndarray, ...]
    n: int

    def __post_init__(self):
        folds = tuple(np.asarray(f, dtype=np.intp) for f in self.folds)
        object.__setattr__(self, "folds", folds)
        sizes = [f.size for f in folds]
        if max(sizes) - min(sizes) > 1:
            raise ValueError("fold sizes must differ by at most 1")
        merged = np.concatenate(folds)
        if merged.size != self.n or not np.array_equal(np.sort(merged), np.arange(self.n)):
            raise ValueError("folds must partition 0..n-1 exactly")

    @property
    def K(self) -> int:
        return len(self.folds)

    def complement(self, i: int) -> np.ndarray:
        """All row indices outside fold i, sorted."""
        mask = np.ones(self.n, dtype=bool)
        mask[self.folds[i]] = False
        return np.nonzero(mask)[0]


@dataclass(frozen=True)
class MIDistribution:
    """A sample of MI estimates with its mean and unbiased variance."""

    samples: Tuple[float, ...]
    mean: float
    variance: float

    @classmethod
    def from_samples(cls, samples: Sequence[float]) -> "MIDistribution":
        vals = tuple(float(v) for v in samples)
        if len(vals) < 2:
            raise ValueError("need at least 2 samples")
        m = math.fsum(vals) / len(vals)
        var = math.fsum((v - m) ** 2 for v in vals) / (len(vals) - 1)
        return cls(vals, m, var)


@dataclass(frozen=True)
class PValueResult:
    p: float
    ci_low: float
    ci_high: float
    n_permutations: int

    def __post_init__(self):
        if not self.ci_low <= self.p <= self.ci_high:
            raise ValueError("confidence interval must bracket p")


def kfold_partition(n: int, K: int, rng: np.random.Generator) -> FoldPartition:
    """Uniform random balanced partition of 0..n-1 into K folds."""
    if K < 2:
        raise ValueError("K must be >= 2")
    if K > n:
        raise ValueError("K must not exceed n")
    perm = rng.permutation(n)
    base, rem = divmod(n, K)
    folds = []
    start = 0
    for i in range(K):
        size = base + (1 if i < rem else 0)
        folds.append(np.sort(perm[start : start + size]))
        start += size
    return FoldPartition(tuple(folds), n)


def kfold_mi_distribution(
    data,
    query: MIQuery,
    K: int,
    rng: np.random.Generator,
    *,
    threads: int = 1,
    standardize: bool = True,
) -> MIDistribution:
    """K MI estimates, the i-th computed on all rows except fold i."""
    part = kfold_partition(data.n, K, rng)
    min_rows = data.n - max(f.size for f in part.folds)
    if query.k + 1 > min_rows:
        raise ValueError("every fold complement must keep at least k + 1 rows")
    complements = [part.complement(i) for i in range(K)]

    def one(rows):
        return estimate_mi(data, rows, query, standardize=standardize).value

    return MIDistribution.from_samples(parallel_map(one, complements, threads))


def permute_column(values, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random permutation of a vector (new array, input untouched)."""
    return rng.permutation(np.asarray(values))


def permutation_null(
    data,
    base_features: Sequence[int],
    candidate: int,
    query_k: int,
    P: int,
    rng: np.random.Generator,
    *,
    threads: int = 1,
    standardize: bool = True,
) -> MIDistribution:
    """Null distribution of MI(base + permuted candidate; Y).

    Each of the P estimates permutes ONLY the candidate column with a
    fresh independent shuffle; base columns and the target stay aligned.
    The input dataset is never modified.
    """
    if P < 10:
        raise ValueError("P must be >= 10 for a usable 95th percentile")
    base = tuple(int(i) for i in base_features)
    if len(set(base)) != len(base):
        raise ValueError("duplicate base features")
    candidate = int(candidate)
    if candidate in base:
        raise ValueError("candidate must not be among the base features")
    d = data.features.shape[1]
    if any(not 0 <= i < d for i in (*base, candidate)):
        raise ValueError("feature index out of range")
    y = np.asarray(data.target, dtype=np.float64)
    base_cols = np.asarray(data.features, dtype=np.float64)[:, base] if base else None
    cand_col = np.asarray(data.features, dtype=np.float64)[:, candidate]
    streams = rng.spawn(P)

    def one(i):
        col = streams[i].permutation(cand_col)
        x = col[:, None] if base_cols is None else np.column_stack([base_cols, col])
        return float(_mi_profile(x, y, (query_k,), standardize)[0])

    return MIDistribution.from_samples(parallel_map(one, range(P), threads))


def p_value(observed: float, null: MIDistribution) -> PValueResult:
    """Proportion of null samples >= observed, with a 95% Clopper-Pearson
    interval for that proportion."""
    P = len(null.samples)
    if P < 10:
        raise ValueError("need at least 10 null samples")
    x = sum(1 for s in null.samples if s >= observed)
    p = x / P
    lo = 0.0 if x == 0 else float(beta.ppf(0.025, x, P - x + 1))
    hi = 1.0 if x == P else float(beta.ppf(0.975, x + 1, P - x))
    return PValueResult(p, lo, hi, P)


def percentile(dist: MIDistribution, q: float) -> float:
    """Nearest-rank empirical quantile: the ceil(q*P)-th smallest sample.

    Always returns an actual member of the sample set.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    P = len(dist.samples)
    if P < 10:
        raise ValueError("need at least 10 samples")
    rank = math.ceil(q * P)
    return sorted(dist.samples)[rank - 1]
