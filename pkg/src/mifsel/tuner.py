"""Neighbor-count selection for the MI estimator.

For every feature i and every candidate k, two K-fold distributions are
built: MI(X_i; Y) as-is, and MI of a permuted copy of X_i against Y
(one fresh permutation per fold evaluation, so each grid cell rests on
K independent shuffles). Their separation

    t = (mean - null_mean) / sqrt(variance + null_variance)

is largest where the estimator distinguishes real dependence from none
most reliably; k* is the column of the grid maximum.

A rejected alternative was to average t over the significant features
only; the plain grid maximum is what is implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ._util import parallel_map
from .estimator import _mi_batch
from .resampling import FoldPartition, MIDistribution, kfold_partition


@dataclass(frozen=True)
class KSelection:
    """The t grid over features x neighbor counts and the chosen k*."""

    k_values: Tuple[int, ...]
    t_grid: np.ndarray  # (d, len(k_values))
    k_star: int
    argmax_feature: int
    mean: np.ndarray
    variance: np.ndarray
    null_mean: np.ndarray
    null_variance: np.ndarray
    folds: FoldPartition

    def __post_init__(self):
        for name in ("t_grid", "mean", "variance", "null_mean", "null_variance"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.k_star not in self.k_values:
            raise ValueError("k_star must lie in the evaluated range")
        col = self.k_values.index(self.k_star)
        if self.t_grid[self.argmax_feature, col] != self.t_grid.max():
            raise ValueError("(argmax_feature, k_star) must attain the grid maximum")


def separation_from_stats(mean: float, variance: float, null_mean: float, null_variance: float) -> float:
    """t = (mean - null_mean) / sqrt(variance + null_variance).

    When both variances vanish the ratio is undefined; the documented
    sentinel is +inf for differing means and 0 for equal ones.
    """
    denom = variance + null_variance
    if denom > 0.0:
        return (mean - null_mean) / math.sqrt(denom)
    return math.inf if mean != null_mean else 0.0


def separation_statistic(dist: MIDistribution, null_dist: MIDistribution) -> float:
    """Separation between an MI distribution and its permuted counterpart."""
    if len(dist.samples) < 2 or len(null_dist.samples) < 2:
        raise ValueError("both distributions need at least 2 samples")
    return separation_from_stats(dist.mean, dist.variance, null_dist.mean, null_dist.variance)


def _size_groups(complements):
    """Fold indices grouped by complement size (batch work needs equal rows)."""
    groups = {}
    for f, rows in enumerate(complements):
        groups.setdefault(rows.size, []).append(f)
    return groups


def select_k(
    data,
    k_range: Tuple[int, int],
    K: int,
    rng: np.random.Generator,
    *,
    threads: int = 1,
    standardize: bool = True,
) -> KSelection:
    """Evaluate the t grid and pick k*.

    Grid cells are evaluated feature-major, k-minor; every cell's null
    arm consumes its own derived RNG streams, so results do not depend
    on thread count. Ties in the grid maximum go to the smaller k, then
    the smaller feature index.
    """
    k_min, k_max = int(k_range[0]), int(k_range[1])
    if k_min < 1 or k_min > k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    n, d = data.features.shape
    part = kfold_partition(n, K, rng)
    complements = [part.complement(i) for i in range(K)]
    min_rows = min(rows.size for rows in complements)
    if k_max + 1 > min_rows:
        raise ValueError(f"k_max={k_max} needs more rows than a fold complement keeps ({min_rows})")
    ks = list(range(k_min, k_max + 1))
    groups = _size_groups(complements)
    feats = np.asarray(data.features, dtype=np.float64)
    targ = np.asarray(data.target, dtype=np.float64)
    feat_streams = rng.spawn(d)

    def feature_task(i):
        x = feats[:, i]
        plain = np.empty((K, len(ks)), dtype=np.float64)
        for _, fidx in sorted(groups.items()):
            xb = np.stack([x[complements[f]] for f in fidx])
            yb = np.stack([targ[complements[f]] for f in fidx])
            plain[fidx] = _mi_batch(xb, yb, ks, standardize)
        null = np.empty((K, len(ks)), dtype=np.float64)
        cell_streams = feat_streams[i].spawn(len(ks))
        for a, k in enumerate(ks):
            perm_streams = cell_streams[a].spawn(K)
            shuffled = [perm_streams[f].permutation(x[complements[f]]) for f in range(K)]
            for _, fidx in sorted(groups.items()):
                xb = np.stack([shuffled[f] for f in fidx])
                yb = np.stack([targ[complements[f]] for f in fidx])
                null[fidx, a] = _mi_batch(xb, yb, [k], standardize)[:, 0]
        return plain, null

    results = parallel_map(feature_task, range(d), threads)

    shape = (d, len(ks))
    t_grid = np.empty(shape)
    mean = np.empty(shape)
    variance = np.empty(shape)
    null_mean = np.empty(shape)
    null_variance = np.empty(shape)
    for i, (plain, null) in enumerate(results):
        for a in range(len(ks)):
            dist = MIDistribution.from_samples(plain[:, a])
            ndist = MIDistribution.from_samples(null[:, a])
            mean[i, a] = dist.mean
            variance[i, a] = dist.variance
            null_mean[i, a] = ndist.mean
            null_variance[i, a] = ndist.variance
            t_grid[i, a] = separation_from_stats(dist.mean, dist.variance, ndist.mean, ndist.variance)

    best = t_grid.max()
    ties = np.argwhere(t_grid == best)
    i_star, a_star = min(((int(r), int(c)) for r, c in ties), key=lambda rc: (rc[1], rc[0]))
    return KSelection(
        k_values=tuple(ks),
        t_grid=t_grid,
        k_star=ks[a_star],
        argmax_feature=i_star,
        mean=mean,
        variance=variance,
        null_mean=null_mean,
        null_variance=null_variance,
        folds=part,
    )
