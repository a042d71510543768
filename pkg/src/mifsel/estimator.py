"""k-nearest-neighbor mutual information estimation.

Implements the Kraskov-Stoegbauer-Grassberger estimator in its first
("algorithm 1") form:

    MI(X;Y) ~ psi(k) + psi(n) - mean_i[ psi(nx_i + 1) + psi(ny_i + 1) ]

where the joint distance between two rows is the larger of the Chebyshev
(max-norm) distance over the feature block and the absolute target
difference, eps_i is the joint distance from row i to its k-th nearest
other row, and nx_i / ny_i count rows strictly inside eps_i in each
marginal space. When eps_i is zero (at least k exact joint duplicates)
the marginal counts fall back to counting rows at distance exactly zero.

All values are in nats. Estimates on independent data scatter around
zero and may be slightly negative; they are deliberately not clamped,
since downstream significance tests compare raw values against a
permutation null that is itself centered near zero.

Determinism notes:
  - Distance ties are broken by row index (lower index counts as nearer).
    The estimate itself depends only on order statistics and strict
    counts, so the tie rule never changes the value, only which row is
    designated the k-th neighbor.
  - Column means/variances and the final average are accumulated with
    math.fsum, which is exactly rounding-order independent. Together
    with the count-based formula this makes the estimate exactly
    invariant under row permutations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

# Cap on elements per temporary pairwise-distance block (memory control).
_CHUNK_ELEMS = 2_000_000


def digamma(x):
    """Digamma function for positive real arguments.

    Accepts a scalar or array; returns a float for scalar input.
    Uses the recurrence psi(x) = psi(x+1) - 1/x to shift the argument
    above 10, then an asymptotic Bernoulli series; absolute error is
    below 1e-14 on [0.5, 1e6].
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError("digamma requires finite x > 0")
    y = np.array(arr, copy=True)
    acc = np.zeros_like(y)
    small = y < 10.0
    while small.any():
        acc[small] -= 1.0 / y[small]
        y[small] += 1.0
        small = y < 10.0
    inv = 1.0 / y
    u = inv * inv
    # psi(y) = ln y - 1/(2y) - sum B_{2m}/(2m y^{2m}); truncation past
    # the y^-12 term is ~8e-16 at y = 10.
    tail = u * (
        1.0 / 12.0
        - u * (1.0 / 120.0 - u * (1.0 / 252.0 - u * (1.0 / 240.0 - u * (1.0 / 132.0 - u * (691.0 / 32760.0)))))
    )
    val = acc + np.log(y) - 0.5 * inv - tail
    if arr.ndim == 0:
        return float(val)
    return val


@lru_cache(maxsize=64)
def _psi_table(n: int) -> np.ndarray:
    """psi(m) for m = 1..n as a read-only lookup table (index 0 unused)."""
    t = np.empty(n + 1, dtype=np.float64)
    t[0] = np.nan
    t[1:] = digamma(np.arange(1.0, n + 1.0))
    t.setflags(write=False)
    return t


@dataclass(frozen=True)
class MIQuery:
    """A feature subset plus the neighbor count to estimate MI with."""

    feature_indices: Tuple[int, ...]
    k: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.feature_indices)
        if not idx:
            raise ValueError("feature set must be non-empty")
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate feature indices")
        if any(i < 0 for i in idx):
            raise ValueError("feature indices must be non-negative")
        k = int(self.k)
        if k < 1:
            raise ValueError("k must be >= 1")
        object.__setattr__(self, "feature_indices", idx)
        object.__setattr__(self, "k", k)


@dataclass(frozen=True)
class MIEstimate:
    """An MI value in nats plus the context it was computed in."""

    value: float
    n_used: int
    standardized: bool = True

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError("MI estimate must be finite")


def _standardize_1d(v: np.ndarray) -> np.ndarray:
    """Zero-mean, unit-variance copy of a column (population variance).

    fsum keeps the statistics independent of row order. A constant
    column has no scale; it is centered only (all zeros).
    """
    n = v.size
    mean = math.fsum(v.tolist()) / n
    centered = v - mean
    var = math.fsum((centered * centered).tolist()) / n
    scale = math.sqrt(var)
    if scale > 0.0:
        return centered / scale
    return centered


def _counts(x: np.ndarray, y: np.ndarray, ks: Sequence[int]):
    """Marginal neighbor counts for every k in ``ks``.

    x: (n, c) feature block, y: (n,) target, already scaled as desired.
    Returns (nx, ny), each of shape (len(ks), n). Counting is strict
    (< eps); a zero k-th radius falls back to counting at distance 0.
    Work is chunked over query rows to bound temporary matrix size.
    """
    n = x.shape[0]
    korder = np.asarray(ks, dtype=np.intp) - 1
    nx = np.empty((len(ks), n), dtype=np.int64)
    ny = np.empty((len(ks), n), dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // n)
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        dx = np.abs(x[lo:hi, None, 0] - x[None, :, 0])
        for c in range(1, x.shape[1]):
            np.maximum(dx, np.abs(x[lo:hi, None, c] - x[None, :, c]), out=dx)
        dy = np.abs(y[lo:hi, None] - y[None, :])
        dj = np.maximum(dx, dy)
        dj[np.arange(hi - lo), np.arange(lo, hi)] = np.inf  # a row is not its own neighbor
        part = np.partition(dj, korder, axis=1)
        zx = (dx == 0.0).sum(axis=1) - 1
        zy = (dy == 0.0).sum(axis=1) - 1
        for a in range(len(ks)):
            eps = part[:, korder[a], None]
            pos = eps[:, 0] > 0.0
            sx = (dx < eps).sum(axis=1) - 1
            sy = (dy < eps).sum(axis=1) - 1
            nx[a, lo:hi] = np.where(pos, sx, zx)
            ny[a, lo:hi] = np.where(pos, sy, zy)
    return nx, ny


def _counts_batch(xb: np.ndarray, yb: np.ndarray, ks: Sequence[int]):
    """Counts for B independent single-feature problems of equal size.

    xb, yb: (B, m). Returns (nx, ny) of shape (len(ks), B, m). Used by
    the neighbor-count tuner, where many same-sized fold complements are
    evaluated at once; element-for-element this performs the exact same
    comparisons as _counts, so results are bit-identical.
    """
    b, m = xb.shape
    korder = np.asarray(ks, dtype=np.intp) - 1
    nx = np.empty((len(ks), b, m), dtype=np.int64)
    ny = np.empty((len(ks), b, m), dtype=np.int64)
    step = max(1, _CHUNK_ELEMS // (m * m))
    for lo in range(0, b, step):
        hi = min(b, lo + step)
        dx = np.abs(xb[lo:hi, :, None] - xb[lo:hi, None, :])
        dy = np.abs(yb[lo:hi, :, None] - yb[lo:hi, None, :])
        dj = np.maximum(dx, dy)
        ii = np.arange(m)
        dj[:, ii, ii] = np.inf
        part = np.partition(dj, korder, axis=2)
        zx = (dx == 0.0).sum(axis=2) - 1
        zy = (dy == 0.0).sum(axis=2) - 1
        for a in range(len(ks)):
            eps = part[:, :, korder[a], None]
            pos = eps[:, :, 0] > 0.0
            sx = (dx < eps).sum(axis=2) - 1
            sy = (dy < eps).sum(axis=2) - 1
            nx[a, lo:hi] = np.where(pos, sx, zx)
            ny[a, lo:hi] = np.where(pos, sy, zy)
    return nx, ny


def _mi_from_counts(psi: np.ndarray, n: int, k: int, nx_row: np.ndarray, ny_row: np.ndarray) -> float:
    s = math.fsum(psi[nx_row + 1].tolist()) + math.fsum(psi[ny_row + 1].tolist())
    return float(psi[k] + psi[n] - s / n)


def _mi_profile(x: np.ndarray, y: np.ndarray, ks: Sequence[int], standardize: bool) -> np.ndarray:
    """MI estimates for one (X block, Y) pair at every k in ``ks``.

    Shares one pairwise-distance computation across all k values.
    """
    n = x.shape[0]
    if max(ks) >= n:
        raise ValueError("k must be smaller than the number of rows in use")
    if standardize:
        x = np.column_stack([_standardize_1d(x[:, j]) for j in range(x.shape[1])])
        y = _standardize_1d(y)
    nx, ny = _counts(x, y, ks)
    psi = _psi_table(n)
    return np.array([_mi_from_counts(psi, n, k, nx[a], ny[a]) for a, k in enumerate(ks)])


def _mi_batch(xb: np.ndarray, yb: np.ndarray, ks: Sequence[int], standardize: bool) -> np.ndarray:
    """MI estimates for B equal-sized single-feature problems, all k at once.

    xb, yb: (B, m). Returns an array of shape (B, len(ks)).
    """
    b, m = xb.shape
    if max(ks) >= m:
        raise ValueError("k must be smaller than the number of rows in use")
    if standardize:
        xb = np.stack([_standardize_1d(xb[i]) for i in range(b)])
        yb = np.stack([_standardize_1d(yb[i]) for i in range(b)])
    nx, ny = _counts_batch(xb, yb, ks)
    psi = _psi_table(m)
    out = np.empty((b, len(ks)), dtype=np.float64)
    for a, k in enumerate(ks):
        for i in range(b):
            out[i, a] = _mi_from_counts(psi, m, k, nx[a, i], ny[a, i])
    return out


def kth_neighbor_distance(points, row: int, k: int) -> float:
    """Chebyshev distance from ``row`` to its k-th nearest other row.

    Ties in distance are broken by row index (lower index nearer); the
    returned distance is the k-th order statistic either way.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if not 0 <= row < n:
        raise ValueError("row index out of range")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= n:
        raise ValueError("k must be smaller than the number of rows")
    d = np.abs(pts - pts[row]).max(axis=1)
    d[row] = np.inf
    return float(np.partition(d, k - 1)[k - 1])


def count_within(points, row: int, radius: float, strict: bool = True) -> int:
    """Number of other rows within ``radius`` of ``row`` under max-norm.

    strict=True counts distances < radius, otherwise <= radius.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if not 0 <= row < n:
        raise ValueError("row index out of range")
    d = np.abs(pts - pts[row]).max(axis=1)
    d[row] = np.inf
    hit = d < radius if strict else d <= radius
    return int(hit.sum())


def estimate_mi(data, rows, query: MIQuery, *, standardize: bool = True) -> MIEstimate:
    """Estimate MI (nats) between a feature subset and the target.

    data: any object with ``features`` (n, d) and ``target`` (n,) arrays.
    rows: row indices to compute on, or None for all rows. The estimate
    is a pure function of its inputs and is safe to call concurrently.

    By default each selected column and the target are standardized to
    zero mean and unit variance over the rows in use, so that no single
    coordinate dominates the max-norm; pass standardize=False to work on
    raw values. The flag is echoed on the returned MIEstimate.
    """
    feats = np.asarray(data.features, dtype=np.float64)
    targ = np.asarray(data.target, dtype=np.float64)
    n_total, d = feats.shape
    if any(i >= d for i in query.feature_indices):
        raise ValueError("feature index out of range")
    if rows is None:
        rows = np.arange(n_total, dtype=np.intp)
    else:
        rows = np.asarray(rows, dtype=np.intp)
        if rows.ndim != 1 or rows.size == 0:
            raise ValueError("rows must be a non-empty 1-D index collection")
        if np.unique(rows).size != rows.size:
            raise ValueError("duplicate row indices")
        if rows.min() < 0 or rows.max() >= n_total:
            raise ValueError("row index out of range")
    if query.k + 1 > rows.size:
        raise ValueError("need at least k + 1 rows")
    x = feats[np.ix_(rows, np.asarray(query.feature_indices, dtype=np.intp))]
    y = targ[rows]
    if not np.isfinite(x).all() or not np.isfinite(y).all():
        raise ValueError("non-finite values in the selected columns or target")
    value = _mi_profile(x, y, (query.k,), standardize)[0]
    return MIEstimate(float(value), int(rows.size), standardize)
