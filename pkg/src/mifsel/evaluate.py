"""Downstream sanity check: a k-nearest-neighbor regressor.

Predicts each test target as the mean target of the k_reg nearest
training rows under the max-norm over the selected features, which are
standardized with training-set statistics. Absolute error levels are
model-specific; the useful signal is how RMSE moves across feature
subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

_CHUNK_ELEMS = 2_000_000


@dataclass(frozen=True)
class EvalReport:
    feature_subset: Tuple[int, ...]
    rmse: float
    k_reg: int
    n_train: int
    n_test: int

    def __post_init__(self):
        if not (math.isfinite(self.rmse) and self.rmse >= 0.0):
            raise ValueError("rmse must be finite and non-negative")


def knn_rmse(train, test, features: Sequence[int], k_reg: int = 5) -> EvalReport:
    """Test-set RMSE of the neighbor-mean regressor on a feature subset.

    Distance ties are broken by training row index (lower index nearer),
    matching the estimator module's rule.
    """
    feats = tuple(int(i) for i in features)
    if not feats:
        raise ValueError("feature subset must be non-empty")
    if len(set(feats)) != len(feats):
        raise ValueError("duplicate features in subset")
    d_train = train.features.shape[1]
    d_test = test.features.shape[1]
    if d_train != d_test:
        raise ValueError("train and test must have the same feature columns")
    if any(not 0 <= j < d_train for j in feats):
        raise ValueError("feature index out of range")
    n_train = train.features.shape[0]
    n_test = test.features.shape[0]
    if not 1 <= k_reg <= n_train:
        raise ValueError("k_reg must be in [1, n_train]")

    cols = np.asarray(feats, dtype=np.intp)
    xtr = np.asarray(train.features, dtype=np.float64)[:, cols].copy()
    xte = np.asarray(test.features, dtype=np.float64)[:, cols].copy()
    ytr = np.asarray(train.target, dtype=np.float64)
    yte = np.asarray(test.target, dtype=np.float64)

    # Scale both sides with training statistics only.
    for c in range(xtr.shape[1]):
        mean = math.fsum(xtr[:, c].tolist()) / n_train
        centered = xtr[:, c] - mean
        var = math.fsum((centered * centered).tolist()) / n_train
        scale = math.sqrt(var)
        if scale == 0.0:
            scale = 1.0
        xtr[:, c] = centered / scale
        xte[:, c] = (xte[:, c] - mean) / scale

    preds = np.empty(n_test, dtype=np.float64)
    step = max(1, _CHUNK_ELEMS // n_train)
    for lo in range(0, n_test, step):
        hi = min(n_test, lo + step)
        dist = np.abs(xte[lo:hi, None, 0] - xtr[None, :, 0])
        for c in range(1, xtr.shape[1]):
            np.maximum(dist, np.abs(xte[lo:hi, None, c] - xtr[None, :, c]), out=dist)
        order = np.argsort(dist, axis=1, kind="stable")[:, :k_reg]
        preds[lo:hi] = ytr[order].mean(axis=1)

    err = preds - yte
    rmse = math.sqrt(math.fsum((err * err).tolist()) / n_test)
    return EvalReport(feats, rmse, int(k_reg), int(n_train), int(n_test))
