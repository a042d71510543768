"""Dataset construction: synthetic generator, CSV ingestion, splitting.

A Dataset is an immutable bundle of an (n, d) feature matrix, an
n-vector continuous target, and column names. Arrays are copied and
write-locked at construction; all transformations return new objects.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Optional, Sequence, Tuple

import numpy as np


class DataError(Exception):
    """Raised for unusable input data: missing files, ragged or
    non-numeric tables, unknown target columns."""


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    target: np.ndarray
    names: Tuple[str, ...]
    target_name: str = "Y"
    standardized: bool = False
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64)
        targ = np.array(self.target, dtype=np.float64)
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, d = feats.shape
        if n < 2:
            raise ValueError("need at least 2 rows")
        if d < 1:
            raise ValueError("need at least 1 feature column")
        if targ.shape != (n,):
            raise ValueError("target length must match the feature row count")
        if not np.isfinite(feats).all() or not np.isfinite(targ).all():
            raise ValueError("dataset contains NaN or infinite values")
        names = tuple(str(s) for s in self.names)
        if len(names) != d:
            raise ValueError("need one name per feature column")
        if len(set(names)) != d:
            raise ValueError("feature names must be distinct")
        feats.setflags(write=False)
        targ.setflags(write=False)
        meta = MappingProxyType(dict(self.meta))
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "target", targ)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "target_name", str(self.target_name))
        object.__setattr__(self, "meta", meta)
        if self.standardized:
            self._check_standardized()

    def _check_standardized(self):
        exempt = set(self.meta.get("constant_columns", ()))
        for j in range(self.d):
            if j in exempt:
                continue
            col = self.features[:, j]
            mean = math.fsum(col.tolist()) / self.n
            var = math.fsum(((col - mean) ** 2).tolist()) / self.n
            if abs(mean) > 1e-9 or abs(var - 1.0) > 1e-6:
                raise ValueError(f"column {self.names[j]!r} is not standardized")
        if not self.meta.get("constant_target", False):
            mean = math.fsum(self.target.tolist()) / self.n
            var = math.fsum(((self.target - mean) ** 2).tolist()) / self.n
            if abs(mean) > 1e-9 or abs(var - 1.0) > 1e-6:
                raise ValueError("target is not standardized")

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.features, other.features)
            and np.array_equal(self.target, other.target)
            and self.names == other.names
            and self.target_name == other.target_name
            and self.standardized == other.standardized
            and dict(self.meta) == dict(other.meta)
        )

    def __hash__(self):
        return hash((self.names, self.target_name, self.n, self.d))


def friedman_response(features, noise=None, *, pi_variant: bool = False) -> np.ndarray:
    """Target values for the synthetic benchmark, given feature rows.

    y = 10*sin(x1*x2) + 20*(x3 - 0.5)^2 + 10*x4 + 5*x5 + noise

    Only the first five columns enter the response. pi_variant=True puts
    the classical pi factor inside the sine argument instead.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 5:
        raise ValueError("need a 2-D feature matrix with at least 5 columns")
    arg = x[:, 0] * x[:, 1]
    if pi_variant:
        arg = np.pi * arg
    y = 10.0 * np.sin(arg) + 20.0 * (x[:, 2] - 0.5) ** 2 + 10.0 * x[:, 3] + 5.0 * x[:, 4]
    if noise is not None:
        y = y + np.asarray(noise, dtype=np.float64)
    return y


def friedman_generate(n: int, rng: np.random.Generator, *, pi_variant: bool = False) -> Dataset:
    """Synthetic regression problem: 10 i.i.d. U[0,1] features, of which
    only the first five drive the target, plus unit Gaussian noise.

    Draw order is fixed (feature matrix first, then noise), so a given
    seed reproduces the dataset bit-for-bit on any platform; use
    numpy.random.default_rng(seed), which is PCG64.
    """
    if n < 10:
        raise ValueError("n must be >= 10")
    x = rng.random((n, 10))
    eps = rng.standard_normal(n)
    y = friedman_response(x, eps, pi_variant=pi_variant)
    names = tuple(f"X{i}" for i in range(1, 11))
    meta = {"source": "friedman", "n": int(n), "pi_variant": bool(pi_variant)}
    return Dataset(x, y, names, target_name="Y", meta=meta)


def load_csv(path, target_column, header: bool = True) -> Dataset:
    """Read a rectangular numeric CSV into a Dataset.

    target_column may be a column name (requires a header) or a 0-based
    integer position. Diagnostics name the offending line and column.
    Dialect: comma separator, '.' decimal point, UTF-8, optional single
    header row.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            raw = list(csv.reader(fh))
    except FileNotFoundError:
        raise DataError(f"no such file: {path}") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    raw = [r for r in raw if r]
    if not raw:
        raise DataError(f"{path}: file is empty")
    if header:
        colnames = [c.strip() for c in raw[0]]
        body = raw[1:]
        first_line = 2
    else:
        colnames = [f"X{i + 1}" for i in range(len(raw[0]))]
        body = raw
        first_line = 1
    ncols = len(colnames)
    if ncols < 2:
        raise DataError(f"{path}: need at least 2 columns (features plus target)")
    if isinstance(target_column, int) or (isinstance(target_column, str) and target_column.lstrip("-").isdigit()):
        tcol = int(target_column)
        if not 0 <= tcol < ncols:
            raise DataError(f"{path}: target column index {tcol} out of range (0..{ncols - 1})")
    else:
        try:
            tcol = colnames.index(str(target_column))
        except ValueError:
            raise DataError(f"{path}: no column named {target_column!r} (have {', '.join(colnames)})") from None
    values = np.empty((len(body), ncols), dtype=np.float64)
    for i, row in enumerate(body):
        line = first_line + i
        if len(row) != ncols:
            raise DataError(f"{path}: line {line} has {len(row)} cells, expected {ncols}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: non-numeric value {cell!r} at line {line}, column {colnames[j]!r}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: non-finite value {cell!r} at line {line}, column {colnames[j]!r}")
            values[i, j] = v
    if values.shape[0] < 2:
        raise DataError(f"{path}: need at least 2 data rows")
    keep = [j for j in range(ncols) if j != tcol]
    feats = values[:, keep]
    names = tuple(colnames[j] for j in keep)
    meta = {"source": str(path), "target": colnames[tcol]}
    try:
        return Dataset(feats, values[:, tcol], names, target_name=colnames[tcol], meta=meta)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def write_csv(data: Dataset, path) -> None:
    """Serialize a Dataset to CSV (features in order, target last)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(data.names) + [data.target_name])
        for i in range(data.n):
            writer.writerow([repr(float(v)) for v in data.features[i]] + [repr(float(data.target[i]))])


def _subset(data: Dataset, rows: np.ndarray, extra_meta: Mapping[str, Any]) -> Dataset:
    meta = dict(data.meta)
    meta.update(extra_meta)
    return Dataset(
        data.features[rows],
        data.target[rows],
        data.names,
        target_name=data.target_name,
        standardized=data.standardized,
        meta=meta,
    )


def split(
    data: Dataset,
    train_fraction: Optional[float] = None,
    sizes: Optional[Tuple[int, int]] = None,
    *,
    rng: np.random.Generator,
) -> Tuple[Dataset, Dataset]:
    """Random disjoint row split; deterministic per seed.

    Give either a train fraction in (0, 1) or explicit (train, test)
    sizes summing to n. Row order within each part follows the original
    dataset, and the split is recorded in each part's meta.
    """
    n = data.n
    if (train_fraction is None) == (sizes is None):
        raise ValueError("give exactly one of train_fraction or sizes")
    if sizes is not None:
        a, b = int(sizes[0]), int(sizes[1])
        if a < 1 or b < 1:
            raise ValueError("both parts must be non-empty")
        if a + b != n:
            raise ValueError(f"sizes {a}+{b} do not sum to the row count {n}")
    else:
        if not 0.0 < train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        a = int(round(train_fraction * n))
        b = n - a
        if a < 1 or b < 1:
            raise ValueError("split leaves an empty part")
    perm = rng.permutation(n)
    left = np.sort(perm[:a])
    right = np.sort(perm[a:])
    train = _subset(data, left, {"split": {"part": "train", "sizes": [a, b]}})
    test = _subset(data, right, {"split": {"part": "test", "sizes": [a, b]}})
    return train, test


def standardize(data: Dataset) -> Dataset:
    """Column-wise zero-mean unit-variance transform of features and
    target. Constant columns are centered only and flagged in meta so
    the invariant check can exempt them; the transform parameters are
    stored for destandardize()."""
    n = data.n
    feats = np.empty_like(data.features)
    means, scales, constant = [], [], []
    for j in range(data.d):
        col = data.features[:, j]
        mean = math.fsum(col.tolist()) / n
        centered = col - mean
        var = math.fsum((centered * centered).tolist()) / n
        scale = math.sqrt(var)
        if scale == 0.0:
            constant.append(j)
            scale = 1.0
        feats[:, j] = centered / scale
        means.append(mean)
        scales.append(scale)
    tmean = math.fsum(data.target.tolist()) / n
    tcentered = data.target - tmean
    tvar = math.fsum((tcentered * tcentered).tolist()) / n
    tscale = math.sqrt(tvar)
    constant_target = tscale == 0.0
    if constant_target:
        tscale = 1.0
    meta = dict(data.meta)
    meta["standardize"] = {
        "feature_mean": means,
        "feature_scale": scales,
        "target_mean": tmean,
        "target_scale": tscale,
    }
    if constant:
        meta["constant_columns"] = constant
    if constant_target:
        meta["constant_target"] = True
    return Dataset(
        feats,
        tcentered / tscale,
        data.names,
        target_name=data.target_name,
        standardized=True,
        meta=meta,
    )


def destandardize(data: Dataset) -> Dataset:
    """Invert standardize() using the transform recorded in meta."""
    info = data.meta.get("standardize")
    if info is None:
        raise ValueError("dataset carries no standardization record")
    feats = np.empty_like(data.features)
    for j in range(data.d):
        feats[:, j] = data.features[:, j] * info["feature_scale"][j] + info["feature_mean"][j]
    targ = data.target * info["target_scale"] + info["target_mean"]
    meta = {k: v for k, v in data.meta.items() if k not in ("standardize", "constant_columns", "constant_target")}
    return Dataset(feats, targ, data.names, target_name=data.target_name, standardized=False, meta=meta)
