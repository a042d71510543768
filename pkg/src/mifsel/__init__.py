"""Mutual-information feature selection for regression.

The toolkit estimates MI between feature subsets and a continuous
target with a k-nearest-neighbor estimator, tunes the neighbor count by
separating resampled MI distributions from their permuted counterparts,
and runs greedy forward selection halted by a permutation test. A small
kNN regressor provides a downstream sanity check, and a CLI ties the
pipeline together.
"""

from .data import (
    DataError,
    Dataset,
    destandardize,
    friedman_generate,
    friedman_response,
    load_csv,
    split,
    standardize,
    write_csv,
)
from .estimator import (
    MIEstimate,
    MIQuery,
    count_within,
    digamma,
    estimate_mi,
    kth_neighbor_distance,
)
from .evaluate import EvalReport, knn_rmse
from .forward import (
    STOP_EXHAUSTED,
    STOP_MAX_FEATURES,
    STOP_THRESHOLD,
    ForwardIteration,
    ForwardTrace,
    forward_select,
    max_mi_subset,
)
from .resampling import (
    FoldPartition,
    MIDistribution,
    PValueResult,
    kfold_mi_distribution,
    kfold_partition,
    p_value,
    percentile,
    permutation_null,
    permute_column,
)
from .tuner import KSelection, select_k, separation_from_stats, separation_statistic

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "Dataset",
    "EvalReport",
    "FoldPartition",
    "ForwardIteration",
    "ForwardTrace",
    "KSelection",
    "MIDistribution",
    "MIEstimate",
    "MIQuery",
    "PValueResult",
    "STOP_EXHAUSTED",
    "STOP_MAX_FEATURES",
    "STOP_THRESHOLD",
    "count_within",
    "destandardize",
    "digamma",
    "estimate_mi",
    "forward_select",
    "friedman_generate",
    "friedman_response",
    "kfold_mi_distribution",
    "kfold_partition",
    "knn_rmse",
    "kth_neighbor_distance",
    "load_csv",
    "max_mi_subset",
    "p_value",
    "percentile",
    "permutation_null",
    "permute_column",
    "select_k",
    "separation_from_stats",
    "separation_statistic",
    "split",
    "standardize",
    "write_csv",
]
