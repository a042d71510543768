"""Greedy forward feature selection with a permutation-test stop rule.

At each step the candidate that maximizes MI(selected + candidate; Y)
is tested against the null hypothesis that it is independent of the
target and the already-selected set: the candidate column alone is
permuted P times and the observed MI must exceed the (1 - alpha)
nearest-rank percentile of those null estimates. The first failure
stops the search (it is still recorded in the trace, along with its
null sample, to support threshold-versus-iteration plots).

The percentile comparison is the primary acceptance rule; the p-value
carried in each iteration tells the same story up to rank granularity
(for P = 50 and alpha = 0.05, accepting means at most 2 null samples
reached the observed value, i.e. p <= 0.04).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

import numpy as np

from ._util import parallel_map
from .estimator import _mi_profile
from .resampling import PValueResult, p_value, percentile, permutation_null

STOP_THRESHOLD = "threshold_failed"
STOP_MAX_FEATURES = "max_features_reached"
STOP_EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class ForwardIteration:
    """One round of scoring, choice, and significance testing."""

    index: int  # 1-based iteration number
    candidate_scores: Mapping[int, float]
    chosen: int
    chosen_mi: float
    threshold: float
    p_value: PValueResult
    accepted: bool
    null_samples: Tuple[float, ...]

    def __post_init__(self):
        scores = dict(self.candidate_scores)
        best = max(scores.values())
        winner = min(j for j, v in scores.items() if v == best)
        if self.chosen != winner or self.chosen_mi != best:
            raise ValueError("chosen must be the smallest-index maximizer of candidate_scores")
        if self.accepted != (self.chosen_mi > self.threshold):
            raise ValueError("accepted must equal (chosen_mi > threshold)")


@dataclass(frozen=True)
class ForwardTrace:
    iterations: Tuple[ForwardIteration, ...]
    selected: Tuple[int, ...]
    stop_reason: str
    mi_evaluations: int


def forward_select(
    data,
    k: int,
    alpha: float,
    P: int,
    rng: np.random.Generator,
    *,
    max_features: Optional[int] = None,
    threads: int = 1,
    standardize: bool = True,
) -> ForwardTrace:
    """Run the greedy search until rejection, the cap, or exhaustion.

    max_features=None leaves the search uncapped (it can then only end
    by rejection or by running out of candidates). Candidate scoring is
    RNG-free; each iteration's permutation test consumes one substream
    spawned from ``rng`` in iteration order, so traces are reproducible
    for any thread count.

    mi_evaluations counts every estimator call: iteration t scores
    d - t + 1 candidates and adds P null estimates.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if P < 10:
        raise ValueError("P must be >= 10")
    n, d = data.features.shape
    if not 1 <= k <= n - 1:
        raise ValueError("k must be in [1, n-1]")
    if max_features is not None and not 1 <= max_features <= d:
        raise ValueError("max_features must be in [1, d]")
    feats = np.asarray(data.features, dtype=np.float64)
    targ = np.asarray(data.target, dtype=np.float64)

    selected: list[int] = []
    remaining = list(range(d))
    iterations: list[ForwardIteration] = []
    evaluations = 0
    stop = STOP_EXHAUSTED
    t = 0
    while remaining:
        t += 1

        def score(j):
            cols = selected + [j]
            return float(_mi_profile(feats[:, cols], targ, (k,), standardize)[0])

        scores = parallel_map(score, remaining, threads)
        evaluations += len(remaining)
        best = max(scores)
        chosen = min(j for j, v in zip(remaining, scores) if v == best)

        iter_rng = rng.spawn(1)[0]
        null = permutation_null(
            data, tuple(selected), chosen, k, P, iter_rng, threads=threads, standardize=standardize
        )
        evaluations += P
        threshold = percentile(null, 1.0 - alpha)
        pv = p_value(best, null)
        accepted = best > threshold
        iterations.append(
            ForwardIteration(
                index=t,
                candidate_scores=dict(zip(remaining, scores)),
                chosen=chosen,
                chosen_mi=best,
                threshold=threshold,
                p_value=pv,
                accepted=accepted,
                null_samples=null.samples,
            )
        )
        if not accepted:
            stop = STOP_THRESHOLD
            break
        selected.append(chosen)
        remaining.remove(chosen)
        if max_features is not None and len(selected) >= max_features:
            stop = STOP_MAX_FEATURES
            break
    return ForwardTrace(tuple(iterations), tuple(selected), stop, evaluations)


def max_mi_subset(trace: ForwardTrace) -> Tuple[int, ...]:
    """Baseline strategy: cut the greedy path at its MI peak.

    Ignores acceptance flags; returns the prefix of chosen features up
    to the first iteration attaining the maximal chosen_mi (ties go to
    the shortest prefix).
    """
    if not trace.iterations:
        raise ValueError("trace has no iterations")
    values = [it.chosen_mi for it in trace.iterations]
    best = values.index(max(values))
    return tuple(it.chosen for it in trace.iterations[: best + 1])
