"""Shared fixtures and the acceptance-criteria summary hook.

The two harness fixtures below are the expensive part of the suite:
each runs the full tune-then-select pipeline over many seeded datasets.
They are session-scoped and computed once; the acceptance tests and the
tuner invariant tests read from the same results.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

import mifsel as m

DATA_DIR = Path(__file__).parent / "data"
HOUSING_CSV = DATA_DIR / "housing.csv"

INFORMATIVE = frozenset(range(5))  # X1..X5 drive the synthetic target

_criteria: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    _criteria.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{name}: {status} ({detail})")


@pytest.fixture(scope="session")
def housing():
    return m.load_csv(HOUSING_CSV, "medv")


@pytest.fixture(scope="session")
def friedman_harness():
    """100 seeded pipeline runs on the synthetic problem (n=100 each).

    Per run: tune k over [1, 20] with K=20 folds, then forward-select
    with the tuned k, alpha=0.05, P=50, uncapped.
    """
    runs = []
    for i in range(100):
        data = m.friedman_generate(100, np.random.default_rng(1000 + i))
        sel = m.select_k(data, (1, 20), 20, np.random.default_rng(2000 + i))
        trace = m.forward_select(data, sel.k_star, 0.05, 50, np.random.default_rng(3000 + i))
        runs.append(
            {
                "k_star": sel.k_star,
                "argmax_feature": sel.argmax_feature,
                "selected": set(trace.selected),
                "peak": set(m.max_mi_subset(trace)),
                "stop_reason": trace.stop_reason,
            }
        )
    return runs


@pytest.fixture(scope="session")
def housing_harness(housing):
    """20 seeded runs of the full pipeline on the housing table.

    The file has 506 rows, so the train/test split is 338/168. Tuning
    and selection happen on the training part only; both RMSE numbers
    come from the held-out part.
    """
    runs = []
    all_features = list(range(housing.d))
    for i in range(20):
        train, test = m.split(housing, sizes=(338, 168), rng=np.random.default_rng(500 + i))
        sel = m.select_k(train, (1, 20), 20, np.random.default_rng(600 + i))
        trace = m.forward_select(train, sel.k_star, 0.05, 50, np.random.default_rng(700 + i))
        selected = list(trace.selected)
        rmse_sel = m.knn_rmse(train, test, selected, 5).rmse if selected else float("inf")
        rmse_all = m.knn_rmse(train, test, all_features, 5).rmse
        runs.append(
            {
                "k_star": sel.k_star,
                "selected": set(selected),
                "n_selected": len(selected),
                "rmse_selected": rmse_sel,
                "rmse_all": rmse_all,
            }
        )
    return runs
