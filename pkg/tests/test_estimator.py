"""Estimator behavior: neighbor kernels, oracle agreement, exact invariances."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import mifsel as m


def gaussian_pair(rho, n, seed):
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rng.standard_normal(n)
    x = z1
    y = rho * z1 + math.sqrt(1.0 - rho * rho) * z2
    return m.Dataset(x[:, None], y, ("X1",))


# ---------------------------------------------------------------- kernels


def test_kth_neighbor_distance_1d():
    pts = [0.0, 1.0, 3.0]
    assert m.kth_neighbor_distance(pts, 0, 1) == 1.0
    assert m.kth_neighbor_distance(pts, 0, 2) == 3.0


def test_kth_neighbor_distance_maxnorm():
    pts = [(0.0, 0.0), (1.0, 5.0), (2.0, 1.0)]
    assert m.kth_neighbor_distance(pts, 0, 1) == 2.0


def test_kth_neighbor_rejects_bad_k():
    pts = [0.0, 1.0, 3.0]
    with pytest.raises(ValueError):
        m.kth_neighbor_distance(pts, 0, 0)
    with pytest.raises(ValueError):
        m.kth_neighbor_distance(pts, 0, 3)


def test_count_within_strict():
    pts = [0.0, 0.4, 0.9, 2.0]
    assert m.count_within(pts, 0, 1.0, strict=True) == 2


def test_count_within_no_neighbors():
    pts = [0.0, 5.0, 10.0]
    assert m.count_within(pts, 0, 0.5, strict=True) == 0


def test_count_within_duplicates_inside():
    pts = [1.0, 1.0, 1.0, 9.0]
    assert m.count_within(pts, 0, 1e-6, strict=True) == 2


def test_count_within_inclusive_mode():
    pts = [0.0, 1.0, 2.0]
    assert m.count_within(pts, 0, 1.0, strict=False) == 1
    assert m.count_within(pts, 0, 1.0, strict=True) == 0


def test_count_within_rejects_bad_radius():
    with pytest.raises(ValueError):
        m.count_within([0.0, 1.0], 0, 0.0)


# ---------------------------------------------------------------- queries


def test_query_validation():
    with pytest.raises(ValueError):
        m.MIQuery((), 3)
    with pytest.raises(ValueError):
        m.MIQuery((0, 0), 3)
    with pytest.raises(ValueError):
        m.MIQuery((0,), 0)


def test_estimate_rejects_k_too_large():
    data = gaussian_pair(0.5, 30, 1)
    with pytest.raises(ValueError):
        m.estimate_mi(data, None, m.MIQuery((0,), 30))
    # k = n - 1 is the largest legal value
    m.estimate_mi(data, None, m.MIQuery((0,), 29))


def test_estimate_rejects_bad_rows():
    data = gaussian_pair(0.5, 30, 1)
    q = m.MIQuery((0,), 3)
    with pytest.raises(ValueError):
        m.estimate_mi(data, [1, 1, 2, 3], q)
    with pytest.raises(ValueError):
        m.estimate_mi(data, [0, 99], q)
    with pytest.raises(ValueError):
        m.estimate_mi(data, [0, 1, 2], m.MIQuery((5,), 1))


def test_estimate_rejects_nonfinite_inputs():
    # Dataset construction forbids NaN, so feed a bare namespace
    feats = np.ones((20, 1))
    feats[3, 0] = np.nan
    fake = SimpleNamespace(features=feats, target=np.arange(20.0))
    with pytest.raises(ValueError):
        m.estimate_mi(fake, None, m.MIQuery((0,), 3))


# ---------------------------------------------------------------- oracle


def test_gaussian_oracle_single_run():
    data = gaussian_pair(0.9, 2000, 42)
    v = m.estimate_mi(data, None, m.MIQuery((0,), 6)).value
    oracle = -0.5 * math.log(1.0 - 0.81)
    assert abs(v - oracle) <= 0.1


def test_independent_uniforms_near_zero():
    rng = np.random.default_rng(31)
    data = m.Dataset(rng.random((2000, 1)), rng.random(2000), ("U",))
    v = m.estimate_mi(data, None, m.MIQuery((0,), 6)).value
    assert abs(v) <= 0.05


def test_null_mean_over_replicates_near_zero():
    vals = []
    for rep in range(50):
        rng = np.random.default_rng(7000 + rep)
        data = m.Dataset(rng.standard_normal((300, 1)), rng.standard_normal(300), ("Z",))
        vals.append(m.estimate_mi(data, None, m.MIQuery((0,), 6)).value)
    assert abs(math.fsum(vals) / len(vals)) <= 0.02


def test_negative_estimates_not_clamped():
    vals = []
    for rep in range(30):
        rng = np.random.default_rng(600 + rep)
        data = m.Dataset(rng.standard_normal((200, 1)), rng.standard_normal(200), ("Z",))
        vals.append(m.estimate_mi(data, None, m.MIQuery((0,), 4)).value)
    assert min(vals) < 0.0


def test_rows_subset_changes_sample():
    data = gaussian_pair(0.9, 400, 3)
    q = m.MIQuery((0,), 5)
    full = m.estimate_mi(data, None, q)
    half = m.estimate_mi(data, np.arange(200), q)
    assert full.n_used == 400
    assert half.n_used == 200
    assert full.value != half.value


# ------------------------------------------------------------- degenerate


def test_duplicate_rows_zero_radius_path():
    # every point occurs 8 times; k=3 forces a zero k-th joint radius
    base = np.arange(6.0)
    x = np.repeat(base, 8)
    y = np.repeat(base * 2.0, 8)
    data = m.Dataset(x[:, None], y, ("X",))
    v = m.estimate_mi(data, None, m.MIQuery((0,), 3)).value
    assert math.isfinite(v)
    assert v > 0.5  # x determines y exactly


def test_constant_feature_near_zero_mi():
    rng = np.random.default_rng(5)
    x = np.ones((100, 1))
    data = m.Dataset(x, rng.standard_normal(100), ("C",))
    v = m.estimate_mi(data, None, m.MIQuery((0,), 4)).value
    assert abs(v) < 0.1


def test_constant_target_near_zero_mi():
    rng = np.random.default_rng(6)
    data = m.Dataset(rng.standard_normal((100, 2)), np.full(100, 3.0), ("A", "B"))
    v = m.estimate_mi(data, None, m.MIQuery((0, 1), 4)).value
    assert abs(v) < 0.1


# ------------------------------------------------------------ invariances


def test_translation_and_joint_scale_examples():
    rng = np.random.default_rng(41)
    xs = rng.standard_normal((150, 2))
    ys = rng.standard_normal(150)
    q = m.MIQuery((0, 1), 5)
    base = m.estimate_mi(m.Dataset(xs, ys, ("A", "B")), None, q).value
    shifted = m.Dataset(np.column_stack([xs[:, 0] + 3.7, xs[:, 1]]), ys + 0.9, ("A", "B"))
    scaled = m.Dataset(xs * 0.25, ys * 0.25, ("A", "B"))
    assert m.estimate_mi(shifted, None, q).value == base
    assert m.estimate_mi(scaled, None, q).value == base


def test_scale_invariance_without_standardization():
    # power-of-two scale keeps raw distances exact as well
    rng = np.random.default_rng(44)
    xs = rng.standard_normal((120, 2))
    ys = rng.standard_normal(120)
    q = m.MIQuery((0, 1), 4)
    base = m.estimate_mi(m.Dataset(xs, ys, ("A", "B")), None, q, standardize=False).value
    scaled = m.Dataset(xs * 0.5, ys * 0.5, ("A", "B"))
    assert m.estimate_mi(scaled, None, q, standardize=False).value == base


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    shift=st.floats(-50.0, 50.0, allow_nan=False),
    scale=st.floats(0.01, 100.0, allow_nan=False),
)
def test_translation_and_scale_property(seed, shift, scale):
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((80, 2))
    ys = rng.standard_normal(80)
    q = m.MIQuery((0, 1), 4)
    base = m.estimate_mi(m.Dataset(xs, ys, ("A", "B")), None, q).value
    moved = m.Dataset(
        np.column_stack([(xs[:, 0] + shift) * scale, xs[:, 1] * scale]),
        ys * scale,
        ("A", "B"),
    )
    assert m.estimate_mi(moved, None, q).value == base


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), perm_seed=st.integers(0, 10_000))
def test_row_permutation_exact(seed, perm_seed):
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((90, 3))
    ys = rng.standard_normal(90)
    q = m.MIQuery((0, 1, 2), 4)
    base = m.estimate_mi(m.Dataset(xs, ys, ("A", "B", "C")), None, q).value
    perm = np.random.default_rng(perm_seed).permutation(90)
    shuffled = m.estimate_mi(m.Dataset(xs[perm], ys[perm], ("A", "B", "C")), None, q).value
    assert shuffled == base


def test_pure_function_repeatability():
    data = gaussian_pair(0.5, 500, 9)
    q = m.MIQuery((0,), 6)
    a = m.estimate_mi(data, None, q)
    b = m.estimate_mi(data, None, q)
    assert a == b
