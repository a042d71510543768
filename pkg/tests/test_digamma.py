"""Digamma accuracy against known constants, identities, and scipy."""

import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, strategies as st

from mifsel import digamma

EULER_GAMMA = 0.5772156649015329


def test_known_value_at_one():
    assert abs(digamma(1.0) - (-EULER_GAMMA)) < 1e-12


def test_known_value_at_two():
    # recurrence from psi(1): psi(2) = psi(1) + 1
    assert abs(digamma(2.0) - (1.0 - EULER_GAMMA)) < 1e-12


def test_known_value_at_half():
    # duplication identity: psi(1/2) = -gamma - 2 ln 2
    assert abs(digamma(0.5) - (-EULER_GAMMA - 2.0 * math.log(2.0))) < 1e-12


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 10.0, 100.0])
def test_recurrence(x):
    assert abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-10


def test_scipy_agreement_on_grid():
    xs = np.concatenate(
        [
            np.linspace(0.5, 20.0, 2001),
            np.linspace(20.0, 1000.0, 500),
            np.logspace(3, 6, 400),
        ]
    )
    err = np.abs(digamma(xs) - scipy.special.digamma(xs))
    assert err.max() <= 1e-12


@given(st.floats(min_value=0.5, max_value=1e6, allow_nan=False))
def test_scipy_agreement_property(x):
    assert abs(digamma(x) - float(scipy.special.digamma(x))) <= 1e-12


def test_vector_input_matches_scalar():
    xs = np.array([0.5, 1.0, 3.25, 42.0])
    out = digamma(xs)
    assert out.shape == xs.shape
    for x, v in zip(xs, out):
        assert v == digamma(float(x))


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, float("nan"), float("inf")])
def test_rejects_nonpositive_and_nonfinite(bad):
    with pytest.raises(ValueError):
        digamma(bad)
