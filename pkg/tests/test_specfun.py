"""Tests for the Bose-related special functions.

Reference values were computed with scipy.integrate.quad at tight
tolerances; this package never imports scipy at runtime.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dephaser.specfun import (
    BOSE_FIFTH_MOMENT_INF,
    ZETA5,
    BoseMomentTable,
    bose_fifth_moment,
    bose_fifth_moment_tail,
    bose_occupation,
    get_moment_table,
    sinc_deficit,
)

# quad oracles for the fifth Bose moment (epsabs 1e-18)
PHI_AT_0P2 = 3.991124427532959e-4
PHI_AT_2 = 3.229290166368405
PHI_AT_XD100 = 36.048440406100106  # argument 4.327058755197736

# quad oracles for the integral from y to infinity of the same integrand
REMAINDER = {30.0: 2.708818495675773e-06,
             33.0: 2.1362464251543793e-07,
             36.0: 1.6208727189974067e-08}

RNG_SEED = 20260401


def test_occupation_matches_expm1_form():
    x = np.array([1e-8, 0.1, 1.0, 5.0, 50.0])
    np.testing.assert_allclose(bose_occupation(x), 1.0 / np.expm1(x), rtol=0)


def test_occupation_scalar_returns_float():
    out = bose_occupation(1.0)
    assert isinstance(out, float)
    assert out == pytest.approx(1.0 / math.expm1(1.0), rel=1e-15)


def test_occupation_limits():
    # x n(x) -> 1 as x -> 0, n(x) -> e^-x for large x
    assert 1e-10 * bose_occupation(1e-10) == pytest.approx(1.0, rel=1e-9)
    assert bose_occupation(50.0) == pytest.approx(math.exp(-50.0), rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_occupation_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        bose_occupation(bad)


def test_sinc_deficit_zero_and_analytic_points():
    assert sinc_deficit(0.0) == 0.0
    # 1 - sin(y)/y at y = pi/2 and y = pi
    assert sinc_deficit(math.pi / 2) == pytest.approx(1.0 - 2.0 / math.pi, rel=1e-14)
    assert sinc_deficit(math.pi) == pytest.approx(1.0, rel=1e-14)


def test_sinc_deficit_series_joins_direct_branch():
    # the two evaluation branches must agree where they meet
    below = sinc_deficit(0.01 * (1 - 1e-9))
    above = sinc_deficit(0.01 * (1 + 1e-9))
    assert below == pytest.approx(above, rel=1e-10)


def test_sinc_deficit_small_argument_quadratic():
    y = np.array([1e-6, 1e-5, 1e-4])
    np.testing.assert_allclose(sinc_deficit(y), y * y / 6.0, rtol=1e-7)


@given(st.floats(min_value=1e-300, max_value=1e12, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_sinc_deficit_bounds(y):
    val = sinc_deficit(y)
    assert 0.0 <= val
    if y >= 1.0:
        assert val <= 1.0 + 1.0 / y


@pytest.mark.parametrize("bad", [-1e-12, -3.0, math.inf, math.nan])
def test_sinc_deficit_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        sinc_deficit(bad)


@pytest.mark.parametrize(
    "x, expected",
    [(0.2, PHI_AT_0P2), (2.0, PHI_AT_2), (4.327058755197736, PHI_AT_XD100)],
)
def test_fifth_moment_against_quad(x, expected):
    assert bose_fifth_moment(x) == pytest.approx(expected, rel=1e-10)


def test_fifth_moment_endpoints():
    assert bose_fifth_moment(0.0) == 0.0
    assert bose_fifth_moment(61.0) == BOSE_FIFTH_MOMENT_INF
    assert BOSE_FIFTH_MOMENT_INF == 120.0 * ZETA5
    with pytest.raises(ValueError):
        bose_fifth_moment(-0.5)


def test_fifth_moment_small_x_series():
    # x^4/4 - x^6/72 + x^8/1920 + O(x^10)
    x = 0.2
    series = x**4 / 4 - x**6 / 72 + x**8 / 1920
    assert bose_fifth_moment(x) == pytest.approx(series, rel=1e-6)


@pytest.mark.parametrize("y", sorted(REMAINDER))
def test_tail_matches_quad_remainder(y):
    assert bose_fifth_moment_tail(y) == pytest.approx(REMAINDER[y], rel=1e-8)


def test_tail_complements_moment():
    # moment(y) + tail(y) = moment(inf); cancellation limits the check
    for y in (30.0, 33.0):
        total = bose_fifth_moment(y) + bose_fifth_moment_tail(y)
        assert total == pytest.approx(BOSE_FIFTH_MOMENT_INF, rel=1e-13)


def test_moment_table_matches_direct_evaluation():
    table = get_moment_table()
    rng = np.random.default_rng(RNG_SEED)
    xs = rng.uniform(0.0, 60.0, size=400)
    for x in xs:
        assert abs(table.eval(float(x)) - bose_fifth_moment(float(x))) < 1e-9


def test_moment_table_is_monotone():
    table = get_moment_table()
    assert np.all(np.diff(table.values) >= 0.0)
    # evaluation rounds within an ulp of ~124.4 in the saturated region
    grid = np.linspace(0.0, 60.0, 20001)
    vals = np.array([table.eval(float(x)) for x in grid])
    assert np.all(np.diff(vals) >= -1e-13)


def test_moment_table_clamps_and_rejects():
    table = get_moment_table()
    assert table.eval(0.0) == 0.0
    assert table.eval(10 * 60.0) == table.infinity
    with pytest.raises(ValueError):
        table.eval(-1e-9)


def test_moment_table_cached_instance():
    assert get_moment_table() is get_moment_table()


def test_moment_table_build_small_grid():
    # a coarse rebuild must still agree with the direct integral
    table = BoseMomentTable.build(upper=10.0, step=0.05)
    assert table.eval(3.7) == pytest.approx(bose_fifth_moment(3.7), abs=1e-6)
