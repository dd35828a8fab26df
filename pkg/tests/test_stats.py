"""Paired t-test and Student-t tail tests.

student_t_sf is checked against a test-local Simpson integration of the t
density over the central interval [-t, t], which has no truncation error.
"""
import math
import random

import pytest

from swingmeter.stats import LengthMismatch, PairedTestResult, paired_t, student_t_sf

POINTS_BASELINE = [6, 5, 2, 1, 2, 1, 2, 0, 4, 6]
POINTS_VISUALISATION = [11, 4, 4, 1, 6, 1, 3, 1, 6, 3]


# -- independent oracle: numerical integration of the t density ----------------

def t_density(x: float, df: int) -> float:
    norm = math.exp(math.lgamma((df + 1) / 2) - math.lgamma(df / 2)) / math.sqrt(df * math.pi)
    return norm * (1 + x * x / df) ** (-(df + 1) / 2)


def numeric_two_tail(t: float, df: int, steps: int = 20000) -> float:
    """P(|T| >= |t|) = 1 - 2 * integral_0^|t| density, via Simpson's rule."""
    t = abs(t)
    if t == 0:
        return 1.0
    h = t / steps
    total = t_density(0.0, df) + t_density(t, df)
    for i in range(1, steps):
        total += t_density(i * h, df) * (4 if i % 2 else 2)
    central = total * h / 3
    return 1.0 - 2.0 * central


def test_sf_zero_is_one():
    for df in (1, 5, 9, 50):
        assert student_t_sf(0.0, df) == 1.0


def test_sf_matches_reference_points():
    assert student_t_sf(1.4923, 9) == pytest.approx(0.1698, abs=5e-4)
    # classic two-tailed 5% critical value for df=9
    assert student_t_sf(2.262, 9) == pytest.approx(0.050, abs=1e-3)


def test_sf_matches_numeric_integration():
    for df in (1, 2, 3, 9, 30):
        for t in (0.1, 0.5, 1.0, 1.4923, 2.262, 4.0):
            assert student_t_sf(t, df) == pytest.approx(numeric_two_tail(t, df), abs=1e-6)


def test_sf_symmetric_in_t():
    assert student_t_sf(-1.7, 9) == student_t_sf(1.7, 9)


def test_sf_monotone_decreasing():
    values = [student_t_sf(t / 10, 9) for t in range(0, 60)]
    assert values == sorted(values, reverse=True)


def test_sf_approaches_gaussian_for_large_df():
    for t in (0.5, 1.0, 1.96, 3.0):
        gaussian_two_tail = math.erfc(t / math.sqrt(2.0))
        assert student_t_sf(t, 1000) == pytest.approx(gaussian_two_tail, abs=1e-3)


def test_sf_rejects_bad_inputs():
    with pytest.raises(ValueError):
        student_t_sf(1.0, 0)
    with pytest.raises(ValueError):
        student_t_sf(float("nan"), 5)


# -- paired t ------------------------------------------------------------------

def test_points_won_comparison():
    result = paired_t(POINTS_BASELINE, POINTS_VISUALISATION)
    assert result.n == 10
    assert result.df == 9
    assert result.mean_diff == pytest.approx(1.1, abs=1e-12)
    assert result.t_statistic == pytest.approx(1.4923, abs=1e-3)
    assert result.p_value == pytest.approx(0.1698, abs=1e-3)


def test_identical_lists_zero_variance():
    result = paired_t([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.mean_diff == 0.0
    assert result.zero_variance
    assert result.t_statistic is None
    assert result.p_value is None


def test_constant_shift_is_zero_variance_with_mean():
    result = paired_t([1.0, 2.0, 3.0], [3.5, 4.5, 5.5])
    assert result.zero_variance
    assert result.mean_diff == pytest.approx(2.5)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        paired_t([1.0, 2.0], [1.0])


def test_too_few_pairs():
    with pytest.raises(ValueError):
        paired_t([1.0], [2.0])


def test_antisymmetry():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(2, 20)
        a = [rng.uniform(-10, 10) for _ in range(n)]
        b = [rng.uniform(-10, 10) for _ in range(n)]
        forward = paired_t(a, b)
        backward = paired_t(b, a)
        assert backward.mean_diff == pytest.approx(-forward.mean_diff, abs=1e-12)
        if forward.zero_variance:
            assert backward.zero_variance
        else:
            assert backward.t_statistic == pytest.approx(-forward.t_statistic, rel=1e-9)
            assert backward.p_value == pytest.approx(forward.p_value, rel=1e-9)


def test_shift_invariance():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(2, 15)
        a = [rng.uniform(-5, 5) for _ in range(n)]
        b = [rng.uniform(-5, 5) for _ in range(n)]
        shift = rng.uniform(-100, 100)
        plain = paired_t(a, b)
        shifted = paired_t([x + shift for x in a], [x + shift for x in b])
        assert shifted.mean_diff == pytest.approx(plain.mean_diff, abs=1e-9)
        if not plain.zero_variance:
            assert shifted.t_statistic == pytest.approx(plain.t_statistic, rel=1e-6)
            assert shifted.p_value == pytest.approx(plain.p_value, rel=1e-6)


def test_result_invariants():
    with pytest.raises(ValueError):
        PairedTestResult(n=10, df=8, mean_diff=0.0, t_statistic=None, p_value=None)
    with pytest.raises(ValueError):
        PairedTestResult(n=10, df=9, mean_diff=0.0, t_statistic=1.0, p_value=1.5)
