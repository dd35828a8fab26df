"""Paired comparison statistics for baseline-vs-visualisation sessions.

Self-contained: the Student-t tail probability is computed here through the
regularized incomplete beta function (continued fraction, modified Lentz)
rather than pulled from a stats dependency, so the reported p-values are
reproducible from this file alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


class LengthMismatch(ValueError):
    """Paired inputs have different lengths."""


@dataclass(frozen=True)
class PairedTestResult:
    """Outcome of one paired two-tailed Student t comparison.

    ``t_statistic`` and ``p_value`` are None when every paired difference is
    identical (zero variance leaves t undefined); ``mean_diff`` is still
    reported in that case.
    """

    n: int
    df: int
    mean_diff: float
    t_statistic: float | None
    p_value: float | None

    def __post_init__(self) -> None:
        if self.df != self.n - 1:
            raise ValueError("df must equal n - 1")
        if self.p_value is not None and not 0.0 < self.p_value <= 1.0:
            raise ValueError(f"p_value must lie in (0, 1], got {self.p_value}")

    @property
    def zero_variance(self) -> bool:
        return self.t_statistic is None


def paired_t(baseline: Sequence[float], visualisation: Sequence[float]) -> PairedTestResult:
    """Paired two-tailed Student's t-test on per-participant differences.

    Differences are visualisation - baseline. t = mean(d) / (sd(d) / sqrt(n))
    with the sample standard deviation (n-1 denominator) and df = n - 1.
    """
    if len(baseline) != len(visualisation):
        raise LengthMismatch(
            f"paired lists differ in length: {len(baseline)} vs {len(visualisation)}"
        )
    n = len(baseline)
    if n < 2:
        raise ValueError(f"need at least two pairs, got {n}")
    diffs = [float(v) - float(b) for b, v in zip(baseline, visualisation)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    if ss == 0.0:
        return PairedTestResult(n=n, df=n - 1, mean_diff=mean, t_statistic=None, p_value=None)
    sd = math.sqrt(ss / (n - 1))
    t = mean / (sd / math.sqrt(n))
    return PairedTestResult(
        n=n, df=n - 1, mean_diff=mean, t_statistic=t, p_value=student_t_sf(t, n - 1)
    )


def student_t_sf(t: float, df: int) -> float:
    """Two-tailed tail probability P(|T| >= |t|) for Student's t.

    Exact via the identity P(|T| >= |t|) = I_x(df/2, 1/2) with
    x = df / (df + t^2), where I is the regularized incomplete beta function.
    """
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return _reg_inc_beta(0.5 * df, 0.5, x)


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges fast only for x below the split point;
    # above it, evaluate the mirrored tail.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


_MAX_ITER = 300
_EPS = 1e-15
_FPMIN = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Continued-fraction core of the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction failed to converge")
