"""Analytic power of the two-sided, equal-n, two-sample t test.

With n observations per group and a true mean difference of d standard
deviations, the t statistic is noncentral t with 2n-2 degrees of freedom and
noncentrality d*sqrt(n/2); power is the probability it falls outside the
two-sided critical values.
"""

from __future__ import annotations

import math

import numpy as np

from .distributions import noncentral_t_cdf, student_t_cdf
from .errors import DomainError


def _check_n(n_per_group) -> int:
    if not isinstance(n_per_group, (int, np.integer)) or isinstance(n_per_group, bool):
        raise DomainError("n_per_group must be an integer")
    if n_per_group < 2:
        raise DomainError("n_per_group must be at least 2")
    return int(n_per_group)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not math.isfinite(alpha) or not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie strictly inside (0, 1)")
    return alpha


def student_t_quantile(p: float, df: float) -> float:
    """Quantile of Student's t by bisection on `student_t_cdf`."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie strictly inside (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -student_t_quantile(1.0 - p, df)
    hi = 1.0
    while student_t_cdf(hi, df) < p:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("quantile out of floating range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if student_t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def power_two_sample(n_per_group: int, effect_size_d: float, alpha: float = 0.05) -> float:
    """Power of the two-sided pooled t test at the given per-group n.

    `effect_size_d` is the true mean difference in units of the common
    standard deviation; its sign does not matter.
    """
    n = _check_n(n_per_group)
    alpha = _check_alpha(alpha)
    d = float(effect_size_d)
    if not math.isfinite(d):
        raise DomainError("effect_size_d must be finite")
    df = 2 * n - 2
    ncp = d * math.sqrt(n / 2.0)
    t_crit = student_t_quantile(1.0 - 0.5 * alpha, df)
    return (1.0 - noncentral_t_cdf(t_crit, df, ncp)) + noncentral_t_cdf(-t_crit, df, ncp)


def solve_n(target_power: float, effect_size_d: float, alpha: float = 0.05) -> int:
    """Smallest per-group n with `power_two_sample` at or above the target.

    Doubles an upper bracket, then bisects over integers.  A zero effect or a
    target of 1 or more can never be reached and raises `DomainError`.
    """
    target = float(target_power)
    if not math.isfinite(target) or not 0.0 < target < 1.0:
        raise DomainError("target power must lie strictly inside (0, 1)")
    d = float(effect_size_d)
    if d == 0.0 or not math.isfinite(d):
        raise DomainError("effect size must be nonzero to reach any power")
    alpha = _check_alpha(alpha)

    lo = 2
    if power_two_sample(lo, d, alpha) >= target:
        return lo
    hi = 4
    while power_two_sample(hi, d, alpha) < target:
        lo = hi
        hi *= 2
        if hi > 2 ** 32:
            raise DomainError("required sample size is out of range")
    # invariant: power(lo) < target <= power(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if power_two_sample(mid, d, alpha) < target:
            lo = mid
        else:
            hi = mid
    return hi
