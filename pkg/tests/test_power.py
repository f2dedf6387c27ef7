"""Analytic power: cross-checked against scipy's noncentral t, the solver's
bracketing properties, and full-size Monte Carlo batches.
"""

import math

import numpy as np
import pytest
import scipy.stats

from fdrlab.errors import DomainError
from fdrlab.power import power_two_sample, solve_n, student_t_quantile


def _scipy_power(n, d, alpha):
    df = 2 * n - 2
    ncp = d * math.sqrt(n / 2.0)
    crit = scipy.stats.t.ppf(1.0 - alpha / 2.0, df)
    return scipy.stats.nct.sf(crit, df, ncp) + scipy.stats.nct.cdf(-crit, df, ncp)


def test_against_scipy_oracle():
    for n in (2, 3, 5, 8, 16, 40, 100):
        for d in (0.2, 0.5, 1.0, 2.0, -1.0):
            for alpha in (0.01, 0.05, 0.2):
                ref = _scipy_power(n, d, alpha)
                if math.isnan(ref):
                    continue  # scipy's nct gives up at large df * ncp
                assert power_two_sample(n, d, alpha) == pytest.approx(ref, abs=1e-9)


def test_result_strictly_inside_unit_interval():
    for n in (2, 16, 200):
        value = power_two_sample(n, 1.0, 0.05)
        assert 0.0 < value < 1.0


def test_monotone_in_n_d_alpha():
    powers = [power_two_sample(n, 0.8, 0.05) for n in range(2, 40)]
    assert all(b > a for a, b in zip(powers, powers[1:]))
    powers = [power_two_sample(10, d, 0.05) for d in np.linspace(0.05, 3.0, 30)]
    assert all(b > a for a, b in zip(powers, powers[1:]))
    powers = [power_two_sample(10, 1.0, a) for a in np.linspace(0.005, 0.5, 30)]
    assert all(b > a for a, b in zip(powers, powers[1:]))


def test_sign_of_effect_is_irrelevant():
    assert power_two_sample(12, -1.3, 0.05) == pytest.approx(
        power_two_sample(12, 1.3, 0.05), abs=1e-12)


def test_t_quantile_roundtrip():
    from fdrlab.distributions import student_t_cdf
    for df in (1.0, 4.0, 30.0, 98.0):
        for p in (0.6, 0.975, 0.9995, 0.25):
            q = student_t_quantile(p, df)
            assert student_t_cdf(q, df) == pytest.approx(p, abs=1e-12)


class TestSolveN:
    def test_worked_values(self):
        assert solve_n(0.78, 1.0, 0.05) == 16
        assert solve_n(0.80, 1.0, 0.05) == 17
        assert solve_n(0.22, 1.0, 0.05) == 4

    def test_monotone_in_target(self):
        assert solve_n(0.9, 1.0, 0.05) > solve_n(0.5, 1.0, 0.05)

    def test_is_the_smallest_such_n(self):
        for target, d in [(0.8, 0.5), (0.33, 1.0), (0.95, 0.25)]:
            n = solve_n(target, d, 0.05)
            assert power_two_sample(n, d, 0.05) >= target
            if n > 2:
                assert power_two_sample(n - 1, d, 0.05) < target

    def test_never_overshoots(self):
        for n in (3, 5, 8, 16, 33):
            achieved = power_two_sample(n, 1.0, 0.05)
            assert solve_n(achieved, 1.0, 0.05) <= n

    def test_domain(self):
        with pytest.raises(DomainError):
            solve_n(1.0, 1.0, 0.05)
        with pytest.raises(DomainError):
            solve_n(0.8, 0.0, 0.05)
        with pytest.raises(DomainError):
            power_two_sample(1, 1.0, 0.05)
        with pytest.raises(DomainError):
            power_two_sample(16, 1.0, 1.0)


def test_simulation_agreement(null16, effect_batches):
    """Simulated significant fractions match analytic power within 3 binomial
    standard errors, for every batch size used in the study."""
    cases = [(16, 0.0, null16.fraction_significant, 0.05)]
    for n, batch in effect_batches.items():
        cases.append((n, 1.0, batch.fraction_significant, None))
    for n, d, fraction, null_rate in cases:
        expected = null_rate if d == 0.0 else power_two_sample(n, d, 0.05)
        se = math.sqrt(expected * (1.0 - expected) / 100_000)
        assert abs(fraction - expected) <= 3.0 * se, (n, d, fraction, expected)
