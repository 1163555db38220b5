"""The reference computations themselves are checked before anything leans on them."""

import math

import mpmath
import numpy as np
import pytest

from oracles import (
    abs_zeta_half_line,
    eratosthenes_count,
    hardy_z,
    theta_stirling,
    trapezoid_antiderivative,
    trial_division_count,
    zeta_half_line,
)


@pytest.mark.parametrize("t", [14.0, 21.0, 100.0, 250.0, 1000.0, 1e5, 4e5])
def test_euler_maclaurin_matches_mpmath(t):
    with mpmath.workdps(40):
        ref = mpmath.zeta(mpmath.mpc(0.5, t))
        got = zeta_half_line(t)
        # 30 digits at small t; the phase t ln n carries t * 1e-32 absolute at large t
        assert abs(got - ref) / abs(ref) < 1e-25


@pytest.mark.parametrize("t", [1.0, 14.0, 100.0, 1e4, 1e6])
def test_stirling_theta_matches_mpmath(t):
    with mpmath.workdps(40):
        assert abs(theta_stirling(t) - mpmath.siegeltheta(t)) < 1e-30 * max(1.0, t)


def test_first_zero_is_bracketed():
    assert math.copysign(1, hardy_z(14.0)) * math.copysign(1, hardy_z(14.3)) == -1


def test_abs_zeta_is_abs_z():
    for t in (50.0, 300.0):
        assert abs(abs(hardy_z(t)) - abs_zeta_half_line(t)) < 1e-14


def test_trapezoid_on_known_integral():
    ts = np.array([1.0, 2.5, 3.0])
    got = trapezoid_antiderivative(np.cos, 0.0, ts, step=1e-3)
    assert np.allclose(got, np.sin(ts), atol=1e-7)


def test_prime_oracles_agree():
    c = eratosthenes_count(20000)
    assert c[10] == 4 and c[2] == 1 and c[100] == 25
    assert trial_division_count(1, 20000) == c[20000]
    assert trial_division_count(10001, 20000) == c[20000] - c[10000]
