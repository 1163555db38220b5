"""Taylor coefficients of the Riemann-Siegel correction functions.

The correction terms are built from

    Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)

which is entire (the poles of the denominator are cancelled by zeros of the
numerator).  We expand around p = 1/2 in x = p - 1/2 by exact power-series
division at high precision, then differentiate termwise:

    C0 = Psi
    C1 = -Psi''' / (96 pi^2)

Coefficients are computed once at import and truncated where the tail on
|x| <= 1/2 drops below double resolution.
"""

from __future__ import annotations

import mpmath
import numpy as np

_DEGREE = 90
_DPS = 120


def _psi_series(degree: int) -> list:
    with mpmath.workdps(_DPS):
        two_pi = 2 * mpmath.pi
        # numerator cos(2 pi x^2 - 5 pi / 8), series in x
        ca = mpmath.cos(5 * mpmath.pi / 8)
        sa = mpmath.sin(5 * mpmath.pi / 8)
        num = [mpmath.mpf(0)] * (degree + 1)
        k = 0
        while 2 * k <= degree:
            # (2 pi x^2)^k / k! contributes to x^(2k)
            term = two_pi**k / mpmath.factorial(k)
            if k % 4 == 0:
                num[2 * k] += ca * term
            elif k % 4 == 1:
                num[2 * k] += sa * term
            elif k % 4 == 2:
                num[2 * k] -= ca * term
            else:
                num[2 * k] -= sa * term
            k += 1
        # denominator -cos(2 pi x)
        den = [mpmath.mpf(0)] * (degree + 1)
        for j in range(0, degree + 1, 2):
            den[j] = -((-1) ** (j // 2)) * two_pi**j / mpmath.factorial(j)
        q = [mpmath.mpf(0)] * (degree + 1)
        for i in range(degree + 1):
            acc = num[i]
            for j in range(1, i + 1):
                acc -= q[i - j] * den[j]
            q[i] = acc / den[0]
        return q


def _derivative(coef: list, order: int) -> list:
    out = []
    for k in range(order, len(coef)):
        f = mpmath.mpf(1)
        for j in range(order):
            f *= k - j
        out.append(coef[k] * f)
    return out


def _truncate(coef: list) -> np.ndarray:
    vals = [float(c) for c in coef]
    last = len(vals)
    while last > 1 and abs(vals[last - 1]) * 0.5 ** (last - 1) < 1e-22:
        last -= 1
    return np.array(vals[:last], dtype=np.float64)


def correction_coefficients(degree: int = _DEGREE) -> tuple[np.ndarray, np.ndarray]:
    """Return ascending power-series coefficients in x = p - 1/2 for C0 and C1."""
    psi = _psi_series(degree)
    with mpmath.workdps(_DPS):
        pi2 = mpmath.pi**2
        c0 = psi
        c1 = [-c / (96 * pi2) for c in _derivative(psi, 3)]
    return _truncate(c0), _truncate(c1)


C0, C1 = correction_coefficients()
