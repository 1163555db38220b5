"""Compiled inner loops: double-double phase arithmetic, Riemann-Siegel Z, panel quadrature.

Phases are tracked in turns (units of 2 pi) as unevaluated double-double
sums so that theta(t) - t ln n is reduced modulo one turn with ~1e-16
absolute error even when both terms are of size 1e6.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from numba import njit

from ._rscoef import C0, C1

_SPLITTER = 134217729.0  # 2**27 + 1


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True, inline="always")
def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit(cache=True, inline="always")
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True, inline="always")
def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e += t
    s, e = _quick_two_sum(s, e)
    e += f
    return _quick_two_sum(s, e)


@njit(cache=True, inline="always")
def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    return _quick_two_sum(p, e)


@njit(cache=True, inline="always")
def _dd_mul_d(ah, al, b):
    p, e = _two_prod(ah, b)
    e += al * b
    return _quick_two_sum(p, e)


def _dd_const(x) -> tuple[float, float]:
    hi = float(x)
    return hi, float(x - mpmath.mpf(hi))


def _log_tables() -> tuple[np.ndarray, np.ndarray]:
    # ln(c_j), c_j = 1/2 + j/256
    hi = np.empty(129)
    lo = np.empty(129)
    with mpmath.workdps(50):
        for j in range(129):
            hi[j], lo[j] = _dd_const(mpmath.log(mpmath.mpf(0.5) + mpmath.mpf(j) / 256))
    return hi, lo


_LNC_HI, _LNC_LO = _log_tables()
with mpmath.workdps(50):
    _LN2_HI, _LN2_LO = _dd_const(mpmath.log(2))
    _LN2PI_HI, _LN2PI_LO = _dd_const(mpmath.log(2 * mpmath.pi))
    _INV4PI_HI, _INV4PI_LO = _dd_const(1 / (4 * mpmath.pi))
    _INV2PI = float(1 / (2 * mpmath.pi))
    _TWO_PI_HI, _TWO_PI_LO = _dd_const(2 * mpmath.pi)


@njit(cache=True)
def _ln_dd(t, lnc_hi, lnc_lo):
    """Natural log of a positive double as a double-double."""
    m, e = math.frexp(t)
    j = int(round((m - 0.5) * 256.0))
    c = 0.5 + j / 256.0
    d = m - c
    r = d / c
    ph, pl = _two_prod(r, c)
    rl = ((d - ph) - pl) / c
    # log1p(r) = r - r^2/2 + r^3/3 - ..., |r| < 2^-8
    sh, sl = 0.0, 0.0
    for k in range(16, 0, -1):
        sh, sl = _dd_mul(sh, sl, r, rl)
        coef = 1.0 / k if k % 2 == 1 else -1.0 / k
        sh, sl = _dd_add(sh, sl, coef, 0.0)
    sh, sl = _dd_mul(sh, sl, r, rl)
    eh, el = _dd_mul_d(_LN2_HI, _LN2_LO, float(e))
    sh, sl = _dd_add(sh, sl, lnc_hi[j], lnc_lo[j])
    return _dd_add(sh, sl, eh, el)


@njit(cache=True)
def _theta_turns(t, lnc_hi, lnc_lo):
    """theta(t) / (2 pi) as a double-double (asymptotic series through t^-3)."""
    lh, ll = _ln_dd(t, lnc_hi, lnc_lo)
    lh, ll = _dd_add(lh, ll, -_LN2PI_HI, -_LN2PI_LO)
    lh, ll = _dd_add(lh, ll, -1.0, 0.0)
    fh, fl = _dd_mul_d(_INV4PI_HI, _INV4PI_LO, t)
    th, tl = _dd_mul(fh, fl, lh, ll)
    th, tl = _dd_add(th, tl, -0.0625, 0.0)
    small = (1.0 / (48.0 * t) + 7.0 / (5760.0 * t * t * t)) * _INV2PI
    return _dd_add(th, tl, small, 0.0)


@njit(cache=True, inline="always")
def _horner(coef, x):
    acc = 0.0
    for k in range(coef.shape[0] - 1, -1, -1):
        acc = acc * x + coef[k]
    return acc


_SIN_COEF = (
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
    1.0 / 355687428096000.0,
    -1.0 / 121645100408832000.0,
    1.0 / 51090942171709440000.0,
    -1.0 / 25852016738884976640000.0,
)
_S1, _S2, _S3, _S4, _S5, _S6, _S7, _S8, _S9, _S10, _S11 = _SIN_COEF


@njit(cache=True, inline="always")
def _cos_turns(u):
    """cos(2 pi u): fold to sin on [-pi/2, pi/2], odd Taylor polynomial (error < 1e-15)."""
    u = u - math.floor(u + 0.5)
    x = 6.283185307179586 * (0.25 - abs(u))
    x2 = x * x
    return x * (1.0 + x2 * (_S1 + x2 * (_S2 + x2 * (_S3 + x2 * (_S4 + x2 * (_S5 + x2 * (
        _S6 + x2 * (_S7 + x2 * (_S8 + x2 * (_S9 + x2 * (_S10 + x2 * _S11)))))))))))


@njit(cache=True, fastmath={"reassoc", "nsz"})
def _weighted_cos_sum(turns, inv_sqrt, n_terms):
    acc = 0.0
    for n in range(1, n_terms + 1):
        acc += inv_sqrt[n] * _cos_turns(turns[n])
    return acc


@njit(cache=True)
def _main_sum(t, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, scratch):
    """sum_{n <= sqrt(t/2pi)} n^-1/2 cos(theta(t) - t ln n)."""
    n_terms = int(math.floor(math.sqrt(t * _INV2PI)))
    th, tl = _theta_turns(t, lnc_hi, lnc_lo)
    k = math.floor(th + 0.5)
    th, tl = _quick_two_sum(th - k, tl)
    t_hi, t_lo = _split(t)
    for n in range(1, n_terms + 1):
        # t * ln(n)/(2 pi) as the exact product p + e plus the low-part correction
        p = t * lt_hi[n]
        bh = lt_split_hi[n]
        bl = lt_split_lo[n]
        e = ((t_hi * bh - p) + t_hi * bl + t_lo * bh) + t_lo * bl
        e += t * lt_lo[n]
        p -= math.floor(p + 0.5)
        scratch[n] = (th - p) + (tl - e)
    return _weighted_cos_sum(scratch, inv_sqrt, n_terms)


@njit(cache=True)
def _remainder(t, order, c0, c1):
    """Riemann-Siegel correction with ``order`` terms (0: none, 1: C0, 2: C0 + C1)."""
    if order <= 0:
        return 0.0
    tau = math.sqrt(t * _INV2PI)
    n_terms = math.floor(tau)
    x = (tau - n_terms) - 0.5
    val = _horner(c0, x)
    if order >= 2:
        val += _horner(c1, x) / tau
    sign = 1.0 if int(n_terms) % 2 == 1 else -1.0
    return sign * val / math.sqrt(tau)


@njit(cache=True, inline="always")
def _z_one(t, order, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1, scratch):
    main = _main_sum(t, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, scratch)
    return 2.0 * main + _remainder(t, order, c0, c1)


@njit(cache=True)
def _z_vec(ts, order, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1, out):
    scratch = np.empty(lt_hi.shape[0])
    for i in range(ts.shape[0]):
        out[i] = _z_one(ts[i], order, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1,
                        scratch)


@njit(cache=True)
def _main_vec(ts, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, out):
    scratch = np.empty(lt_hi.shape[0])
    for i in range(ts.shape[0]):
        out[i] = _main_sum(ts[i], lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, scratch)


@njit(cache=True)
def _remainder_vec(ts, order, c0, c1, out):
    for i in range(ts.shape[0]):
        out[i] = _remainder(ts[i], order, c0, c1)


@njit(cache=True)
def _zts_vec(ts, order, shift, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1, out):
    scratch = np.empty(lt_hi.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        z = _z_one(t, order, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1, scratch)
        out[i] = z * z / (math.log(t) + shift)


@njit(cache=True)
def _theta_vec(ts, lnc_hi, lnc_lo, out):
    for i in range(ts.shape[0]):
        th, tl = _theta_turns(ts[i], lnc_hi, lnc_lo)
        h, l = _dd_mul(th, tl, _TWO_PI_HI, _TWO_PI_LO)
        out[i] = h + l


@njit(cache=True)
def _gl_panels(starts, ends, x, w, order, shift, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt,
               c0, c1, out):
    """Gauss-Legendre integral of Z^2/w over each [starts[i], ends[i]]."""
    scratch = np.empty(lt_hi.shape[0])
    k = x.shape[0]
    for i in range(starts.shape[0]):
        a = starts[i]
        b = ends[i]
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        acc = 0.0
        for j in range(k):
            t = mid + half * x[j]
            z = _z_one(t, order, lnc_hi, lnc_lo, lt_hi, lt_lo, lt_split_hi, lt_split_lo, inv_sqrt, c0, c1,
                       scratch)
            acc += w[j] * (z * z / (math.log(t) + shift))
        out[i] = half * acc


class _LogTable:
    """ln(n)/(2 pi) as double-double, pre-split for exact products; grows on demand."""

    def __init__(self) -> None:
        self.size = 0
        self._grow(512)

    def _grow(self, size: int) -> None:
        hi = np.zeros(size + 1)
        lo = np.zeros(size + 1)
        with mpmath.workdps(50):
            inv2pi = 1 / (2 * mpmath.pi)
            for n in range(2, size + 1):
                hi[n], lo[n] = _dd_const(mpmath.log(n) * inv2pi)
        c = _SPLITTER * hi
        split_hi = c - (c - hi)
        self.hi, self.lo = hi, lo
        self.split_hi, self.split_lo = split_hi, hi - split_hi
        n = np.arange(size + 1, dtype=np.float64)
        n[0] = 1.0
        self.inv_sqrt = 1.0 / np.sqrt(n)
        self.size = size

    def ensure(self, t_max: float) -> None:
        need = int(math.floor(math.sqrt(t_max / (2 * math.pi)))) + 2
        if need > self.size:
            self._grow(max(need, 2 * self.size))

    def args(self) -> tuple:
        return (_LNC_HI, _LNC_LO, self.hi, self.lo, self.split_hi, self.split_lo, self.inv_sqrt)


LOG_TABLE = _LogTable()
RS_COEF = (C0, C1)
LNC = (_LNC_HI, _LNC_LO)


@njit(cache=True)
def _checkpoint_sums(start, incs, stride):
    """Compensated running sum of ``incs`` from ``start``, sampled every ``stride`` items and at the end."""
    n = incs.shape[0]
    n_ck = (n + stride - 1) // stride + 1
    out = np.empty(n_ck)
    out[0] = start
    acc = start
    comp = 0.0
    j = 1
    for i in range(n):
        x = incs[i]
        s = acc + x
        if abs(acc) >= abs(x):
            comp += (acc - s) + x
        else:
            comp += (x - s) + acc
        acc = s
        if (i + 1) % stride == 0 or i == n - 1:
            out[j] = acc + comp
            j += 1
    return out


@njit(cache=True)
def _prefix_sums(start, incs):
    """out[0] = start, out[i + 1] = start + incs[0] + ... + incs[i], Neumaier-compensated."""
    n = incs.shape[0]
    out = np.empty(n + 1)
    out[0] = start
    acc = start
    comp = 0.0
    for i in range(n):
        x = incs[i]
        s = acc + x
        if abs(acc) >= abs(x):
            comp += (acc - s) + x
        else:
            comp += (x - s) + acc
        acc = s
        out[i + 1] = acc + comp
    return out
