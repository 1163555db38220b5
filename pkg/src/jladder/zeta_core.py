"""Riemann-Siegel evaluation of theta(t), Z(t), the log weight and Z~^2(t).

All public functions accept a float or an array of floats and return the same
shape.  Evaluation below ``RSConfig.t_min`` raises :class:`DomainError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels as _k
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
LN_2PI = math.log(2.0 * math.pi)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class RSConfig:
    t_min: float = 200.0
    correction_order: int = 2

    def __post_init__(self):
        if not self.t_min > 2.0 * math.pi:
            raise ValueError(f"t_min must exceed 2*pi, got {self.t_min}")
        if self.correction_order not in (0, 1, 2):
            raise ValueError(f"correction_order must be 0, 1 or 2, got {self.correction_order}")


DEFAULT_RS = RSConfig()


@dataclass(frozen=True)
class LeadingLog:
    """w(t) = ln t."""

    @property
    def shift(self) -> float:
        return 0.0

    @property
    def label(self) -> str:
        return "leading"


@dataclass(frozen=True)
class MoserCalibrated:
    """w(t) = ln t + 1 + c - ln 2 pi.

    With this weight the smoothed density of Z~^2 is
    (ln(t/2pi) + 2c) / (ln(t/2pi) + 1 + c) = 1 - (1 - c)/w(t), so that
    t - phi1(t) grows like (1 - c) times the logarithmic integral.
    """

    @property
    def shift(self) -> float:
        return 1.0 + EULER_GAMMA - LN_2PI

    @property
    def label(self) -> str:
        return "moser"


@dataclass(frozen=True)
class CustomShift:
    """w(t) = ln t + s."""

    s: float

    @property
    def shift(self) -> float:
        return float(self.s)

    @property
    def label(self) -> str:
        return f"shift:{self.s!r}"


WeightMode = Union[LeadingLog, MoserCalibrated, CustomShift]


def parse_mode(text: str) -> WeightMode:
    """Inverse of ``mode.label``; also accepts a few obvious aliases."""
    key = text.strip().lower()
    if key in ("leading", "leadinglog", "log"):
        return LeadingLog()
    if key in ("moser", "mosercalibrated", "calibrated"):
        return MoserCalibrated()
    if key.startswith("shift:"):
        return CustomShift(float(key.split(":", 1)[1]))
    raise ValueError(f"unknown weight mode {text!r} (expected leading, moser or shift:<s>)")


def _prepare(t: ArrayLike, config: RSConfig) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=np.float64)
    scalar = arr.ndim == 0
    flat = np.ascontiguousarray(arr.reshape(-1))
    if flat.size:
        lo = flat.min()
        if not lo >= config.t_min:
            raise DomainError(f"t = {lo!r} is below t_min = {config.t_min}")
        if not np.all(np.isfinite(flat)):
            raise DomainError("t must be finite")
        _k.LOG_TABLE.ensure(float(flat.max()))
    return flat, scalar


def _finish(out: np.ndarray, shape: tuple, scalar: bool) -> ArrayLike:
    if scalar:
        return float(out[0])
    return out.reshape(shape)


def theta(t: ArrayLike, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    """Riemann-Siegel theta via (t/2) ln(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3)."""
    flat, scalar = _prepare(t, config)
    out = np.empty_like(flat)
    _k._theta_vec(flat, *_k.LNC, out)
    return _finish(out, np.shape(t), scalar)


def z(t: ArrayLike, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    """Hardy's Z(t): twice the Riemann-Siegel main sum plus the correction terms.

    ``correction_order`` counts correction terms beyond the main sum: 0 leaves an
    O(t^-1/4) error, 1 adds C0 (error O(t^-3/4)), 2 adds C0 and C1 (O(t^-5/4)).
    """
    flat, scalar = _prepare(t, config)
    out = np.empty_like(flat)
    _k._z_vec(flat, config.correction_order, *_k.LOG_TABLE.args(), *_k.RS_COEF, out)
    return _finish(out, np.shape(t), scalar)


def main_sum(t: ArrayLike, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    """sum_{n <= sqrt(t/2pi)} n^(-1/2) cos(theta(t) - t ln n), without the factor 2."""
    flat, scalar = _prepare(t, config)
    out = np.empty_like(flat)
    args = _k.LOG_TABLE.args()
    _k._main_vec(flat, *args, out)
    return _finish(out, np.shape(t), scalar)


def rs_remainder(t: ArrayLike, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    """The Riemann-Siegel correction (-1)^(N-1) (2pi/t)^(1/4) sum_k C_k(p) (2pi/t)^(k/2)."""
    flat, scalar = _prepare(t, config)
    out = np.empty_like(flat)
    _k._remainder_vec(flat, config.correction_order, *_k.RS_COEF, out)
    return _finish(out, np.shape(t), scalar)


def log_weight(t: ArrayLike, mode: WeightMode) -> ArrayLike:
    """ln t + shift with no domain check; ``weight`` is the guarded version."""
    return np.log(t) + mode.shift


def weight(t: ArrayLike, mode: WeightMode, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    flat, scalar = _prepare(t, config)
    out = log_weight(flat, mode)
    if flat.size and not np.all(out > 0):
        raise DomainError(f"weight {mode.label} is not positive on the requested t")
    return _finish(out, np.shape(t), scalar)


def z_tilde_sq(t: ArrayLike, mode: WeightMode, config: RSConfig = DEFAULT_RS) -> ArrayLike:
    """Z(t)^2 / w(t)."""
    flat, scalar = _prepare(t, config)
    if flat.size and not math.log(float(flat.min())) + mode.shift > 0:
        raise DomainError(f"weight {mode.label} is not positive on the requested t")
    out = np.empty_like(flat)
    _k._zts_vec(flat, config.correction_order, mode.shift, *_k.LOG_TABLE.args(), *_k.RS_COEF, out)
    return _finish(out, np.shape(t), scalar)
