"""Exact prime counting by a segmented sieve, and the separation checks (A), (B), (C).

(A)  t - phi1(t)            ~ (1 - c) pi(t)
(B)  2l(K + 1)              < reverse point of 2lK
(C)  distance of J and J̊    ~ (1 - c) pi(t)

with c the Euler-Mascheroni constant.  The asymptotic relations are reported
as ratios; (B) is a plain inequality.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeError
from .ladder import LadderTable, invert_ladder, phi1
from .zeta_core import EULER_GAMMA, MoserCalibrated

BLOCK = 1 << 16
ONE_MINUS_C = 1.0 - EULER_GAMMA


def _base_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve (limit is at most sqrt of the table limit)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mark[p]:
            mark[p * p::p] = False
    return np.flatnonzero(mark).astype(np.int64)


def sieve_block(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Boolean primality of the integers in [lo, hi)."""
    mark = np.ones(hi - lo, dtype=bool)
    for p in base.tolist():
        if p * p >= hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        mark[start - lo::p] = False
    # 0 and 1 are not prime
    for n in (0, 1):
        if lo <= n < hi:
            mark[n - lo] = False
    return mark


@dataclass(frozen=True, eq=False)
class SieveTable:
    limit: int
    counts: np.ndarray  # counts[j] = number of primes < j * BLOCK
    base: np.ndarray
    _blocks: dict = field(default_factory=dict, repr=False)

    def block(self, j: int) -> np.ndarray:
        mask = self._blocks.get(j)
        if mask is None:
            lo = j * BLOCK
            mask = sieve_block(lo, min(lo + BLOCK, self.limit + 1), self.base)
            self._blocks[j] = mask
        return mask


def build_sieve(limit: int = 2_000_000) -> SieveTable:
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    base = _base_primes(math.isqrt(limit) + 1)
    n_blocks = limit // BLOCK + 1
    counts = np.zeros(n_blocks + 1, dtype=np.int64)
    table = SieveTable(limit, counts, base)
    running = 0
    for j in range(n_blocks):
        running += int(np.count_nonzero(table.block(j)))
        counts[j + 1] = running
    # keep only the last block cached; the rest is cheap to resieve
    last = table._blocks[n_blocks - 1]
    table._blocks.clear()
    table._blocks[n_blocks - 1] = last
    counts.setflags(write=False)
    return table


def pi_count(table: SieveTable, t: float) -> int:
    """Number of primes <= floor(t)."""
    if t > table.limit:
        raise RangeError(f"t = {t} exceeds the sieve limit {table.limit}")
    if t < 2:
        return 0
    n = int(math.floor(t))
    j = n // BLOCK
    return int(table.counts[j]) + int(np.count_nonzero(table.block(j)[: n - j * BLOCK + 1]))


def moser_anchor_phi(anchor_t: float, sieve: SieveTable) -> float:
    """anchor_t - (1 - c) pi(anchor_t): the default ('auto') anchor value."""
    return anchor_t - ONE_MINUS_C * pi_count(sieve, anchor_t)


def check_A(table: LadderTable, sieve: SieveTable, t: float) -> float:
    """(t - phi1(t)) / ((1 - c) pi(t))."""
    if not isinstance(table.mode, MoserCalibrated):
        warnings.warn(f"(A) is calibrated for the moser weight; ladder uses {table.mode.label}", stacklevel=2)
    return (t - phi1(table, t)) / (ONE_MINUS_C * pi_count(sieve, t))


def check_B(table: LadderTable, two_l: float, K: int) -> bool:
    """Reverse point of 2lK lies beyond 2l(K+1), i.e. J and its preimage are disjoint."""
    return invert_ladder(table, two_l * K) > two_l * (K + 1)


def check_C(table: LadderTable, sieve: SieveTable, two_l: float, K: int) -> tuple[float, float]:
    """Distance between [2lK, 2l(K+1)] and its preimage, and its ratio to (1 - c) pi(2lK)."""
    rho = invert_ladder(table, two_l * K) - two_l * (K + 1)
    return rho, rho / (ONE_MINUS_C * pi_count(sieve, two_l * K))
