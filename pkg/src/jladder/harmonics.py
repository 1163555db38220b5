"""Weighted orthogonality of {1, cos(pi m phi1/l), sin(pi m phi1/l)} and its corollaries.

Every integral here is a transport integral over a reverse segment, computed
on the nodes of :func:`jladder.ladder.transport_nodes`.  Basis layout is fixed:
row 0 is the constant 1, then cos1, sin1, cos2, sin2, ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, RangeError
from .ladder import (
    LadderTable,
    Segment,
    check_length,
    fsum_rows,
    invert_ladder,
    reverse_segment,
    transport_integral,
    transport_nodes,
)
from .zeta_core import WeightMode, main_sum, rs_remainder, z_tilde_sq

# panels are cut in four for Gram work: harmonic 2*n_max composed with phi1 oscillates
# up to ~2*pi*n_max*max(Z~^2)/l per unit t
GRAM_SUBDIVISIONS = 4
SCAN_STEP = 1e-3
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class GramSpec:
    two_l: float
    K: int
    n_max: int
    mode: WeightMode

    def __post_init__(self):
        if not self.two_l > 0:
            raise ValueError(f"two_l must be positive, got {self.two_l}")
        if self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        T = self.two_l * self.K
        if T <= math.e or self.two_l > T / math.log(T):
            raise ValueError(f"two_l = {self.two_l} exceeds T/ln T at T = 2lK = {T}")

    @property
    def l(self) -> float:
        return 0.5 * self.two_l

    @property
    def T(self) -> float:
        return self.two_l * self.K


def basis_labels(n_max: int) -> list[str]:
    labels = ["1"]
    for m in range(1, n_max + 1):
        labels += [f"cos{m}", f"sin{m}"]
    return labels


def kronecker_target(n_max: int, l: float) -> np.ndarray:
    diag = np.full(2 * n_max + 1, l)
    diag[0] = 2.0 * l
    return np.diag(diag)


@dataclass(frozen=True)
class GramReport:
    labels: list[str]
    entries: np.ndarray
    target: np.ndarray
    max_abs_deviation: float
    l: float
    seg: Segment
    seg_reverse: Segment

    def to_csv(self) -> str:
        lines = [",".join(self.labels)]
        for row in self.entries:
            lines.append(",".join(f"{v:.17g}" for v in row))
        lines.append(f"# max_abs_deviation={self.max_abs_deviation:.17g}")
        return "\n".join(lines) + "\n"


def family_deviations(report: GramReport) -> dict[str, float]:
    """Largest |entry - target| within each family of integrals of the weighted system.

    cos*cos and sin*sin (off-diagonal and diagonal together), sin*cos, and the
    single harmonics against the constant 1.
    """
    n = (len(report.labels) - 1) // 2
    dev = np.abs(report.entries - report.target)
    cos_idx = [2 * m - 1 for m in range(1, n + 1)]
    sin_idx = [2 * m for m in range(1, n + 1)]
    return {
        "cos_cos": float(dev[np.ix_(cos_idx, cos_idx)].max()),
        "sin_sin": float(dev[np.ix_(sin_idx, sin_idx)].max()),
        "sin_cos": float(dev[np.ix_(sin_idx, cos_idx)].max()),
        "cos": float(dev[0, cos_idx].max()),
        "sin": float(dev[0, sin_idx].max()),
    }


def _basis_rows(phase: np.ndarray, n_max: int) -> list[np.ndarray]:
    """[1, cos(phase), sin(phase), cos(2 phase), ...], each row computed on its own."""
    rows = [np.ones_like(phase)]
    for m in range(1, n_max + 1):
        rows.append(np.cos(m * phase))
        rows.append(np.sin(m * phase))
    return rows


def _report(rows: list[np.ndarray], weights: np.ndarray, n_max: int, l: float, seg: Segment, rev: Segment) -> GramReport:
    size = len(rows)
    entries = np.empty((size, size))
    for i in range(size):
        wi = rows[i] * weights
        for j in range(i, size):
            entries[i, j] = math.fsum((wi * rows[j]).tolist())
            entries[j, i] = entries[i, j]
    target = kronecker_target(n_max, l)
    return GramReport(
        labels=basis_labels(n_max),
        entries=entries,
        target=target,
        max_abs_deviation=float(np.max(np.abs(entries - target))),
        l=l,
        seg=seg,
        seg_reverse=rev,
    )


def _check_mode(table: LadderTable, mode: WeightMode) -> None:
    if table.mode != mode:
        raise ValueError(f"requested weight {mode.label} but the ladder was built with {table.mode.label}")


def _block(table: LadderTable, spec: GramSpec) -> tuple[Segment, Segment]:
    seg = Segment(spec.T, spec.T + spec.two_l)
    if not (table.phi_min <= seg.a and seg.b <= table.phi_max):
        raise RangeError(f"block [{seg.a}, {seg.b}] outside the ladder image [{table.phi_min}, {table.phi_max}]")
    return seg, reverse_segment(table, seg)


def gram_matrix(table: LadderTable, spec: GramSpec, subdivisions: int = GRAM_SUBDIVISIONS) -> GramReport:
    """Inner products of the basis composed with phi1, weighted by Z~^2, over the preimage of [2lK, 2l(K+1)]."""
    _check_mode(table, spec.mode)
    seg, rev = _block(table, spec)
    nodes = transport_nodes(table, rev, subdivisions)
    # pi m phi/l and pi m (phi - 2lK)/l differ by 2 pi m K; the shifted form keeps the argument small
    phase = (np.pi / spec.l) * (nodes.phi - spec.T)
    rows = _basis_rows(phase, spec.n_max)
    return _report(rows, nodes.weights * nodes.zts, spec.n_max, spec.l, seg, rev)


def parseval_halves(table: LadderTable, spec: GramSpec, m: int,
                    subdivisions: int = GRAM_SUBDIVISIONS) -> tuple[float, float]:
    """(int cos^2(pi m phi1/l) Z~^2, int sin^2(pi m phi1/l) Z~^2) over the block preimage; each should be l."""
    _check_mode(table, spec.mode)
    seg, rev = _block(table, spec)
    nodes = transport_nodes(table, rev, subdivisions)
    phase = (np.pi * m / spec.l) * (nodes.phi - spec.T)
    wz = nodes.weights * nodes.zts
    return math.fsum((np.cos(phase) ** 2 * wz).tolist()), math.fsum((np.sin(phase) ** 2 * wz).tolist())


def quantize(table: LadderTable, two_l: float, K: int, count: int) -> list[float]:
    """Reverse points of 2l(K + r - 1), r = 1..count+1: boundaries of equal-volume slabs."""
    if count < 1:
        raise ValueError("count must be >= 1")
    start = two_l * K
    if start < table.phi_min:
        raise RangeError(f"2lK = {start} lies below the ladder image starting at {table.phi_min}")
    feasible = int(math.floor((table.phi_max - start) / two_l))
    while feasible > 0 and two_l * (K + feasible) > table.phi_max:
        feasible -= 1
    if count > feasible:
        raise RangeError(f"ladder covers only {feasible} blocks of length {two_l} from 2lK = {start}; "
                         f"requested {count} (largest feasible count is {feasible})")
    return [invert_ladder(table, two_l * (K + r - 1)) for r in range(1, count + 2)]


def slab_integrals(table: LadderTable, points: list[float]) -> list[float]:
    """int Z~^2 over each consecutive pair of quantization points."""
    return [float(transport_integral(table, Segment(a, b), np.ones_like, subdivisions=1))
            for a, b in zip(points[:-1], points[1:])]


@dataclass(frozen=True)
class MeanValueResult:
    xi: float
    residual: float
    seg: Segment
    seg_reverse: Segment
    level: float


def _bisect_crossing(g, lo: float, hi: float, g_lo: float) -> tuple[float, float]:
    """Shrink a sign-change bracket to adjacent doubles; return the end with smaller |g|."""
    g_hi = g(hi)
    while True:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid, 0.0
        if (g_mid < 0) == (g_lo < 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return (lo, g_lo) if abs(g_lo) <= abs(g_hi) else (hi, g_hi)


def mean_value(table: LadderTable, seg: Segment, strict: bool = False) -> MeanValueResult:
    """A point xi inside the preimage of seg with Z~^2(xi) = |seg| / |preimage|.

    The level is the mean of Z~^2 over the preimage, so Z~^2 - level changes sign
    there.  Crossings are located left to right by a scan at step 1e-3 and
    bisected down to adjacent doubles; the first crossing whose residual is
    within 1e-10 is returned (the best one if none is).
    """
    rev = reverse_segment(table, seg, strict)
    level = seg.length() / rev.length()
    n = max(2, int(math.ceil(rev.length() / SCAN_STEP)))
    grid = np.linspace(rev.a, rev.b, n + 1)
    vals = np.asarray(z_tilde_sq(grid, table.mode, table.rs)) - level
    change = np.flatnonzero((np.sign(vals[:-1]) * np.sign(vals[1:]) < 0) | (vals[1:] == 0))

    def g(t):
        return float(z_tilde_sq(t, table.mode, table.rs)) - level

    best = None
    for i in change.tolist():
        if vals[i + 1] == 0.0 and 0 < i + 1 < n:
            xi, r = float(grid[i + 1]), 0.0
        else:
            xi, r = _bisect_crossing(g, float(grid[i]), float(grid[i + 1]), float(vals[i]))
        if not rev.a < xi < rev.b:
            continue
        if best is None or abs(r) < best[1]:
            best = (xi, abs(r))
        if abs(r) <= RESIDUAL_TOL:
            break
    if best is None:
        raise ConvergenceError(f"no crossing of level {level} found in [{rev.a}, {rev.b}] at step {SCAN_STEP}")
    return MeanValueResult(xi=best[0], residual=best[1], seg=seg, seg_reverse=rev, level=level)


@dataclass(frozen=True)
class OscillationResult:
    lhs: float
    rhs: float
    xi: float

    @property
    def relative_gap(self) -> float:
        return abs(self.lhs - self.rhs) / self.lhs


def oscillation_check(table: LadderTable, T_prime: float) -> OscillationResult:
    """lhs = |J̊(T',1)|^(-1/2);  rhs = (2/sqrt(ln xi)) |main sum(xi) + remainder(xi)/2|."""
    mv = mean_value(table, Segment(T_prime, T_prime + 1.0))
    xi = mv.xi
    lhs = 1.0 / math.sqrt(mv.seg_reverse.length())
    total = float(main_sum(xi, table.rs)) + 0.5 * float(rs_remainder(xi, table.rs))
    rhs = 2.0 / math.sqrt(math.log(xi)) * abs(total)
    return OscillationResult(lhs=lhs, rhs=rhs, xi=xi)


def clone_gram(table: LadderTable, T: float, two_l: float, n_max: int,
               subdivisions: int = GRAM_SUBDIVISIONS, strict: bool = False) -> GramReport:
    """Plain inner products of |Z~| trig(pi n (phi1 - T)/l) over the preimage of [T, T + 2l]."""
    seg = Segment(T, T + two_l)
    check_length(seg, strict)
    if not (table.phi_min <= seg.a and seg.b <= table.phi_max):
        raise RangeError(f"segment [{seg.a}, {seg.b}] outside the ladder image [{table.phi_min}, {table.phi_max}]")
    rev = Segment(invert_ladder(table, seg.a), invert_ladder(table, seg.b))
    nodes = transport_nodes(table, rev, subdivisions)
    l = 0.5 * two_l
    amp = np.sqrt(nodes.zts)
    rows = [amp * r for r in _basis_rows((np.pi / l) * (nodes.phi - T), n_max)]
    return _report(rows, nodes.weights, n_max, l, seg, rev)


def quantize_csv(points: list[float], slabs: list[float]) -> str:
    lines = ["r,point,slab_integral,volume"]
    for r, p in enumerate(points, start=1):
        if r <= len(slabs):
            lines.append(f"{r},{p:.17g},{slabs[r - 1]:.17g},{math.pi * slabs[r - 1]:.17g}")
        else:
            lines.append(f"{r},{p:.17g},,")
    return "\n".join(lines) + "\n"


# fsum_rows is re-exported for callers that reduce node products themselves
__all__ = [
    "GramSpec", "GramReport", "MeanValueResult", "OscillationResult", "basis_labels", "kronecker_target",
    "family_deviations",
    "gram_matrix", "parseval_halves", "quantize", "slab_integrals", "mean_value", "oscillation_check",
    "clone_gram", "quantize_csv", "fsum_rows",
]
