"""The computable Jacob's ladder: a checkpointed antiderivative of Z~^2.

``phi1`` is fixed by an anchor point (anchor_t, anchor_phi) and the
Gauss-Legendre panel quadrature of ``z_tilde_sq`` on a uniform grid
``anchor_t + k * panel_width``.  Only every ``checkpoint_stride``-th running
sum is stored; everything in between is recomputed on demand with the same
compiled kernel, so stored and recomputed values agree bit for bit.
"""

from __future__ import annotations

import math
import os
import tempfile
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

from . import _kernels as _k
from .errors import ConstraintError, ConvergenceError, DomainError, RangeError, ResourceError
from .zeta_core import DEFAULT_RS, RSConfig, WeightMode, parse_mode, z_tilde_sq


@dataclass(frozen=True)
class QuadratureConfig:
    panel_width: float = 0.25
    gl_order: int = 8
    checkpoint_stride: int = 64
    max_panels: int = 20_000_000

    def __post_init__(self):
        if not 0.0 < self.panel_width <= 0.5:
            raise ValueError(f"panel_width must lie in (0, 0.5], got {self.panel_width}")
        if self.gl_order < 4:
            raise ValueError(f"gl_order must be >= 4, got {self.gl_order}")
        if self.checkpoint_stride < 1:
            raise ValueError(f"checkpoint_stride must be >= 1, got {self.checkpoint_stride}")


@dataclass(frozen=True)
class Segment:
    a: float
    b: float

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"segment needs b > a, got [{self.a}, {self.b}]")

    def length(self) -> float:
        return self.b - self.a


class ConstraintWarning(UserWarning):
    """A segment is longer than T / ln T; the identities are not claimed there."""


@dataclass(frozen=True, eq=False)
class LadderTable:
    anchor_t: float
    anchor_phi: float
    t_max: float
    mode: WeightMode
    ts: np.ndarray
    phis: np.ndarray
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    rs: RSConfig = DEFAULT_RS

    @property
    def checkpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.ts.tolist(), self.phis.tolist()))

    @property
    def n_panels(self) -> int:
        return _panel_count(self.anchor_t, self.t_max, self.quad.panel_width)

    @property
    def phi_min(self) -> float:
        return float(self.phis[0])

    @property
    def phi_max(self) -> float:
        return float(self.phis[-1])

    def grid(self, k):
        """Left edge of panel k (the last panel is truncated at t_max)."""
        return np.minimum(self.anchor_t + np.asarray(k, dtype=np.float64) * self.quad.panel_width, self.t_max)


def _panel_count(anchor_t: float, t_max: float, h: float) -> int:
    n = int(math.ceil((t_max - anchor_t) / h))
    # the grid formula anchor_t + k*h decides membership, not the quotient
    while n > 1 and anchor_t + (n - 1) * h >= t_max:
        n -= 1
    while anchor_t + n * h < t_max:
        n += 1
    return n


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = legendre.leggauss(order)
    return x, w


@lru_cache(maxsize=None)
def integration_matrix(order: int) -> np.ndarray:
    """S[k, j] = int_{-1}^{x_k} l_j(s) ds for the Lagrange basis on the GL nodes."""
    x, w = gauss_legendre(order)
    n = np.arange(order)
    vander = legendre.legvander(x, order - 1)  # P_n(x_k)
    # discrete orthogonality gives the inverse Vandermonde in closed form
    to_legendre = ((2 * n + 1) / 2.0)[:, None] * vander.T * w[None, :]
    anti = np.empty((order, order))
    for m in range(order):
        coef = np.zeros(order)
        coef[m] = 1.0
        anti[:, m] = legendre.legval(x, legendre.legint(coef, lbnd=-1))
    return anti @ to_legendre


def _panel_integrals(table: LadderTable, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    x, w = gauss_legendre(table.quad.gl_order)
    _k.LOG_TABLE.ensure(float(np.max(ends)) if ends.size else table.t_max)
    out = np.empty(starts.shape[0])
    _k._gl_panels(
        np.ascontiguousarray(starts, dtype=np.float64),
        np.ascontiguousarray(ends, dtype=np.float64),
        x, w, table.rs.correction_order, table.mode.shift,
        *_k.LOG_TABLE.args(), *_k.RS_COEF, out,
    )
    return out


def build_ladder(
    anchor_t: float,
    anchor_phi: float,
    t_max: float,
    mode: WeightMode,
    quad: QuadratureConfig = QuadratureConfig(),
    rs: RSConfig = DEFAULT_RS,
    chunk: int = 65536,
) -> LadderTable:
    """Integrate Z~^2 from anchor_t to t_max and store compensated running sums at checkpoints."""
    if not anchor_t >= rs.t_min:
        raise DomainError(f"anchor_t = {anchor_t} is below t_min = {rs.t_min}")
    if not t_max > anchor_t + 1.0:
        raise DomainError(f"t_max = {t_max} must exceed anchor_t + 1 = {anchor_t + 1.0}")
    if not math.isfinite(anchor_phi):
        raise DomainError("anchor_phi must be finite")
    h = quad.panel_width
    n = _panel_count(anchor_t, t_max, h)
    if n > quad.max_panels:
        raise ResourceError(f"{n} panels requested, cap is {quad.max_panels}")
    skeleton = LadderTable(anchor_t, anchor_phi, t_max, mode, np.empty(0), np.empty(0), quad, rs)
    edges = skeleton.grid(np.arange(n + 1))
    edges[-1] = t_max
    incs = np.empty(n)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        incs[lo:hi] = _panel_integrals(skeleton, edges[lo:hi], edges[lo + 1:hi + 1])
    phis = _k._checkpoint_sums(float(anchor_phi), incs, quad.checkpoint_stride)
    idx = np.minimum(np.arange(phis.shape[0]) * quad.checkpoint_stride, n)
    ts = edges[idx]
    ts.setflags(write=False)
    phis.setflags(write=False)
    return LadderTable(anchor_t, anchor_phi, t_max, mode, ts, phis, quad, rs)


def _span(table: LadderTable, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Panel edges and compensated running phi values inside checkpoint span i."""
    stride = table.quad.checkpoint_stride
    k0 = i * stride
    k1 = min(k0 + stride, table.n_panels)
    edges = table.grid(np.arange(k0, k1 + 1))
    edges[-1] = table.ts[i + 1]
    incs = _panel_integrals(table, edges[:-1], edges[1:])
    cum = _k._prefix_sums(float(table.phis[i]), incs)
    return edges, cum


def _locate_t(table: LadderTable, t: float) -> tuple[float, float]:
    """Left edge of the panel containing t and phi1 there."""
    i = int(np.searchsorted(table.ts, t, side="right")) - 1
    i = min(max(i, 0), table.ts.shape[0] - 2)
    stride = table.quad.checkpoint_stride
    k0 = i * stride
    k = int(math.floor((t - table.anchor_t) / table.quad.panel_width))
    k = min(max(k, k0), min(k0 + stride, table.n_panels) - 1)
    while k > k0 and float(table.grid(k)) > t:
        k -= 1
    while k < min(k0 + stride, table.n_panels) - 1 and float(table.grid(k + 1)) <= t:
        k += 1
    if k == k0:
        return float(table.ts[i]), float(table.phis[i])
    edges = table.grid(np.arange(k0, k + 1))
    incs = _panel_integrals(table, edges[:-1], edges[1:])
    cum = _k._prefix_sums(float(table.phis[i]), incs)
    return float(edges[-1]), float(cum[-1])


def _partial(table: LadderTable, a: float, t: float) -> float:
    if t == a:
        return 0.0
    return float(_panel_integrals(table, np.array([a]), np.array([t]))[0])


def phi1(table: LadderTable, t: float) -> float:
    """phi1(t) for anchor_t <= t <= t_max."""
    t = float(t)
    if not table.anchor_t <= t <= table.t_max:
        raise DomainError(f"t = {t} outside the ladder range [{table.anchor_t}, {table.t_max}]")
    j = int(np.searchsorted(table.ts, t))
    if j < table.ts.shape[0] and table.ts[j] == t:
        return float(table.phis[j])
    a, phi_a = _locate_t(table, t)
    return phi_a + _partial(table, a, t)


def _ulp(x: float) -> float:
    return math.ulp(abs(x)) if x != 0 else math.ulp(1.0)


def invert_ladder(table: LadderTable, x: float, max_iter: int = 200) -> float:
    """The reverse point: the t with phi1(t) = x.

    Checkpoint search, then the panel holding x, then safeguarded Newton inside
    that panel (bisection whenever Z~^2 < 1e-12 or the step leaves the bracket).
    """
    x = float(x)
    if not table.phi_min <= x <= table.phi_max:
        raise RangeError(f"x = {x} outside the ladder image [{table.phi_min}, {table.phi_max}]")
    phis = table.phis
    i = int(np.searchsorted(phis, x, side="right")) - 1
    if i >= phis.shape[0] - 1:
        return float(table.ts[-1])
    if phis[i] == x:
        return float(table.ts[i])
    edges, cum = _span(table, i)
    k = int(np.searchsorted(cum, x, side="right")) - 1
    k = min(max(k, 0), cum.shape[0] - 2)
    a, b = float(edges[k]), float(edges[k + 1])
    base = float(cum[k])
    if cum[k] == x:
        return a

    def resid(t):
        # (base - x) is exact for nearby values, so this keeps the small part intact
        return (base - x) + _partial(table, a, t)

    lo, hi = a, b
    rise = float(cum[k + 1] - cum[k])
    t = a + (b - a) * ((x - base) / rise if rise > 0 else 0.5)
    t = min(max(t, lo), hi)
    tol = 1e-9 * max(1.0, abs(x))
    best_t, best_r = t, math.inf
    for _ in range(max_iter):
        r = resid(t)
        if abs(r) < best_r:
            best_t, best_r = t, abs(r)
        if r == 0.0:
            return t
        if r < 0:
            lo = t
        else:
            hi = t
        if hi - lo <= 2 * _ulp(t):
            break
        d = float(z_tilde_sq(t, table.mode, table.rs))
        step_ok = False
        if d >= 1e-12:
            t_new = t - r / d
            if lo < t_new < hi:
                if abs(t_new - t) <= _ulp(t):
                    best_t = t_new if abs(resid(t_new)) <= best_r else best_t
                    break
                t, step_ok = t_new, True
        if not step_ok:
            t = 0.5 * (lo + hi)
    for cand in (lo, hi):
        rc = abs(resid(cand))
        if rc < best_r:
            best_t, best_r = cand, rc
    if best_r > tol:
        raise ConvergenceError(f"inversion of x = {x} stalled at residual {best_r:.3e} (tolerance {tol:.3e})")
    return best_t


def check_length(seg: Segment, strict: bool = False) -> None:
    """Enforce U <= T / ln T for seg = [T, T + U]."""
    bound = seg.a / math.log(seg.a)
    if seg.length() > bound:
        msg = f"segment length {seg.length():.6g} exceeds T/ln T = {bound:.6g} at T = {seg.a:.6g}"
        if strict:
            raise ConstraintError(msg)
        warnings.warn(msg, ConstraintWarning, stacklevel=3)


def reverse_segment(table: LadderTable, seg: Segment, strict: bool = False) -> Segment:
    """[invert(seg.a), invert(seg.b)], the preimage of seg under phi1."""
    if not (table.phi_min <= seg.a and seg.b <= table.phi_max):
        raise RangeError(f"segment [{seg.a}, {seg.b}] outside the ladder image [{table.phi_min}, {table.phi_max}]")
    check_length(seg, strict)
    return Segment(invert_ladder(table, seg.a), invert_ladder(table, seg.b))


@dataclass(frozen=True)
class TransportNodes:
    """Quadrature nodes on a reverse segment with phi1 and Z~^2 at every node.

    The integral of g over the segment is ``fsum(weights * g(t))``.
    """

    t: np.ndarray
    weights: np.ndarray
    zts: np.ndarray
    phi: np.ndarray
    phi_start: float
    phi_end: float


def transport_nodes(table: LadderTable, seg: Segment, subdivisions: int = 2, order: int = 16) -> TransportNodes:
    """Nodes aligned with the ladder's panel grid, each panel cut into ``subdivisions`` pieces.

    phi1 at the nodes comes from the running value at each piece start plus the
    spectral integration matrix of the same Gauss-Legendre rule.
    """
    if not (table.anchor_t <= seg.a and seg.b <= table.t_max):
        raise DomainError(f"segment [{seg.a}, {seg.b}] outside the ladder range [{table.anchor_t}, {table.t_max}]")
    h = table.quad.panel_width
    k_lo = int(math.floor((seg.a - table.anchor_t) / h)) + 1
    k_hi = int(math.ceil((seg.b - table.anchor_t) / h)) - 1
    inner = table.grid(np.arange(max(k_lo, 0), max(k_hi + 1, max(k_lo, 0))))
    inner = inner[(inner > seg.a) & (inner < seg.b)]
    breaks = np.concatenate(([seg.a], inner, [seg.b]))
    if subdivisions > 1:
        frac = np.arange(subdivisions) / subdivisions
        left = breaks[:-1, None] + (breaks[1:] - breaks[:-1])[:, None] * frac[None, :]
        breaks = np.append(left.reshape(-1), seg.b)
    x, w = gauss_legendre(order)
    smat = integration_matrix(order)
    half = 0.5 * (breaks[1:] - breaks[:-1])
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :])
    zts = np.asarray(z_tilde_sq(t.reshape(-1), table.mode, table.rs)).reshape(t.shape)
    incs = half * (zts @ w)
    starts = _k._prefix_sums(phi1(table, seg.a), incs)
    phi = starts[:-1, None] + half[:, None] * (zts @ smat.T)
    weights = half[:, None] * w[None, :]
    return TransportNodes(
        t=t.reshape(-1),
        weights=weights.reshape(-1),
        zts=zts.reshape(-1),
        phi=phi.reshape(-1),
        phi_start=float(starts[0]),
        phi_end=float(starts[-1]),
    )


def fsum_rows(values: np.ndarray) -> np.ndarray | float:
    """Correctly rounded sum along the last axis."""
    if values.ndim == 1:
        return math.fsum(values.tolist())
    return np.array([math.fsum(row.tolist()) for row in values.reshape(-1, values.shape[-1])]).reshape(values.shape[:-1])


def transport_integral(
    table: LadderTable,
    seg_reverse: Segment,
    f: Callable[[np.ndarray], np.ndarray],
    subdivisions: int = 2,
    order: int = 16,
):
    """int over seg_reverse of f(phi1(t)) Z~^2(t) dt.

    ``f`` is called once with the array of phi1 values at the nodes; it may return
    shape (n,) or (k, n) to transport k functions on the same nodes.
    """
    nodes = transport_nodes(table, seg_reverse, subdivisions, order)
    vals = np.asarray(f(nodes.phi), dtype=np.float64)
    if vals.ndim == 0:
        vals = np.full(nodes.phi.shape, float(vals))
    return fsum_rows(vals * (nodes.weights * nodes.zts))


# -- checkpoint file --------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def save_ladder(table: LadderTable, path: str | os.PathLike) -> None:
    """Write the checkpoint CSV atomically (temp file + rename)."""
    path = Path(path)
    lines = [
        f"# anchor_t={_fmt(table.anchor_t)} anchor_phi={_fmt(table.anchor_phi)} mode={table.mode.label} "
        f"panel_width={_fmt(table.quad.panel_width)} gl_order={table.quad.gl_order}",
        f"# checkpoint_stride={table.quad.checkpoint_stride} t_max={_fmt(table.t_max)} "
        f"t_min={_fmt(table.rs.t_min)} correction_order={table.rs.correction_order}",
        "t,phi1",
    ]
    lines += [f"{_fmt(t)},{_fmt(p)}" for t, p in zip(table.ts.tolist(), table.phis.tolist())]
    write_atomic(path, "\n".join(lines) + "\n")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the result the permissions a plain open() would
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_ladder(path: str | os.PathLike) -> LadderTable:
    meta: dict[str, str] = {}
    ts: list[float] = []
    phis: list[float] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for item in line[1:].split():
                    if "=" in item:
                        key, val = item.split("=", 1)
                        meta[key] = val
                continue
            if line == "t,phi1":
                continue
            a, b = line.split(",")
            ts.append(float(a))
            phis.append(float(b))
    missing = {"anchor_t", "anchor_phi", "mode", "panel_width", "gl_order"} - meta.keys()
    if missing:
        raise ValueError(f"ladder file {path} lacks metadata {sorted(missing)}")
    if len(ts) < 2:
        raise ValueError(f"ladder file {path} has fewer than two checkpoints")
    quad = QuadratureConfig(
        panel_width=float(meta["panel_width"]),
        gl_order=int(meta["gl_order"]),
        checkpoint_stride=int(meta.get("checkpoint_stride", 64)),
    )
    rs = RSConfig(t_min=float(meta.get("t_min", DEFAULT_RS.t_min)),
                  correction_order=int(meta.get("correction_order", DEFAULT_RS.correction_order)))
    ts_arr = np.array(ts)
    phis_arr = np.array(phis)
    ts_arr.setflags(write=False)
    phis_arr.setflags(write=False)
    return LadderTable(
        anchor_t=float(meta["anchor_t"]),
        anchor_phi=float(meta["anchor_phi"]),
        t_max=float(meta.get("t_max", ts[-1])),
        mode=parse_mode(meta["mode"]),
        ts=ts_arr,
        phis=phis_arr,
        quad=quad,
        rs=rs,
    )


@dataclass(frozen=True)
class IntegrityReport:
    max_deviation: float
    worst_index: int
    bad: list[int]
    monotone: bool

    @property
    def ok(self) -> bool:
        return self.monotone and not self.bad


def check_integrity(table: LadderTable, tol: float = 1e-12, chunk: int = 65536) -> IntegrityReport:
    """Re-integrate every checkpoint span and compare with the stored increments.

    A span passes when the recomputed increment matches phi_{i+1} - phi_i within
    ``tol`` plus one unit in the last place of the stored values, which is the
    resolution at which a double can hold phi1 ~ 1e5.
    """
    ts, phis = table.ts, table.phis
    monotone = bool(np.all(np.diff(ts) > 0) and np.all(np.diff(phis) >= 0))
    n = table.n_panels
    stride = table.quad.checkpoint_stride
    expected_ts = table.grid(np.minimum(np.arange(ts.shape[0]) * stride, n))
    expected_ts[-1] = table.t_max
    if ts.shape[0] != (n + stride - 1) // stride + 1 or not np.array_equal(expected_ts, ts):
        return IntegrityReport(math.inf, 0, [0], monotone)
    edges = table.grid(np.arange(n + 1))
    edges[-1] = table.t_max
    incs = np.empty(n)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        incs[lo:hi] = _panel_integrals(table, edges[lo:hi], edges[lo + 1:hi + 1])
    bad = []
    worst, worst_i = 0.0, 0
    for i in range(ts.shape[0] - 1):
        span = incs[i * stride:min((i + 1) * stride, n)]
        recomputed = math.fsum(span.tolist())
        stored = float(phis[i + 1]) - float(phis[i])
        dev = abs(recomputed - stored)
        if dev > worst:
            worst, worst_i = dev, i
        if dev > tol + _ulp(float(phis[i + 1])):
            bad.append(i)
    return IntegrityReport(worst, worst_i, bad, monotone)
