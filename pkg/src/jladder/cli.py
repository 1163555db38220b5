"""Command-line front end.

    jladder ladder build --anchor-t 1e5 --anchor-phi auto --t-max 4.2e5 --mode moser --out ladder.csv
    jladder verify --ladder ladder.csv --report report.csv

Exit codes: 0 success, 1 a verification check failed, 2 bad flags, 3 numeric or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import harmonics as hm
from .errors import LadderError
from .ladder import (
    ConstraintWarning,
    LadderTable,
    QuadratureConfig,
    Segment,
    build_ladder,
    check_integrity,
    invert_ladder,
    load_ladder,
    phi1,
    reverse_segment,
    save_ladder,
    transport_integral,
    write_atomic,
)
from .primes import SieveTable, build_sieve, check_A, check_B, check_C, moser_anchor_phi
from .zeta_core import RSConfig, WeightMode, parse_mode, theta, z, z_tilde_sq


class UsageError(Exception):
    """Bad or inconsistent flags; maps to exit code 2."""


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _csv(header: list[str], rows: list[list], meta: list[str] = ()) -> str:
    lines = [f"# {m}" for m in meta]
    lines.append(",".join(header))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        write_atomic(Path(out), text)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise UsageError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


# -- run configuration ------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    mode: WeightMode = field(default_factory=lambda: parse_mode("moser"))
    anchor_t: float = 1e5
    anchor_phi: float | str = "auto"
    t_max: float = 4.2e5
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    strict: bool = False
    correction_order: int = RSConfig().correction_order

    def __post_init__(self):
        if not self.t_max > self.anchor_t + 1.0:
            raise UsageError(f"--t-max ({self.t_max}) must exceed --anchor-t ({self.anchor_t}) by more than 1")
        if isinstance(self.anchor_phi, str) and self.anchor_phi != "auto":
            raise UsageError(f"--anchor-phi must be a number or 'auto', got {self.anchor_phi!r}")

    @property
    def rs(self) -> RSConfig:
        return RSConfig(correction_order=self.correction_order)

    def to_text(self) -> str:
        items = {
            "mode": self.mode.label,
            "anchor_t": _fmt(self.anchor_t),
            "anchor_phi": self.anchor_phi if isinstance(self.anchor_phi, str) else _fmt(self.anchor_phi),
            "t_max": _fmt(self.t_max),
            "panel_width": _fmt(self.quad.panel_width),
            "gl_order": str(self.quad.gl_order),
            "checkpoint_stride": str(self.quad.checkpoint_stride),
            "strict": _fmt(self.strict),
            "correction_order": str(self.correction_order),
        }
        return "".join(f"{k} = {v}\n" for k, v in items.items())

    @classmethod
    def from_mapping(cls, values: dict[str, str]) -> "RunConfig":
        base = cls()
        known = {"mode", "anchor_t", "anchor_phi", "t_max", "panel_width", "gl_order", "checkpoint_stride",
                 "strict", "correction_order"}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            quad = QuadratureConfig(
                panel_width=float(values.get("panel_width", base.quad.panel_width)),
                gl_order=int(values.get("gl_order", base.quad.gl_order)),
                checkpoint_stride=int(values.get("checkpoint_stride", base.quad.checkpoint_stride)),
            )
            phi = values.get("anchor_phi", "auto")
            return cls(
                mode=parse_mode(values["mode"]) if "mode" in values else base.mode,
                anchor_t=float(values.get("anchor_t", base.anchor_t)),
                anchor_phi=phi if str(phi).strip().lower() == "auto" else float(phi),
                t_max=float(values.get("t_max", base.t_max)),
                quad=quad,
                strict=str(values.get("strict", "false")).strip().lower() in ("1", "true", "yes", "on"),
                correction_order=int(values.get("correction_order", base.correction_order)),
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return cls.from_mapping(parse_config_text(text))


def parse_config_text(text: str) -> dict[str, str]:
    values = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {n}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


_RUN_FLAGS = ("mode", "anchor_t", "anchor_phi", "t_max", "panel_width", "gl_order", "checkpoint_stride",
              "correction_order")


def run_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then any flag given on the command line."""
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            values = parse_config_text(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    for key in _RUN_FLAGS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = str(val)
    if getattr(args, "strict", False):
        values["strict"] = "true"
    return RunConfig.from_mapping(values)


# -- helpers shared by subcommands ------------------------------------------------------------


def _sieve_for(t: float) -> SieveTable:
    return build_sieve(max(2_000_000, int(math.ceil(t)) + 1))


def _load(path: str) -> LadderTable:
    return load_ladder(path)


def _span_check(table: LadderTable, lo: float, hi: float, what: str) -> None:
    if not (table.phi_min <= lo and hi <= table.phi_max):
        raise UsageError(f"{what} [{lo}, {hi}] outside the ladder image [{table.phi_min}, {table.phi_max}]")


# -- subcommands ------------------------------------------------------------------------------


def cmd_ladder_build(args) -> int:
    cfg = run_config(args)
    if not args.out:
        raise UsageError("--out is required")
    anchor_phi = cfg.anchor_phi
    if anchor_phi == "auto":
        anchor_phi = moser_anchor_phi(cfg.anchor_t, _sieve_for(cfg.anchor_t))
    table = build_ladder(cfg.anchor_t, float(anchor_phi), cfg.t_max, cfg.mode, cfg.quad, cfg.rs)
    save_ladder(table, args.out)
    print(f"built ladder [{_fmt(table.anchor_t)},{_fmt(table.t_max)}] checkpoints={len(table.ts)} mode={table.mode.label}")
    return 0


def cmd_ladder_eval(args) -> int:
    table = _load(args.ladder)
    rows = [[t, phi1(table, t)] for t in _floats(args.t)]
    _emit(_csv(["t", "phi1"], rows, [f"ladder={args.ladder}"]), args.out)
    return 0


def cmd_ladder_invert(args) -> int:
    table = _load(args.ladder)
    rows = []
    for x in _floats(args.x):
        t = invert_ladder(table, x)
        rows.append([x, t, phi1(table, t) - x])
    _emit(_csv(["x", "t", "residual"], rows, [f"ladder={args.ladder}"]), args.out)
    return 0


def cmd_z_tabulate(args) -> int:
    if not args.step > 0 or not args.t1 >= args.t0:
        raise UsageError("need --t1 >= --t0 and --step > 0")
    mode = parse_mode(args.mode)
    ts = args.t0 + args.step * np.arange(int(math.floor((args.t1 - args.t0) / args.step + 1e-9)) + 1)
    rs = RSConfig(correction_order=args.correction_order) if args.correction_order is not None else RSConfig()
    cols = [ts, np.atleast_1d(theta(ts, rs)), np.atleast_1d(z(ts, rs)), np.atleast_1d(z_tilde_sq(ts, mode, rs))]
    header = ["t", "theta", "z", "z_tilde_sq"]
    if args.ladder:
        table = _load(args.ladder)
        cols.append(np.array([phi1(table, t) for t in ts.tolist()]))
        header.append("phi1")
    rows = [list(r) for r in zip(*[c.tolist() for c in cols])]
    _emit(_csv(header, rows, [f"mode={mode.label} correction_order={rs.correction_order}"]), args.out)
    return 0


def cmd_gram(args) -> int:
    table = _load(args.ladder)
    spec = hm.GramSpec(args.two_l, args.K, args.n_max, table.mode)
    _span_check(table, spec.T, spec.T + spec.two_l, "block")
    rep = hm.gram_matrix(table, spec)
    _emit(rep.to_csv(), args.out)
    return 0


def cmd_clone_gram(args) -> int:
    table = _load(args.ladder)
    _span_check(table, args.T, args.T + args.two_l, "segment")
    rep = hm.clone_gram(table, args.T, args.two_l, args.n_max, strict=args.strict)
    _emit(rep.to_csv(), args.out)
    return 0


def cmd_quantize(args) -> int:
    table = _load(args.ladder)
    points = hm.quantize(table, args.two_l, args.K, args.count)
    slabs = hm.slab_integrals(table, points)
    _emit(hm.quantize_csv(points, slabs), args.out)
    return 0


def cmd_meanvalue(args) -> int:
    table = _load(args.ladder)
    rows = []
    for T in _floats(args.T):
        _span_check(table, T, T + args.U, "segment")
        mv = hm.mean_value(table, Segment(T, T + args.U), strict=args.strict)
        rows.append([T, args.U, mv.seg_reverse.a, mv.seg_reverse.b, mv.xi, mv.level, mv.residual])
    _emit(_csv(["T", "U", "rev_a", "rev_b", "xi", "level", "residual"], rows), args.out)
    return 0


def cmd_oscillation(args) -> int:
    table = _load(args.ladder)
    rows = []
    for T in _floats(args.T):
        _span_check(table, T, T + 1.0, "segment")
        res = hm.oscillation_check(table, T)
        rows.append([T, res.xi, res.lhs, res.rhs, res.relative_gap])
    _emit(_csv(["T", "xi", "lhs", "rhs", "relative_gap"], rows, [f"mode={table.mode.label}"]), args.out)
    return 0


PROPS_BAND = (0.7, 1.3)


def props_rows(table: LadderTable, sieve: SieveTable, ts: list[float], two_l: float, Ks: list[int]) -> list[list]:
    lo, hi = PROPS_BAND
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for t in ts:
            r = check_A(table, sieve, t)
            rows.append([t, "A", t - phi1(table, t), r, lo <= r <= hi])
    for K in Ks:
        T = two_l * K
        b = check_B(table, two_l, K)
        rows.append([T, "B", invert_ladder(table, T), "", b])
        rho, r = check_C(table, sieve, two_l, K)
        rows.append([T, "C", rho, r, (rho > 0) == b and lo <= r <= hi])
    return rows


def cmd_props(args) -> int:
    table = _load(args.ladder)
    ts = _floats(args.t)
    Ks = _ints(args.K)
    sieve = _sieve_for(max(ts + [args.two_l * k for k in Ks]))
    rows = props_rows(table, sieve, ts, args.two_l, Ks)
    meta = [f"mode={table.mode.label} band=[{PROPS_BAND[0]},{PROPS_BAND[1]}] two_l={_fmt(args.two_l)}",
            "pi(t) for (C) is evaluated at t = 2lK"]
    _emit(_csv(["t", "check", "value", "ratio", "pass"], rows, meta), args.out)
    return 0


# -- verify -----------------------------------------------------------------------------------


@dataclass
class Check:
    check: str
    target: float | str
    actual: float
    tolerance: float | str
    passed: bool


def _rel(a: float, b: float, scale: float | None = None) -> float:
    return abs(a - b) / (scale if scale is not None else max(abs(b), 1e-300))


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    # segment lengths spread over every scale up to T/ln T, not clustered near the top
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def verify_checks(table: LadderTable, seed: int = 20240601, two_l: float = 20.0, K: int = 6000,
                  n_max: int = 8, progress: Callable[[str], None] | None = None) -> list[Check]:
    """Every identity and property on the default grid, as report rows."""
    say = progress or (lambda _m: None)
    rng = np.random.default_rng(seed)
    l = 0.5 * two_l
    out: list[Check] = []

    say("table integrity")
    integ = check_integrity(table)
    out.append(Check("table_integrity", 0.0, integ.max_deviation, "1e-12+ulp(phi)", integ.ok))

    say("Gram matrix")
    rep = hm.gram_matrix(table, hm.GramSpec(two_l, K, n_max, table.mode))
    tol = 1e-6 * l
    for fam, dev in hm.family_deviations(rep).items():
        out.append(Check(f"orthogonality_{fam}", 0.0, dev, tol, dev <= tol))

    say("Parseval halves")
    worst = 0.0
    for m in range(1, n_max + 1):
        c2, s2 = hm.parseval_halves(table, hm.GramSpec(two_l, K, n_max, table.mode), m)
        worst = max(worst, abs(c2 - l), abs(s2 - l))
    out.append(Check("parseval", l, worst, tol, worst <= tol))

    say("quantization")
    count = 50
    points = hm.quantize(table, two_l, K, count)
    slabs = hm.slab_integrals(table, points)
    worst = max(_rel(s, two_l) for s in slabs)
    increasing = all(b > a for a, b in zip(points[:-1], points[1:]))
    out.append(Check("quantization_slabs", two_l, worst, 1e-6, worst <= 1e-6 and increasing))
    worst = max(_rel(math.pi * s, 2 * math.pi * l) for s in slabs)
    out.append(Check("quantization_volume", 2 * math.pi * l, worst, 1e-6, worst <= 1e-6))

    say("f = 1 transport")
    lo, hi = max(table.phi_min, 1.0e5), table.phi_max
    worst = 0.0
    for _ in range(10):
        T = float(rng.uniform(lo, hi - 2e4))
        U = _log_uniform(rng, 0.5, T / math.log(T))
        rev = reverse_segment(table, Segment(T, T + U))
        worst = max(worst, _rel(transport_integral(table, rev, np.ones_like), U))
    out.append(Check("unit_transport", "U", worst, 1e-6, worst <= 1e-6))

    say("transport identity")
    worst = 0.0
    for _ in range(20):
        T = float(rng.uniform(lo, hi - 2e4))
        U = _log_uniform(rng, 1.0, T / math.log(T))
        for err in transport_identity_errors(table, Segment(T, T + U), l, m=int(rng.integers(1, 9))):
            worst = max(worst, err)
    out.append(Check("transport_identity", 0.0, worst, 5e-8, worst <= 5e-8))

    say("mean value")
    worst, interior = 0.0, True
    for T in rng.uniform(max(lo, 1.1e5), min(4e5, hi - 1.0), 20).tolist():
        mv = hm.mean_value(table, Segment(T, T + 1.0))
        worst = max(worst, mv.residual)
        interior &= mv.seg_reverse.a < mv.xi < mv.seg_reverse.b and mv.level > 0
    out.append(Check("mean_value", 0.0, worst, hm.RESIDUAL_TOL, worst <= hm.RESIDUAL_TOL and interior))

    say("oscillation")
    osc_tol = 1e-3 if table.mode.shift == 0.0 else 0.03
    worst = 0.0
    for T in rng.uniform(max(lo, 1e5), max(lo, 1e5) + 1e3, 10).tolist():
        worst = max(worst, hm.oscillation_check(table, T).relative_gap)
    out.append(Check(f"oscillation_{table.mode.label}", 0.0, worst, osc_tol, worst <= osc_tol))

    say("properties A, B, C")
    sieve = _sieve_for(table.t_max)
    band = f"[{PROPS_BAND[0]},{PROPS_BAND[1]}]"
    worst_a = [check_A(table, sieve, t) for t in (2e5, 3e5, 4e5) if t <= table.t_max]
    dev = max(abs(r - 1.0) for r in worst_a)
    out.append(Check("A", 1.0, 1.0 + dev if worst_a else math.nan, band, bool(worst_a) and dev <= 0.3))
    grid = [(two_l, k) for k in (K, K + 10, 2 * K)] + [(tl, int(1.2e5 // tl)) for tl in (2.0, 50.0, 200.0)]
    grid = [(tl, k) for tl, k in grid if tl * (k + 1) <= table.phi_max]
    b_all = all(check_B(table, tl, k) for tl, k in grid)
    out.append(Check("B", "true", float(sum(check_B(table, tl, k) for tl, k in grid)), f"{len(grid)}/{len(grid)}",
                     b_all and bool(grid)))
    kc = int(round(4e5 / two_l))
    if two_l * (kc + 1) > table.phi_max:
        kc = int(table.phi_max // two_l) - 1
    rho, ratio = check_C(table, sieve, two_l, kc)
    out.append(Check("C", 1.0, ratio, band, rho > 0 and abs(ratio - 1.0) <= 0.3))
    return out


def transport_identity_errors(table: LadderTable, seg: Segment, l: float, m: int) -> list[float]:
    """Relative errors of int f(phi1) Z~^2 against the closed form int_A^B f, for f in {1, x, x^2, cos, sin}.

    The harmonics use the phase pi m (x - A)/l, so closed forms stay well conditioned; their error
    is scaled by max(|RHS|, B - A) since the RHS of a trigonometric integral may vanish.
    """
    A, B = seg.a, seg.b
    rev = reverse_segment(table, seg)
    k = math.pi * m / l

    def f(x):
        d = x - A
        return np.stack([np.ones_like(x), d, d * d, np.cos(k * d), np.sin(k * d)])

    lhs = transport_integral(table, rev, f)
    U = B - A
    rhs = [U, 0.5 * U * U, U ** 3 / 3.0, math.sin(k * U) / k, (1.0 - math.cos(k * U)) / k]
    errs = [_rel(lhs[i], rhs[i]) for i in range(3)]
    errs += [_rel(lhs[i], rhs[i], max(abs(rhs[i]), U)) for i in (3, 4)]
    return errs


def cmd_verify(args) -> int:
    try:
        table = _load(args.ladder)
    except (OSError, ValueError) as exc:
        print(f"jladder: cannot read ladder {args.ladder}: {exc}", file=sys.stderr)
        return 3
    t0 = time.perf_counter()
    checks = verify_checks(table, seed=args.seed, progress=(lambda m: print(f"  {m}", file=sys.stderr))
                           if args.verbose else None)
    rows = [[c.check, c.target, c.actual, c.tolerance, c.passed] for c in checks]
    meta = [f"ladder={args.ladder} mode={table.mode.label} seed={args.seed}"]
    _emit(_csv(["check", "target", "actual", "tolerance", "pass"], rows, meta), args.report)
    failed = [c.check for c in checks if not c.passed]
    status = "all checks passed" if not failed else f"FAILED: {', '.join(failed)}"
    print(f"verify: {len(checks) - len(failed)}/{len(checks)} passed in {time.perf_counter() - t0:.1f}s; {status}")
    return 1 if failed else 0


# -- plot -------------------------------------------------------------------------------------


def _csv_header(path: str) -> list[str]:
    with open(path) as fh:
        for line in fh:
            if line.strip() and not line.startswith("#"):
                return next(csv.reader([line.strip()]))
    raise UsageError(f"{path} has no header row")


def plot_script(path: str, header: list[str], x: str, column: str, check: str | None = None,
                title: str | None = None) -> str:
    lines = [
        "# gnuplot script; run with: gnuplot -persist <this file>",
        'set datafile separator ","',
        "set datafile commentschars '#'",
        "set key top left",
        "set grid",
    ]
    if column == "heat":
        lines += [
            f"set title {_q(title or 'Gram matrix')}",
            "set view map",
            "set palette rgbformulae 33,13,10",
            f"plot {_q(path)} matrix columnheaders with image notitle",
        ]
        return "\n".join(lines) + "\n"
    xi, yi = header.index(x) + 1, header.index(column) + 1
    lines += [f"set xlabel {_q(x)}", f"set ylabel {_q(column)}", f"set title {_q(title or f'{column} vs {x}')}"]
    if check is not None:
        ci = header.index("check") + 1
        using = f"{xi}:(strcol({ci}) eq {_q(check)} ? ${yi} : NaN)"
        label = f"{column} ({check})"
    else:
        using = f"{xi}:{yi}"
        label = column
    style = "linespoints pt 7 ps 0.6" if check is not None else "lines"
    plot = f"plot {_q(path)} skip 1 using {using} with {style} title {_q(label)}"
    if column == "ratio":
        plot += ", 1.0 with lines dashtype 2 lc rgb 'gray' title 'reference 1.0'"
    lines.append(plot)
    return "\n".join(lines) + "\n"


def _q(s: str) -> str:
    return "'" + str(s).replace("'", "''") + "'"


def cmd_plot(args) -> int:
    header = _csv_header(args.csv)
    if args.column != "heat":
        for col in (args.column, args.x):
            if col not in header:
                raise UsageError(f"unknown column {col!r}; {args.csv} has {', '.join(header)}")
        if args.check is not None and "check" not in header:
            raise UsageError(f"--check needs a 'check' column; {args.csv} has {', '.join(header)}")
    _emit(plot_script(args.csv, header, args.x, args.column, args.check, args.title), args.out)
    return 0


# -- argument parsing -------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="file of 'key = value' lines; flags override it")
    p.add_argument("--mode", help="leading, moser or shift:<s> (default moser)")
    p.add_argument("--anchor-t", dest="anchor_t", type=float)
    p.add_argument("--anchor-phi", dest="anchor_phi", help="a number or 'auto'")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--panel-width", dest="panel_width", type=float)
    p.add_argument("--gl-order", dest="gl_order", type=int)
    p.add_argument("--checkpoint-stride", dest="checkpoint_stride", type=int)
    p.add_argument("--correction-order", dest="correction_order", type=int)


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="jladder", description="Jacob's ladder phi1 from Hardy's Z and its weighted orthogonal systems")
    root.add_argument("--strict", action="store_true", help="treat U > T/ln T as an error")
    sub = root.add_subparsers(dest="command", required=True, parser_class=_Parser)

    lad = sub.add_parser("ladder", help="build, evaluate or invert a ladder table")
    lsub = lad.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = lsub.add_parser("build")
    _run_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ladder_build)
    p = lsub.add_parser("eval")
    p.add_argument("--ladder", required=True)
    p.add_argument("--t", required=True, help="comma-separated t values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ladder_eval)
    p = lsub.add_parser("invert")
    p.add_argument("--ladder", required=True)
    p.add_argument("--x", required=True, help="comma-separated phi1 values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ladder_invert)

    zp = sub.add_parser("z", help="tabulate theta, Z and Z~^2")
    zsub = zp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = zsub.add_parser("tabulate")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--mode", default="moser")
    p.add_argument("--correction-order", dest="correction_order", type=int)
    p.add_argument("--ladder", help="also tabulate phi1 from this table")
    p.add_argument("--out")
    p.set_defaults(func=cmd_z_tabulate)

    p = sub.add_parser("gram", help="weighted Gram matrix over the preimage of [2lK, 2l(K+1)]")
    p.add_argument("--ladder", required=True)
    p.add_argument("--two-l", dest="two_l", type=float, default=20.0)
    p.add_argument("--K", type=int, default=6000)
    p.add_argument("--n-max", dest="n_max", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("clone-gram", help="plain Gram matrix of the |Z~| clone system")
    p.add_argument("--ladder", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--two-l", dest="two_l", type=float, default=20.0)
    p.add_argument("--n-max", dest="n_max", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_clone_gram)

    p = sub.add_parser("quantize", help="equal-volume partition points")
    p.add_argument("--ladder", required=True)
    p.add_argument("--two-l", dest="two_l", type=float, default=20.0)
    p.add_argument("--K", type=int, default=6000)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--out")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("meanvalue", help="xi with Z~^2(xi) = |J| / |reverse J|")
    p.add_argument("--ladder", required=True)
    p.add_argument("--T", required=True, help="comma-separated segment starts")
    p.add_argument("--U", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_meanvalue)

    p = sub.add_parser("oscillation", help="compare |reverse J(T,1)|^(-1/2) with the main-sum expression")
    p.add_argument("--ladder", required=True)
    p.add_argument("--T", required=True, help="comma-separated T' values")
    p.add_argument("--out")
    p.set_defaults(func=cmd_oscillation)

    p = sub.add_parser("props", help="properties (A), (B), (C)")
    p.add_argument("--ladder", required=True)
    p.add_argument("--t", default="200000,300000,400000")
    p.add_argument("--two-l", dest="two_l", type=float, default=20.0)
    p.add_argument("--K", default="6000,6010,20000")
    p.add_argument("--out")
    p.set_defaults(func=cmd_props)

    p = sub.add_parser("verify", help="run every check and write report.csv")
    p.add_argument("--ladder", required=True)
    p.add_argument("--report", default="report.csv")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="write a gnuplot script for a CSV produced by another subcommand")
    p.add_argument("--csv", required=True)
    p.add_argument("--column", required=True, help="y column, or 'heat' for a Gram report")
    p.add_argument("--x", default="t")
    p.add_argument("--check", help="only rows whose 'check' column equals this (props output)")
    p.add_argument("--title")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)
    return root


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for sp in ("strict",):
            args.__dict__.setdefault(sp, False)
        with warnings.catch_warnings():
            warnings.simplefilter("error" if args.strict else "default", ConstraintWarning)
            return args.func(args)
    except UsageError as exc:
        print(f"jladder: {exc}", file=sys.stderr)
        return 2
    except ConstraintWarning as exc:
        print(f"jladder: {exc}", file=sys.stderr)
        return 3
    except (LadderError, ValueError, ArithmeticError, MemoryError, OSError) as exc:
        print(f"jladder: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
