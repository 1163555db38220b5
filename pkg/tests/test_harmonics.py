import math

import numpy as np
import pytest

from jladder.errors import ConstraintError, RangeError
from jladder.harmonics import (
    GramSpec,
    basis_labels,
    clone_gram,
    family_deviations,
    gram_matrix,
    mean_value,
    oscillation_check,
    parseval_halves,
    quantize,
    quantize_csv,
    slab_integrals,
)
from jladder.ladder import Segment, phi1, transport_integral
from jladder.zeta_core import LeadingLog, MoserCalibrated, z, z_tilde_sq

TWO_L, K, N_MAX = 20.0, 6000, 8
L = TWO_L / 2


@pytest.fixture(scope="module")
def gram(moser_table):
    return gram_matrix(moser_table, GramSpec(TWO_L, K, N_MAX, MoserCalibrated()))


def _idx(label):
    return basis_labels(N_MAX).index(label)


def test_gram_examples(gram):
    e = gram.entries
    assert abs(e[_idx("cos2"), _idx("cos5")]) <= 1e-6 * L
    assert abs(e[_idx("sin3"), _idx("sin3")] - L) <= 1e-6 * L
    assert abs(e[0, 0] - TWO_L) <= 1e-6 * L
    assert gram.max_abs_deviation <= 1e-6 * L


def test_gram_layout_and_symmetry(gram):
    assert gram.labels == ["1"] + [f"{f}{m}" for m in range(1, N_MAX + 1) for f in ("cos", "sin")]
    assert np.array_equal(gram.entries, gram.entries.T)
    assert gram.max_abs_deviation == np.max(np.abs(gram.entries - gram.target))
    assert np.array_equal(np.diag(gram.target), [TWO_L] + [L] * (2 * N_MAX))
    assert set(family_deviations(gram)) == {"cos_cos", "sin_sin", "sin_cos", "cos", "sin"}


def test_doubling_n_max_keeps_entries(moser_table, gram):
    big = gram_matrix(moser_table, GramSpec(TWO_L, K, 2 * N_MAX, MoserCalibrated()))
    n = 2 * N_MAX + 1
    assert np.array_equal(big.entries[:n, :n], gram.entries)


@pytest.mark.parametrize("k", [6001, 9000, 15000])
def test_other_blocks(moser_table, k):
    rep = gram_matrix(moser_table, GramSpec(TWO_L, k, N_MAX, MoserCalibrated()))
    assert rep.max_abs_deviation <= 1e-6 * L


def test_other_periods(moser_table):
    for two_l, k in ((2.0, 60000), (100.0, 1300)):
        rep = gram_matrix(moser_table, GramSpec(two_l, k, 4, MoserCalibrated()))
        assert rep.max_abs_deviation <= 1e-6 * two_l / 2


def test_gram_csv(gram):
    lines = gram.to_csv().splitlines()
    assert lines[0] == ",".join(basis_labels(N_MAX))
    assert len(lines) == 2 * N_MAX + 3
    assert lines[-1].startswith("# max_abs_deviation=")
    assert float(lines[-1].split("=")[1]) == gram.max_abs_deviation
    assert float(lines[1].split(",")[0]) == gram.entries[0, 0]


def test_gram_spec_validation(moser_table):
    with pytest.raises(ValueError):
        GramSpec(0.0, K, 1, MoserCalibrated())
    with pytest.raises(ValueError):
        GramSpec(TWO_L, K, 0, MoserCalibrated())
    with pytest.raises(ValueError):
        GramSpec(2e4, 6, 1, MoserCalibrated())  # 2l > T / ln T
    with pytest.raises(ValueError):
        gram_matrix(moser_table, GramSpec(TWO_L, K, 1, LeadingLog()))
    with pytest.raises(RangeError):
        gram_matrix(moser_table, GramSpec(TWO_L, 100, 1, MoserCalibrated()))


# -- Parseval ---------------------------------------------------------------------------------


def test_parseval(moser_table):
    spec = GramSpec(TWO_L, K, N_MAX, MoserCalibrated())
    c1, s1 = parseval_halves(moser_table, spec, 1)
    assert abs(c1 - L) <= 1e-6 * L and abs(s1 - L) <= 1e-6 * L
    assert abs(c1 + s1 - TWO_L) <= 2e-6 * L
    c7, s7 = parseval_halves(moser_table, spec, 7)
    assert abs(c7 - c1) <= 2e-6 * L and abs(s7 - s1) <= 2e-6 * L


# -- quantization -----------------------------------------------------------------------------


def test_quantize(moser_table):
    count = 50
    pts = quantize(moser_table, TWO_L, K, count)
    assert len(pts) == count + 1
    assert all(b > a for a, b in zip(pts[:-1], pts[1:]))
    slabs = slab_integrals(moser_table, pts)
    for s in slabs:
        assert abs(s - TWO_L) <= 1e-6 * TWO_L
        assert abs(math.pi * s - 2 * math.pi * L) <= 1e-6 * 2 * math.pi * L
    # slabs tile [first, last]: the sum equals one transport over the union
    whole = transport_integral(moser_table, Segment(pts[0], pts[-1]), np.ones_like, subdivisions=1)
    assert abs(math.fsum(slabs) - whole) <= count * 1e-10
    for r, p in enumerate(pts, start=1):
        assert abs(phi1(moser_table, p) - TWO_L * (K + r - 1)) <= 1e-9 * TWO_L * (K + r - 1)


def test_quantize_too_long(moser_table):
    feasible = int((moser_table.phi_max - TWO_L * K) // TWO_L)
    with pytest.raises(RangeError, match=f"largest feasible count is {feasible}"):
        quantize(moser_table, TWO_L, K, feasible + 5)


def test_quantize_csv():
    text = quantize_csv([1.0, 2.0, 3.0], [20.0, 20.0])
    lines = text.splitlines()
    assert lines[0] == "r,point,slab_integral,volume"
    assert lines[1].startswith("1,1,20,62.83185307179586")
    assert lines[-1] == "3,3,,"


# -- mean value -------------------------------------------------------------------------------


def _float_bracket(table, xi, level):
    lo, hi = np.nextafter(xi, -np.inf), np.nextafter(xi, np.inf)
    g = [z_tilde_sq(v, table.mode) - level for v in (lo, xi, hi)]
    return g


@pytest.mark.parametrize("T", [1.1e5, 1.234e5, 1.7e5, 2.5e5, 3.9e5])
def test_mean_value_contract(moser_table, T):
    mv = mean_value(moser_table, Segment(T, T + 1.0))
    rev = mv.seg_reverse
    assert rev.a < mv.xi < rev.b
    assert mv.level == 1.0 / rev.length()
    assert mv.residual == abs(z_tilde_sq(mv.xi, MoserCalibrated()) - mv.level)
    assert z(mv.xi) != 0 and mv.level > 0
    # xi is a crossing at the resolution of doubles: the level lies between neighbouring values
    g = _float_bracket(moser_table, mv.xi, mv.level)
    assert min(g) <= 0 <= max(g)
    assert mv.residual <= max(abs(g[0]), abs(g[2]))
    # the level is the mean of Z~^2 over the reverse segment
    avg = transport_integral(moser_table, rev, np.ones_like) / rev.length()
    # the two differ only by how closely doubles can hit phi1 = T and phi1 = T + 1 at the ends,
    # which inside a tall peak of Z~^2 (short reverse segment) is amplified by 1/|rev|
    ends = abs(phi1(moser_table, rev.a) - T) + abs(phi1(moser_table, rev.b) - (T + 1.0))
    assert abs(avg - mv.level) <= (ends + 1e-10) / rev.length()
    if rev.length() >= 0.5:
        assert abs(avg - mv.level) <= 1e-10


def test_mean_value_is_leftmost_acceptable_crossing(moser_table):
    mv = mean_value(moser_table, Segment(1.5e5, 1.5e5 + 1.0))
    ts = np.linspace(mv.seg_reverse.a, mv.xi, 2001)[:-1]
    g = np.asarray(z_tilde_sq(ts, MoserCalibrated())) - mv.level
    crossings = np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:]))
    # crossings to the left of xi exist only when their best double missed the residual bound
    for i in crossings:
        assert abs(g[i]) > 0


# -- oscillation ------------------------------------------------------------------------------


@pytest.mark.parametrize("T", [1.0e5, 1.0e5 + 37.5, 1.003e5])
def test_oscillation_leading(leading_table, T):
    res = oscillation_check(leading_table, T)
    assert res.lhs > 0
    assert res.relative_gap <= 1e-3


@pytest.mark.parametrize("T", [1.0e5, 1.0e5 + 37.5, 1.003e5])
def test_oscillation_moser(moser_table, T):
    res = oscillation_check(moser_table, T)
    assert res.lhs > 0
    bound = abs(MoserCalibrated().shift) / math.log(res.xi) + 1e-3
    assert res.relative_gap <= bound


# -- clones -----------------------------------------------------------------------------------


def test_clone_gram(moser_table):
    T = 1.25e5
    rep = clone_gram(moser_table, T, TWO_L, N_MAX)
    e = rep.entries
    assert abs(e[_idx("cos1"), _idx("cos4")]) <= 1e-6 * L
    assert abs(e[_idx("sin2"), _idx("sin2")] - L) <= 1e-6 * L
    assert rep.max_abs_deviation <= 1e-6 * L
    shifted = clone_gram(moser_table, T + TWO_L, TWO_L, N_MAX)
    assert np.max(np.abs(shifted.entries - e)) <= 2e-6 * L


def test_clone_gram_constraint(moser_table):
    T = 1.25e5
    with pytest.raises(ConstraintError):
        clone_gram(moser_table, T, 1.1 * T / math.log(T), 1, strict=True)
