import csv
import io
import shutil

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jladder.cli import RunConfig, main
from jladder.ladder import QuadratureConfig
from jladder.zeta_core import CustomShift, LeadingLog, MoserCalibrated

SMALL = ["--anchor-t", "1e5", "--anchor-phi", "1e5", "--t-max", "100300", "--mode", "moser"]

VERIFY_ROWS = {
    "table_integrity", "parseval", "quantization_slabs", "quantization_volume", "unit_transport",
    "transport_identity", "mean_value", "oscillation_moser", "A", "B", "C",
    *(f"orthogonality_{f}" for f in ("cos_cos", "sin_sin", "sin_cos", "cos", "sin")),
}


def _rows(text):
    return list(csv.DictReader(io.StringIO("\n".join(l for l in text.splitlines() if not l.startswith("#")))))


@pytest.fixture(scope="module")
def small_ladder(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "small.csv"
    assert main(["ladder", "build", *SMALL, "--out", str(path)]) == 0
    return path


def test_build_summary_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["ladder", "build", *SMALL, "--out", str(a)]) == 0
    out = capsys.readouterr().out
    assert out.strip().startswith("built ladder [100000,100300] checkpoints=")
    assert out.strip().endswith("mode=moser")
    assert main(["ladder", "build", *SMALL, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]


def test_build_auto_anchor(tmp_path, capsys):
    out = tmp_path / "auto.csv"
    assert main(["ladder", "build", "--anchor-t", "1e5", "--anchor-phi", "auto", "--t-max", "100010",
                 "--mode", "leading", "--out", str(out)]) == 0
    head = out.read_text().splitlines()[0]
    assert "anchor_phi=95944.652657735" in head and "mode=leading" in head


@pytest.mark.parametrize("argv", [
    ["ladder", "build", "--anchor-t", "1e5", "--t-max", "9e4"],
    ["ladder", "build", "--anchor-t", "1e5", "--t-max", "100000.5"],
    ["ladder", "build", "--anchor-t", "abc", "--t-max", "2e5"],
    ["ladder", "build", "--anchor-t", "1e5", "--t-max", "2e5", "--mode", "bogus"],
    ["ladder", "build", "--anchor-t", "1e5", "--t-max", "2e5", "--anchor-phi", "sometimes"],
    ["ladder", "build", "--anchor-t", "1e5", "--t-max", "2e5", "--panel-width", "0.9"],
    ["frobnicate"],
])
def test_flag_errors_exit_2_without_output(tmp_path, argv, capsys):
    out = tmp_path / "x.csv"
    assert main([*argv, "--out", str(out)]) == 2
    assert not out.exists()
    assert capsys.readouterr().err.startswith("jladder:")


def test_numeric_failure_exits_3(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["ladder", "build", "--anchor-t", "150", "--t-max", "300", "--anchor-phi", "0",
                 "--out", str(out)]) == 3
    assert not out.exists()


def test_eval_and_invert(small_ladder, tmp_path):
    ev = tmp_path / "ev.csv"
    assert main(["ladder", "eval", "--ladder", str(small_ladder), "--t", "100000,100150.5", "--out", str(ev)]) == 0
    rows = _rows(ev.read_text())
    assert float(rows[0]["phi1"]) == 1e5
    x = float(rows[1]["phi1"])
    inv = tmp_path / "inv.csv"
    assert main(["ladder", "invert", "--ladder", str(small_ladder), "--x", repr(x), "--out", str(inv)]) == 0
    r = _rows(inv.read_text())[0]
    assert abs(float(r["t"]) - 100150.5) < 1e-6
    assert main(["ladder", "invert", "--ladder", str(small_ladder), "--x", "1e9"]) == 3


def test_z_tabulate(tmp_path, small_ladder):
    out = tmp_path / "z.csv"
    assert main(["z", "tabulate", "--t0", "1e5", "--t1", "100050", "--step", "0.5", "--ladder",
                 str(small_ladder), "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert len(rows) == 101
    assert set(rows[0]) == {"t", "theta", "z", "z_tilde_sq", "phi1"}
    assert all(float(r["z_tilde_sq"]) >= 0 for r in rows)
    assert main(["z", "tabulate", "--t0", "100", "--t1", "300"]) == 3


def test_gram_quantize_mean_oscillation_props(moser_file, tmp_path):
    lad = str(moser_file)
    g = tmp_path / "g.csv"
    assert main(["gram", "--ladder", lad, "--two-l", "20", "--K", "6000", "--n-max", "3", "--out", str(g)]) == 0
    text = g.read_text().splitlines()
    assert text[0] == "1,cos1,sin1,cos2,sin2,cos3,sin3" and text[-1].startswith("# max_abs_deviation=")
    c = tmp_path / "c.csv"
    assert main(["clone-gram", "--ladder", lad, "--T", "125000", "--n-max", "2", "--out", str(c)]) == 0
    q = tmp_path / "q.csv"
    assert main(["quantize", "--ladder", lad, "--count", "5", "--out", str(q)]) == 0
    qr = _rows(q.read_text())
    assert list(qr[0]) == ["r", "point", "slab_integral", "volume"] and len(qr) == 6
    assert main(["quantize", "--ladder", lad, "--count", "100000000"]) == 3
    m = tmp_path / "m.csv"
    assert main(["meanvalue", "--ladder", lad, "--T", "150000,200000", "--out", str(m)]) == 0
    assert len(_rows(m.read_text())) == 2
    o = tmp_path / "o.csv"
    assert main(["oscillation", "--ladder", lad, "--T", "100000", "--out", str(o)]) == 0
    assert float(_rows(o.read_text())[0]["relative_gap"]) < 0.03
    p = tmp_path / "p.csv"
    assert main(["props", "--ladder", lad, "--out", str(p)]) == 0
    pr = _rows(p.read_text())
    assert list(pr[0]) == ["t", "check", "value", "ratio", "pass"]
    assert {r["check"] for r in pr} == {"A", "B", "C"}
    assert all(r["pass"] == "true" for r in pr)


def test_strict_escalates(moser_file):
    argv = ["clone-gram", "--ladder", str(moser_file), "--T", "125000", "--two-l", "12000", "--n-max", "1"]
    assert main(["--strict", *argv]) == 3


def test_plot(tmp_path, small_ladder, moser_file, capsys):
    z_csv = tmp_path / "z.csv"
    assert main(["z", "tabulate", "--t0", "1e5", "--t1", "100050", "--step", "0.1", "--out", str(z_csv)]) == 0
    script = tmp_path / "z.gp"
    assert main(["plot", "--csv", str(z_csv), "--column", "z", "--out", str(script)]) == 0
    s = script.read_text()
    assert "using 1:3" in s and str(z_csv) in s
    props = tmp_path / "p.csv"
    assert main(["props", "--ladder", str(moser_file), "--out", str(props)]) == 0
    ps = tmp_path / "p.gp"
    assert main(["plot", "--csv", str(props), "--column", "ratio", "--check", "A", "--out", str(ps)]) == 0
    assert "1.0 with lines" in ps.read_text()
    bad = tmp_path / "bad.gp"
    assert main(["plot", "--csv", str(z_csv), "--column", "q", "--out", str(bad)]) == 2
    assert not bad.exists()


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nanchor_t = 1e5\nanchor_phi = 1e5\nt_max = 100100\nmode = leading\n")
    out = tmp_path / "l.csv"
    assert main(["ladder", "build", "--config", str(cfg), "--mode", "moser", "--out", str(out)]) == 0
    head = out.read_text().splitlines()[0]
    assert "mode=moser" in head and "anchor_t=100000" in head
    cfg.write_text("anchor_t = 1e5\nbogus_key = 3\n")
    assert main(["ladder", "build", "--config", str(cfg), "--out", str(out)]) == 2


@settings(max_examples=100, deadline=None)
@given(
    st.sampled_from([LeadingLog(), MoserCalibrated(), CustomShift(0.25)]),
    st.floats(300.0, 1e6),
    st.one_of(st.just("auto"), st.floats(-1e6, 1e6)),
    st.floats(2.0, 1e6),
    st.sampled_from([0.05, 0.25, 0.5]),
    st.integers(4, 20),
    st.integers(1, 256),
    st.booleans(),
)
def test_run_config_round_trip(mode, anchor_t, anchor_phi, span, pw, order, stride, strict):
    cfg = RunConfig(mode, anchor_t, anchor_phi, anchor_t + span, QuadratureConfig(pw, order, stride), strict)
    assert RunConfig.from_text(cfg.to_text()) == cfg


def test_verify_coverage_and_exit(verify_reports):
    codes, texts = verify_reports
    rows = _rows(texts[0])
    assert {r["check"] for r in rows} == VERIFY_ROWS
    assert list(rows[0]) == ["check", "target", "actual", "tolerance", "pass"]
    failed = {r["check"] for r in rows if r["pass"] != "true"}
    assert codes[0] == (1 if failed else 0)


def test_verify_detects_tampering(moser_file, tmp_path):
    bad = tmp_path / "tampered.csv"
    shutil.copy(moser_file, bad)
    lines = bad.read_text().splitlines()
    k = len(lines) // 3
    t, p = lines[k].split(",")
    lines[k] = f"{t},{float(p) + 1e-6!r}"
    bad.write_text("\n".join(lines) + "\n")
    report = tmp_path / "r.csv"
    assert main(["verify", "--ladder", str(bad), "--report", str(report)]) == 1
    rows = {r["check"]: r for r in _rows(report.read_text())}
    assert rows["table_integrity"]["pass"] == "false"


def test_verify_missing_ladder(tmp_path):
    assert main(["verify", "--ladder", str(tmp_path / "none.csv"), "--report", str(tmp_path / "r.csv")]) == 3
