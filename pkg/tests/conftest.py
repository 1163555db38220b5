import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from jladder.ladder import build_ladder, save_ladder  # noqa: E402
from jladder.primes import build_sieve, moser_anchor_phi  # noqa: E402
from jladder.zeta_core import LeadingLog, MoserCalibrated  # noqa: E402

DEFAULT_ANCHOR = 1e5
DEFAULT_T_MAX = 4.2e5

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sieve():
    return build_sieve()


BUILD_SECONDS: dict[str, float] = {}


@pytest.fixture(scope="session")
def moser_table(sieve):
    """The default ladder: anchor 1e5 at the prime-count anchor, moser weight, up to 4.2e5."""
    t0 = time.perf_counter()
    table = build_ladder(DEFAULT_ANCHOR, moser_anchor_phi(DEFAULT_ANCHOR, sieve), DEFAULT_T_MAX, MoserCalibrated())
    BUILD_SECONDS["moser"] = time.perf_counter() - t0
    return table


@pytest.fixture(scope="session")
def leading_table(sieve):
    return build_ladder(DEFAULT_ANCHOR, moser_anchor_phi(DEFAULT_ANCHOR, sieve), 1.07e5, LeadingLog())


@pytest.fixture(scope="session")
def short_table():
    """A cheap ladder for property tests: [1e5, 1e5 + 600] anchored at phi = 1e5."""
    return build_ladder(1e5, 1e5, 1e5 + 600.0, MoserCalibrated())


@pytest.fixture(scope="session")
def moser_file(moser_table, tmp_path_factory):
    path = tmp_path_factory.mktemp("ladder") / "ladder.csv"
    save_ladder(moser_table, path)
    return path


@pytest.fixture(scope="session")
def verify_reports(moser_file, tmp_path_factory):
    """Two independent `verify` runs on the default ladder: (exit codes, report texts)."""
    from jladder.cli import main

    out = tmp_path_factory.mktemp("verify")
    codes, texts = [], []
    for k in range(2):
        report = out / f"report{k}.csv"
        codes.append(main(["verify", "--ladder", str(moser_file), "--report", str(report)]))
        texts.append(report.read_text())
    return codes, texts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
