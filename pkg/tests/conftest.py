from fractions import Fraction

import pytest

from peeltri.sampler import psht_ball_counts

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}

_BALLS: dict = {}

BALL_SEED = 20240611
BALL_N = 100_000


def ball_counts(h: Fraction, n: int = BALL_N, seed: int = BALL_SEED):
    """Radius-1 ball code frequencies, sampled once per session."""
    key = (h, n, seed)
    if key not in _BALLS:
        _BALLS[key] = psht_ball_counts(h, 1, n, seed)
    return _BALLS[key]


@pytest.fixture
def record_acceptance():
    def record(k: int, ok: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[k] = (ok, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")
