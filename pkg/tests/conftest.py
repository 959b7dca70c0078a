import numpy as np
import pytest

from ridgelab.fields import Grid, SampledField


def gaussian(pts):
    return np.exp(-0.5 * np.sum(pts * pts, axis=1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gauss1d():
    return SampledField.from_function(gaussian, Grid(((-8.0, 8.0, 401),)))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one status line per acceptance criterion; printed again in the terminal summary."""
    state = {}

    def report(cid, passed, detail):
        line = f"{cid} {'PASS' if passed else 'FAIL'}: {detail}"
        state["line"] = line
        print(line, flush=True)
        return passed

    yield report
    if "line" in state:
        ACCEPTANCE_LINES.append(state["line"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0][1:])):
            terminalreporter.write_line(line)
