import re

import numpy as np
import pytest

from entdist import _kernels

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture(params=["numba", "numpy"])
def backend(request):
    """Name of a kernel backend; numba is skipped when it is unavailable."""
    if request.param == "numba" and not _kernels.HAVE_NUMBA:
        pytest.skip("numba not installed")
    return request.param


@pytest.fixture
def report():
    """Record a one-line verdict for an acceptance criterion."""

    def _report(key: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES[key] = f"criterion {key:<4} {'PASS' if ok else 'FAIL'}  {detail}"
        print(ACCEPTANCE_LINES[key])

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
