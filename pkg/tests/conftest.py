import contextlib

import numpy as np
import pytest

_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Context manager that records PASS/FAIL for a numbered criterion."""

    @contextlib.contextmanager
    def record(number, name):
        try:
            yield
        except BaseException:
            _ACCEPTANCE[number] = (name, "FAIL")
            print(f"criterion {number:2d} {name}: FAIL")
            raise
        _ACCEPTANCE[number] = (name, "PASS")
        print(f"criterion {number:2d} {name}: PASS")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number:2d}: {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
