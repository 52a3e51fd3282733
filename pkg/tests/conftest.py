import numpy as np
import pytest
from hypothesis import settings

from kstar.verify import K_DEEP, K_GENERIC, K_MINUS, K_PLUS, K_ZERO  # noqa: F401
from kstar.weyl import HbarConfig
from kstar.words import default_grid

settings.register_profile("kstar", max_examples=30, deadline=None)
settings.load_profile("kstar")

H1 = HbarConfig(1.0)


def mx(a) -> float:
    return float(np.max(np.abs(np.asarray(a))))


@pytest.fixture(scope="session")
def grid():
    return default_grid()


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
