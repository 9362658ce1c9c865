import numpy as np
import pytest

from bergman_lab.quadrature import QuadratureSpec


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for res in sorted(RESULTS, key=lambda r: r.number):
            terminalreporter.write_line(res.line())


@pytest.fixture(scope="session")
def quad():
    return QuadratureSpec()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
