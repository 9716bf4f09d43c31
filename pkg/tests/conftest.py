import numpy as np
import pytest

from lagsbox import TABLE2_CONFIG, bundled_fixture, full_report


@pytest.fixture(scope="session")
def table2_box():
    return bundled_fixture("table2")


@pytest.fixture(scope="session")
def aes_box():
    return bundled_fixture("aes")


@pytest.fixture(scope="session")
def table2_report(table2_box):
    return full_report(table2_box)


@pytest.fixture(scope="session")
def aes_report(aes_box):
    return full_report(aes_box)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def table2_config():
    return TABLE2_CONFIG


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
