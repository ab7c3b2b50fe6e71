import warnings

import pytest

from nonconvex.cli import default_dataset, parse_tuple_file

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def eng459():
    path = default_dataset()
    if not path.exists():
        pytest.skip(f"(459,3242) dataset not found at {path}; set CONSTELLATION_DATA_DIR")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return parse_tuple_file(path).tuples


@pytest.fixture(scope="session")
def s4(eng459):
    return eng459[4]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
