import os

import pytest

# filled by tests/test_acceptance.py; printed once at the end of the run
ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number): acceptance criterion")


@pytest.fixture
def criterion(request):
    """Record (passed, summary) for the acceptance criterion of this test."""
    marker = request.node.get_closest_marker("acceptance")
    number = marker.args[0]

    def record(passed: bool, summary: str):
        ACCEPTANCE[number] = (bool(passed), summary)
        print(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {summary}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {summary}")


@pytest.fixture
def seed():
    return int(os.environ.get("SIGMAGLUE_SEED", "0"))
