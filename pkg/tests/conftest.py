import pytest

from sirlock import baseline_params

_acceptance_lines = []


@pytest.fixture(scope="session")
def baseline():
    return baseline_params()


@pytest.fixture()
def p(baseline):
    return baseline[0]


@pytest.fixture()
def c(baseline):
    return baseline[1]


@pytest.fixture()
def init(baseline):
    return baseline[2]


@pytest.fixture(scope="session")
def verdict():
    """Record one PASS/FAIL line per acceptance check and assert it."""

    def record(num: int, ok: bool, detail: str):
        line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}"
        _acceptance_lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance checks")
        for line in _acceptance_lines:
            terminalreporter.line(line)
