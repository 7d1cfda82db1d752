import pytest

from oracles import bytearray_sieve, gaps_below


@pytest.fixture(scope="session")
def oracle_primes_1e6():
    return bytearray_sieve(10**6)


@pytest.fixture(scope="session")
def oracle_gaps_1e5():
    return gaps_below(10**5)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"{name}: {'PASS' if outcome == 'passed' else 'FAIL'}")
