"""Per-criterion pass/fail summary for the acceptance suite."""

from collections import defaultdict

import pytest

_outcomes = defaultdict(list)
_details = defaultdict(list)
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def _marker(item):
    return item.get_closest_marker("criterion")


@pytest.fixture
def report(request):
    """Attach a measured value to the criterion line of the running test."""
    number = _marker(request.node).args[0]

    def add(text):
        _details[number].append(text)

    return add


def pytest_runtest_setup(item):
    m = _marker(item)
    if m:
        _titles[m.args[0]] = m.args[1]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _marker(item)
    if m and (rep.when == "call" or rep.failed):
        _outcomes[m.args[0]].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        status = "PASS" if all(_outcomes[number]) else "FAIL"
        detail = "; ".join(_details[number])
        line = f"criterion {number:>2} {status}  {_titles[number]}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
