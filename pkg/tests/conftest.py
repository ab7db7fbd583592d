import re
import sys
from collections import OrderedDict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import catalog as _catalog  # noqa: E402

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_outcomes: "OrderedDict[int, list]" = OrderedDict()
_titles = {}


@pytest.fixture(scope="session")
def cat():
    return _catalog()


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(n, []).append(report.outcome)


def pytest_collection_modifyitems(items):
    for item in items:
        m = _CRITERION.search(item.nodeid)
        if m and item.function.__doc__:
            _titles.setdefault(int(m.group(1)), item.function.__doc__.strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        status = "PASS" if all(o == "passed" for o in _outcomes[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {_titles.get(n, '')}")
