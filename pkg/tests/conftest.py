import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("ragc", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ragc")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# -- acceptance summary: one line per criterion ------------------------------------

_CRITERIA = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.nodeid.startswith("tests/test_acceptance.py::test_criterion_"):
            doc = (item.function.__doc__ or "").strip().splitlines()
            _CRITERIA[item.nodeid] = {"title": doc[0] if doc else item.name, "outcome": "NOT RUN", "notes": []}


def pytest_runtest_logreport(report):
    entry = _CRITERIA.get(report.nodeid)
    if entry is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["outcome"] = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        entry["notes"] = [v for k, v in report.user_properties if k == "note"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_CRITERIA):
        e = _CRITERIA[nodeid]
        num = nodeid.split("test_criterion_")[1][:2]
        terminalreporter.write_line(f"criterion {int(num):>2}: {e['outcome']:<7} {e['title']}")
        for note in e["notes"]:
            terminalreporter.write_line(f"              {note}")
