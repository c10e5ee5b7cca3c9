import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.failed or report.skipped):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, label = marker
    entry = _criteria.setdefault(number, {"label": label, "ok": True})
    entry["ok"] = entry["ok"] and not (report.failed or report.skipped)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        mark = "PASS" if entry["ok"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {mark}  {entry['label']}")
