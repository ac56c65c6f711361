"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""
import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not report.failed:
        return
    number, title = marker.args
    measured = "; ".join(str(v) for k, v in item.user_properties if k == "measured")
    entry = _RESULTS.setdefault(number, {"title": title, "passed": True, "measured": ""})
    entry["passed"] = entry["passed"] and report.passed
    if measured:
        entry["measured"] = measured


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["passed"] else "FAIL"
        line = f"[{status}] criterion {number}: {entry['title']}"
        if entry["measured"]:
            line += f" ({entry['measured']})"
        terminalreporter.write_line(line)
