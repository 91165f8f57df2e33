"""Per-criterion summary for tests marked ``acceptance(number, title)``."""

import pytest

_CRITERIA = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            number, title = mark.args
            _CRITERIA.setdefault(number, {"title": title, "ids": set(), "failed": False,
                                          "ran": False, "notes": []})
            _CRITERIA[number]["ids"].add(item.nodeid)


def pytest_runtest_logreport(report):
    for crit in _CRITERIA.values():
        if report.nodeid in crit["ids"]:
            if report.failed:
                crit["failed"] = True
            if report.when == "call":
                crit["ran"] = True
                crit["notes"] += [v for k, v in report.user_properties if k == "note"]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        crit = _CRITERIA[number]
        if crit["failed"]:
            verdict = "FAIL"
        elif crit["ran"]:
            verdict = "PASS"
        else:
            verdict = "NOT RUN"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {crit['title']}")
        for note in crit["notes"]:
            terminalreporter.write_line(f"    {note}")


@pytest.fixture
def note(record_property):
    """Attach a line to this criterion's summary."""
    return lambda text: record_property("note", text)
