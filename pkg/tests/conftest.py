import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> {"title": str, "outcomes": [(test name, passed, detail)]}
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.fixture
def note(request):
    """Attach a one-line measurement to the acceptance summary."""
    def add(text):
        request.node.user_properties.append(("note", text))
    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        passed = rep.passed and not hasattr(rep, "wasxfail")
        notes = "; ".join(v for k, v in item.user_properties if k == "note")
        if hasattr(rep, "wasxfail"):
            notes = (notes + "; " if notes else "") + "known shortfall: " + rep.wasxfail
        entry = _CRITERIA.setdefault(number, {"title": title, "outcomes": []})
        entry["outcomes"].append((item.name, passed, notes))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        ok = all(p for _, p, _ in entry["outcomes"])
        notes = " | ".join(n for _, _, n in entry["outcomes"] if n)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d} {entry['title']}" + (f" :: {notes}" if notes else ""))
