import pytest

from oracles import EXPR_CORPUS, MEASURE_CORPUS
from stieltjes import functions


@pytest.fixture(params=range(len(MEASURE_CORPUS)), ids=lambda i: f"measure{i}")
def measure_fn(request):
    raw, order = MEASURE_CORPUS[request.param]
    return functions.from_measure(raw, order)


@pytest.fixture(params=EXPR_CORPUS)
def expr_fn(request):
    return functions.from_expr(request.param)


# -- acceptance reporting ------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion exit check")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "ran": 0})
    entry["ran"] += 1
    if call.excinfo is not None:
        entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {e['title']} ({e['ran']} checks)")
