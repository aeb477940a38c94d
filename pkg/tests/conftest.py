from collections import defaultdict

import pytest

_RESULTS = defaultdict(list)


@pytest.fixture
def criterion():
    """``criterion(k, ok, detail)`` records one checked part of acceptance criterion k."""

    def record(k, ok, detail):
        _RESULTS[k].append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_RESULTS):
        parts = _RESULTS[k]
        ok = all(p[0] for p in parts)
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}")
        for good, detail in parts:
            tr.write_line(f"    {'ok  ' if good else 'FAIL'} {detail}")
