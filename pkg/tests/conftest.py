import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body sets ``detail`` and asserts."""
    entry = {"name": request.node.name, "detail": "", "ok": False}
    _ACCEPTANCE.append(entry)

    def report(detail, ok):
        entry["detail"] = detail
        entry["ok"] = bool(ok)
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for e in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if e['ok'] else 'FAIL'}  {e['name']}: {e['detail']}")
