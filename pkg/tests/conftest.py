from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parents[1] / "src" / "pinet" / "data"

# criterion number -> (title, outcome, detail)
_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.fixture
def fixture_config() -> Path:
    return DATA / "fixture.toml"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or "criterion" not in marker.kwargs:
        return
    n = marker.kwargs["criterion"]
    title = marker.kwargs.get("title", item.name)
    if report.when == "setup" and report.skipped:
        _ACCEPTANCE[n] = (title, "SKIP", str(report.longrepr[-1]))
    elif report.when == "call":
        if report.skipped:
            _ACCEPTANCE[n] = (title, "SKIP", str(report.longrepr[-1]))
        else:
            detail = getattr(item, "acceptance_detail", "")
            _ACCEPTANCE[n] = (title, "PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[n]
        line = f"criterion {n} [{status}] {title}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
