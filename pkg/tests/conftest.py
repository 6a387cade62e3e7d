from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from croissant_local import SemanticMetadata  # noqa: E402


@pytest.fixture
def semantic() -> SemanticMetadata:
    return SemanticMetadata(name="Fixture Dataset")


# --- acceptance reporting -----------------------------------------------------
# Tests marked ``acceptance(n, title)`` get one PASS/FAIL line each in the
# terminal summary, independent of output capturing.

_criteria: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    number, title = marker.args[0], marker.args[1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        detail = getattr(item, "acceptance_detail", "")
        _criteria[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title, detail = _criteria[number]
        line = f"criterion {number:>2} {status}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)


@pytest.fixture
def report(request):
    """Attach a short measured-value note to the criterion's summary line."""

    def note(text: str) -> None:
        request.node.acceptance_detail = text
        print(text)

    return note
