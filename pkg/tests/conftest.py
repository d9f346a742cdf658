"""Collects the acceptance verdicts and prints one line per criterion at the end of the run."""

import pytest

VERDICTS: dict[int, tuple[str, str]] = {}


@pytest.fixture
def criterion(request):
    """Record ``(number, detail)`` for the summary; the verdict follows the test outcome."""
    box = {}

    def record(number: int, detail: str = ""):
        box["n"], box["detail"] = number, detail

    yield record
    if "n" in box:
        rep = getattr(request.node, "rep_call", None)
        ok = rep is not None and rep.passed
        VERDICTS[box["n"]] = ("PASS" if ok else "FAIL", box["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(VERDICTS):
        verdict, detail = VERDICTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {detail}")
