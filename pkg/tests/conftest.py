import pytest

from wmmr.litmus import load_corpus

_CRITERIA: dict = {}


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the summary."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        _CRITERIA[number] = (title, ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[n]
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
