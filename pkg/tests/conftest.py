import pathlib
import re

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

_ACCEPTANCE = []


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def acceptance():
    """Record one acceptance line: record(cid, title, passed, detail)."""

    def record(cid, title, passed, detail=""):
        _ACCEPTANCE.append((cid, title, bool(passed), detail))
        return bool(passed)

    return record


def _order(row):
    cid = row[0]
    return int(re.match(r"\d+", cid).group()), cid


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, title, ok, detail in sorted(_ACCEPTANCE, key=_order):
        status = "PASS" if ok else "FAIL"
        line = f"[{status}] criterion {cid}: {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
