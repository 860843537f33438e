from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"

# criterion number -> list of (test id, passed)
_CRITERIA: dict[int, list[tuple[str, bool]]] = {}
_TITLES: dict[int, str] = {}


def load_table(name: str) -> np.ndarray:
    with open(DATA / name, newline="") as fh:
        rows = list(csv.reader(fh))
    body = np.array([[int(x) for x in r] for r in rows[1:]], dtype=np.int64)
    assert (body[:, 0] == np.arange(1, len(body) + 1)).all()
    return body[:, 1:]


@pytest.fixture(scope="session")
def golden_code() -> np.ndarray:
    return load_table("golden_112_code.csv")


@pytest.fixture(scope="session")
def golden_design() -> np.ndarray:
    return load_table("golden_112_design.csv")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    num, title = crit
    _TITLES[num] = title
    _CRITERIA.setdefault(num, []).append((report.nodeid, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        results = _CRITERIA[num]
        failed = [nid for nid, ok in results if not ok]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {num}: {status}  {_TITLES[num]} ({len(results) - len(failed)}/{len(results)} checks)")
        for nid in failed:
            tr.write_line(f"    failed: {nid}")
