import re
from pathlib import Path

import pytest

CURVES_DIR = Path(__file__).resolve().parent.parent / "curves"

_verdicts = pytest.StashKey[list]()


@pytest.fixture
def curves_dir():
    return CURVES_DIR


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for the acceptance criterion named by the test.

    Test names start with ``test_criterion_NN``; parametrized cases each add a
    line and a test that errors before reporting is recorded as FAIL.
    """
    number = int(re.match(r"test_criterion_(\d+)", request.node.name).group(1))
    verdicts = request.config.stash.setdefault(_verdicts, [])
    seen = []

    def report(ok: bool, detail: str):
        seen.append(True)
        verdicts.append((number, bool(ok), detail))
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

    yield report
    if not seen:
        verdicts.append((number, False, f"{request.node.name}: error before a verdict was reached"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = config.stash.get(_verdicts, [])
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(verdicts, key=lambda v: v[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
