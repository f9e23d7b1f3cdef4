import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.failed or report.skipped:
        prev = _criteria.get(name)
        if prev != "FAIL":
            _criteria[name] = "FAIL" if report.failed else "SKIP" if report.skipped else "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria):
        num, _, label = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"criterion {int(num):2d} {_criteria[name]:4s} {label.replace('_', ' ')}")


@pytest.fixture
def program_dir(tmp_path):
    files = {
        "loop.lmvm": "#bits 1\n#regs 1\nJMP 0\n",
        "halt.lmvm": "#bits 1\n#regs 1\nLOADI r0, 0\nHALT\n",
        "counter.lmvm": "#bits 1\n#regs 1\n; flip the sign forever\nNEG r0, r0\nJMP 0\n",
    }
    for name, text in files.items():
        (tmp_path / name).write_text(text)
    return tmp_path
