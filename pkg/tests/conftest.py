import os
import random
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from oracles import SEED  # noqa: E402

settings.register_profile("squadkit", deadline=None, print_blob=True)
settings.load_profile("squadkit")


def pytest_report_header(config):
    return f"SQUADKIT_SEED={SEED}"


@pytest.fixture(scope="session", autouse=True)
def _announce_seed():
    print(f"\nSQUADKIT_SEED={SEED}")


@pytest.fixture
def rng(request):
    # one stream per test, derived from the session seed and the test id
    return random.Random(f"{SEED}:{request.node.nodeid}")


# one line per acceptance criterion at the end of the run
_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    num = name.split("_")[2]
    if report.when == "call" or report.outcome != "passed":
        if hasattr(report, "wasxfail"):
            status = "XFAIL"
        else:
            status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        prev = _criteria.get(num, [])
        prev.append((name, status, report.duration))
        _criteria[num] = prev


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_criteria, key=int):
        runs = _criteria[num]
        statuses = [s for _, s, _ in runs]
        if "FAIL" in statuses:
            status = "FAIL"
        elif "PASS" in statuses and "XFAIL" in statuses:
            status = "PARTIAL"
        elif "PASS" in statuses:
            status = "PASS"
        else:
            status = statuses[0]
        total = sum(d for _, _, d in runs)
        notes = [f"{n} {s}" for n, s, _ in runs if s not in ("PASS", status)]
        notes += [f"{n} FAIL" for n, s, _ in runs if s == "FAIL"]
        extra = f"  [{'; '.join(dict.fromkeys(notes))}]" if notes else ""
        tr.write_line(f"criterion {num}: {status:<7} {len(runs)} test(s) {total:7.2f}s{extra}")
