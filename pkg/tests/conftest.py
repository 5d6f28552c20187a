import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_acceptance: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        doc = getattr(report, "acceptance_doc", "")
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome.upper(), doc))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    doc = (item.obj.__doc__ or "").strip().splitlines()
    report.acceptance_doc = doc[0] if doc else ""


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, doc in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'PASSED' else 'FAIL'}  {name}  {doc}")


@pytest.fixture(scope="session")
def corpus(tmp_path_factory):
    from fixscore.synthetic import write_corpus

    return write_corpus(tmp_path_factory.mktemp("corpus"), n=30, seed=0)
