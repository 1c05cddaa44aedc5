import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import corpusgen  # noqa: E402


@pytest.fixture(scope="session")
def corpus_small():
    """600 synthetic sentences; enough for structural property tests."""
    return corpusgen.make_corpus(600, seed=11)


@pytest.fixture(scope="session")
def corpus_medium():
    """3k sentences with the default reconstructed/mantra mix."""
    return corpusgen.make_corpus(3000, seed=7)


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.skipped:
        status = "SKIP"
    elif report.when == "call":
        status = "PASS" if report.passed else "FAIL"
    elif report.failed:
        status = "FAIL"
    else:
        return
    print(f"\n[ACCEPTANCE] {name}: {status}", flush=True)
