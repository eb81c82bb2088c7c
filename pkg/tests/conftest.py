import sys
from pathlib import Path

import pytest

# make tests/oracles.py importable regardless of invocation directory
sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def small_corpus():
    from excellence.corpus import load_corpus

    return load_corpus(DATA / "smallcorpus.csv").corpus


def pytest_terminal_summary(terminalreporter):
    # acceptance tests record one line per criterion; show them after
    # capture is torn down so they survive default capture modes
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "_REPORTED", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.line(line)
