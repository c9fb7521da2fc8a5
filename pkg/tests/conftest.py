import sys
from pathlib import Path

import pytest

from dhpf import read_graph

import oracles

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def seven_path():
    return DATA / "seven.graph"


@pytest.fixture(scope="session")
def seven(seven_path):
    return read_graph(seven_path)


@pytest.fixture(scope="session")
def corpus():
    return oracles.corpus()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
