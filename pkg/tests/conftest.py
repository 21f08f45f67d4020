from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from licenserec.catalog import default_catalog  # noqa: E402
from licenserec.lineage import close_dataset_to_repo, ingest_records  # noqa: E402
from licenserec.matrix import default_matrix  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


@pytest.fixture(scope="session")
def matrix():
    return default_matrix()


@pytest.fixture(scope="session")
def eu_matrix():
    return default_matrix("eu-jla-style")


@pytest.fixture(scope="session")
def peat_matrix():
    return default_matrix("peatmoss-style")


def graph_of(dumps, closure: bool = True, **kwargs):
    result = ingest_records(dumps.datasets, dumps.models, dumps.repos, **kwargs)
    return close_dataset_to_repo(result.graph) if closure else result.graph


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
