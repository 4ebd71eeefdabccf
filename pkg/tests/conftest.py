from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
DATA = FIXTURES / "data"
SPECS = FIXTURES / "specs"
ALIGNMENTS = FIXTURES / "alignments"

# the oracles module lives next to the tests, not in the package
sys.path.insert(0, str(TESTS))

# data directories holding dbpedia.nt, geonames.nt and gold.nt
CITY_FIXTURES = ["cities10", "cities3", "cities-noisy"]


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
