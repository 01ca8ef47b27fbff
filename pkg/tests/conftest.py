from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mutsum.corpus import ingest_directory

REPO_ROOT = Path(__file__).resolve().parent.parent
DEMO_PROGRAMS = REPO_ROOT / "demo" / "programs"
DEMO_SUMMARIES = REPO_ROOT / "demo" / "summaries"
DEMO_VERDICTS = REPO_ROOT / "demo" / "verdicts"
FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


@pytest.fixture(scope="session")
def demo_programs():
    result = ingest_directory(DEMO_PROGRAMS)
    assert not result.rejected
    return result.programs


@pytest.fixture()
def demo_program_by_id(demo_programs):
    return {p.id: p for p in demo_programs}
