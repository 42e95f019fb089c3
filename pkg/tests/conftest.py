import json
from pathlib import Path

import pytest

from methlib import ingest
from methlib.model import Library

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture()
def seed_batch() -> dict:
    return json.loads((FIXTURES / "seed_batch.json").read_text(encoding="utf-8"))


@pytest.fixture()
def seed_manifest() -> dict:
    return json.loads((FIXTURES / "seed_manifest.json").read_text(encoding="utf-8"))


@pytest.fixture()
def seed_lib(seed_batch) -> Library:
    lib = Library()
    report = ingest.import_batch(lib, seed_batch)
    assert not report.rejected
    return lib


def by_name(lib: Library, name: str):
    matches = lib.components_named(name)
    assert len(matches) == 1, f"expected exactly one component named {name!r}"
    return matches[0]
