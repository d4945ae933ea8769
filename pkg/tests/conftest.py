from __future__ import annotations

import json
from pathlib import Path

import pytest

from unseentimeqa.dataset import GenerationConfig, generate_dataset
from unseentimeqa.planning import generate_scenario

FIXTURE_PATH = Path(__file__).parent / "data" / "reference_records.json"


@pytest.fixture(scope="session")
def scenarios():
    return tuple(generate_scenario(k) for k in range(10))


@pytest.fixture(scope="session")
def reference():
    """Hand-checked rendered records with their expected answer sets."""
    return json.loads(FIXTURE_PATH.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def built_dataset(tmp_path_factory):
    """One full default-configuration dataset, built once per session."""
    out = tmp_path_factory.mktemp("dataset")
    manifest = generate_dataset(GenerationConfig(out_dir=str(out)))
    return out, manifest
