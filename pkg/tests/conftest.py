#!/usr/bin/env python3

import pytest
from pathlib import Path
from src.extraction.file_reader import load_interactions, load_triples
from src.models.config import RunConfig
from tests.helpers import FIXTURES, toy_run_config


@pytest.fixture
def interactions_path() -> Path:
    return FIXTURES / "toy_interactions.txt"


@pytest.fixture
def kg_path() -> Path:
    return FIXTURES / "toy_kg.txt"


@pytest.fixture
def toy_data(interactions_path, kg_path):
    interactions, maps = load_interactions(interactions_path)
    kg, maps = load_triples(kg_path, maps)
    return interactions, maps, kg


@pytest.fixture
def run_config(tmp_path) -> RunConfig:
    return toy_run_config(tmp_path / "run")
