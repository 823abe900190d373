#!/usr/bin/env python3

import toml
import numpy as np
from pathlib import Path
from typing import Any, Dict
from src.graph.knowledge_graph import add_inverse_relations, build_kg
from src.models.config import RunConfig
from src.models.graph import KnowledgeGraph


FIXTURES = Path(__file__).parent / "fixtures"


def toy_settings(out_dir: Path, **sections) -> Dict[str, Any]:
    """Small, fast settings for the committed toy fixture."""
    mapping = {
        "app": {"logging": False, "threads": 1},
        "model": {
            "embedding_dim": 16,
            "n_virtual_relations": 2,
            "n_iterations": 2,
            "n_layers": 1,
        },
        "train": {
            "lr": 0.05,
            "l2": 1e-5,
            "batch_size": 16,
            "epochs": 20,
            "eval_every": 10,
            "seed": 7,
        },
        "data": {
            "interactions": str(FIXTURES / "toy_interactions.txt"),
            "kg": str(FIXTURES / "toy_kg.txt"),
        },
        "output": {"directory": str(out_dir)},
    }
    for name, values in sections.items():
        mapping.setdefault(name, {}).update(values)
    return mapping


def toy_run_config(out_dir: Path, **sections) -> RunConfig:
    return RunConfig.from_mapping(toy_settings(out_dir, **sections))


def write_toy_config(path: Path, out_dir: Path, **sections) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        toml.dump(toy_settings(out_dir, **sections), f)
    return path


def random_kg(
    rng: np.random.Generator, entity_count: int, relation_count: int, triples: int
) -> KnowledgeGraph:
    """Inverse-closed random graph; every canonical relation owns at least one triple."""
    heads = rng.integers(0, entity_count, size=triples)
    tails = rng.integers(0, entity_count, size=triples)
    relations = np.concatenate(
        [
            np.arange(min(relation_count, triples)),
            rng.integers(0, relation_count, size=max(0, triples - relation_count)),
        ]
    )
    array = np.stack([heads, relations, tails], axis=1)
    return add_inverse_relations(build_kg(array, entity_count, relation_count))
