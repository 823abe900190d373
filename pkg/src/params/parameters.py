#!/usr/bin/env python3

import os
import logging
import numpy as np
from dataclasses import dataclass, field
from typing import Dict, Iterator, Tuple
from src.core.seeding import make_rng
from src.system.exceptions import GradientException, NumericException


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

BLOCKS: Tuple[str, ...] = (
    "user_emb",
    "entity_emb",
    "relation_feat",
    "centroids",
    "fusion_logits",
)
# relation features and centroids are derived buffers unless clustering is "static"
FORWARD_BLOCKS: Tuple[str, ...] = ("user_emb", "entity_emb", "fusion_logits")


def trainable_blocks(strategy: str) -> Tuple[str, ...]:
    return BLOCKS if strategy == "static" else FORWARD_BLOCKS


@dataclass
class ParameterSet:
    user_emb: np.ndarray
    entity_emb: np.ndarray
    relation_feat: np.ndarray
    centroids: np.ndarray
    fusion_logits: np.ndarray
    item_entity: np.ndarray
    trainable: Tuple[str, ...] = FORWARD_BLOCKS

    @property
    def dim(self) -> int:
        return int(self.entity_emb.shape[1])

    @property
    def n_virtual(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def user_count(self) -> int:
        return int(self.user_emb.shape[0])

    @property
    def entity_count(self) -> int:
        return int(self.entity_emb.shape[0])

    @property
    def relation_count(self) -> int:
        return int(self.relation_feat.shape[0])

    @property
    def item_emb(self) -> np.ndarray:
        """Item rows of the entity table; a view when items are entities [0, N)."""
        n = self.item_entity.shape[0]
        if np.array_equal(self.item_entity, np.arange(n)):
            return self.entity_emb[:n]
        return self.entity_emb[self.item_entity]

    def fusion_weights(self) -> np.ndarray:
        return softmax(self.fusion_logits)

    def block(self, name: str) -> np.ndarray:
        if name not in BLOCKS:
            raise KeyError(f"unknown parameter block {name}")
        return getattr(self, name)

    def registry(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in self.trainable:
            yield name, getattr(self, name)

    def all_blocks(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in BLOCKS:
            yield name, getattr(self, name)

    def copy(self) -> "ParameterSet":
        return ParameterSet(
            **{name: array.copy() for name, array in self.all_blocks()},
            item_entity=self.item_entity.copy(),
            trainable=self.trainable,
        )

    def check_finite(self) -> None:
        for name, array in self.all_blocks():
            if not np.all(np.isfinite(array)):
                raise NumericException(f"non-finite values in parameter block '{name}'")


@dataclass
class GradientSet:
    blocks: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: ParameterSet) -> "GradientSet":
        return cls({name: np.zeros_like(array) for name, array in params.registry()})

    def __getitem__(self, name: str) -> np.ndarray:
        return self.blocks[name]

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        self.blocks[name] = value

    def __contains__(self, name: str) -> bool:
        return name in self.blocks

    def items(self):
        return self.blocks.items()

    def zero(self) -> None:
        for array in self.blocks.values():
            array.fill(0.0)

    def check_finite(self) -> None:
        for name, array in self.blocks.items():
            if not np.all(np.isfinite(array)):
                raise GradientException(name)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = np.exp(logits - np.max(logits))
    return shifted / shifted.sum()


def init_params(
    user_count: int,
    entity_count: int,
    relation_count: int,
    dim: int = 64,
    n_virtual: int = 3,
    seed: int = 0,
    item_entity: np.ndarray = None,
    strategy: str = "entity-grounded",
) -> ParameterSet:
    """
    Uniform(-1/sqrt(d), 1/sqrt(d)) for every matrix, drawn in block order from a
    PCG64 stream; fusion logits start at zero so the fusion weights are uniform.
    """
    if min(user_count, entity_count, dim, n_virtual) < 1 or relation_count < 0:
        raise NumericException(
            "parameter counts must be positive: "
            f"users={user_count}, entities={entity_count}, relations={relation_count}, "
            f"d={dim}, K={n_virtual}"
        )
    rng = make_rng(seed)
    bound = 1.0 / np.sqrt(dim)

    def draw(rows: int) -> np.ndarray:
        return rng.uniform(-bound, bound, size=(rows, dim))

    params = ParameterSet(
        user_emb=draw(user_count),
        entity_emb=draw(entity_count),
        relation_feat=draw(relation_count),
        centroids=draw(n_virtual),
        fusion_logits=np.zeros(n_virtual, dtype=np.float64),
        item_entity=(
            np.asarray(item_entity, dtype=np.int64)
            if item_entity is not None
            else np.zeros(0, dtype=np.int64)
        ),
        trainable=trainable_blocks(strategy),
    )
    logger.debug(
        f"Initialized parameters: {user_count} users, {entity_count} entities, "
        f"{relation_count} relations, d={dim}, K={n_virtual}, seed={seed}"
    )
    return params


def l2_penalty(params: ParameterSet, l2: float) -> float:
    """lambda * ||Theta||^2 over the registry."""
    return float(l2 * sum(np.sum(array * array) for _, array in params.registry()))


def add_l2_gradient(params: ParameterSet, grads: GradientSet, l2: float) -> None:
    for name, array in params.registry():
        grads[name] += 2.0 * l2 * array
