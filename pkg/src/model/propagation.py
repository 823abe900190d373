#!/usr/bin/env python3

import os
import logging
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple
from src.lws.smoothing import smooth_graph
from src.models.config import ModelConfig
from src.models.graph import Adjacency, BipartiteGraph
from src.models.partition import VrkgPartition
from src.models.snapshot import PropagationSnapshot
from src.params.parameters import ParameterSet, softmax


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


class Propagator:
    """
    Forward pass over the K virtual relational subgraphs (items) and the
    bipartite graph (users). Every layer reads only the previous layer's
    snapshot, so the per-subgraph and user passes of a layer run concurrently.
    """

    def __init__(
        self,
        partition: VrkgPartition,
        bipartite: BipartiteGraph,
        item_entity: np.ndarray,
        entity_count: int,
        config: ModelConfig,
        workers: int = 1,
    ):
        self.partition = partition
        self.config = config
        self.workers = max(1, int(workers))
        self.item_entity = np.asarray(item_entity, dtype=np.int64)
        self.entity_count = entity_count
        self.user_adjacency: Adjacency = bipartite.entity_adjacency(
            self.item_entity, entity_count
        )
        self.item_mask = np.zeros(entity_count, dtype=bool)
        self.item_mask[self.item_entity] = True
        self.item_user_adjacency: Optional[Adjacency] = (
            self.user_adjacency.transpose() if config.symmetric_items else None
        )

        isolated = int(np.sum(self.user_adjacency.degrees == 0))
        if isolated:
            logger.warning(
                f"{isolated} users have no training interactions; "
                "their representations are smoothed from their own embedding only"
            )

    @property
    def n_iterations(self) -> int:
        return self.config.n_iterations

    @property
    def n_layers(self) -> int:
        return self.config.n_layers

    def with_partition(self, partition: VrkgPartition) -> "Propagator":
        clone = object.__new__(Propagator)
        clone.__dict__.update(self.__dict__)
        clone.partition = partition
        return clone

    def run_tasks(self, tasks: List[Callable[[], object]]) -> List[object]:
        if self.workers == 1 or len(tasks) == 1:
            return [task() for task in tasks]
        with ThreadPoolExecutor(max_workers=min(self.workers, len(tasks))) as executor:
            futures = [executor.submit(task) for task in tasks]
            return [future.result() for future in futures]

    def forward(self, params: ParameterSet) -> PropagationSnapshot:
        snapshot = PropagationSnapshot(
            entity_layers=[params.entity_emb.copy()],
            user_layers=[params.user_emb.copy()],
            fusion_weights=softmax(params.fusion_logits),
        )
        for layer in range(1, self.n_layers + 1):
            entities, per_vrkg, item_side, users = self._layer(snapshot, layer)
            snapshot.entity_layers.append(entities)
            snapshot.per_vrkg_buffers.append(per_vrkg)
            if item_side is not None:
                snapshot.item_user_buffers.append(item_side)
            snapshot.user_layers.append(users)
        return snapshot

    def _layer(self, snapshot: PropagationSnapshot, layer: int):
        entities_prev = snapshot.entity_layers[layer - 1]
        users_prev = snapshot.user_layers[layer - 1]
        q = self.n_iterations

        def entity_task(adjacency: Adjacency):
            return lambda: smooth_graph(entities_prev, entities_prev, adjacency, q)[0]

        tasks = [entity_task(g) for g in self.partition.subgraphs]
        tasks.append(
            lambda: smooth_graph(users_prev, entities_prev, self.user_adjacency, q)[0]
        )
        if self.item_user_adjacency is not None:
            tasks.append(
                lambda: smooth_graph(
                    entities_prev, users_prev, self.item_user_adjacency, q
                )[0]
            )
        results = self.run_tasks(tasks)

        k = self.partition.n_virtual
        per_vrkg = results[:k]
        users = results[k]
        fused = fuse(per_vrkg, snapshot.fusion_weights)
        item_side = results[k + 1] if self.item_user_adjacency is not None else None
        if item_side is not None:
            fused = np.where(self.item_mask[:, None], 0.5 * (fused + item_side), fused)
        return fused, per_vrkg, item_side, users


def fuse(per_vrkg: List[np.ndarray], weights: np.ndarray) -> np.ndarray:
    fused = weights[0] * per_vrkg[0]
    for weight, encoded in zip(weights[1:], per_vrkg[1:]):
        fused = fused + weight * encoded
    return fused


def encode_entities_layer(
    snapshot: PropagationSnapshot, partition: VrkgPartition, layer: int, n_iterations: int
) -> Tuple[np.ndarray, List[np.ndarray]]:
    """e_h^(l) = sum_k alpha_k LWS_k(e_h^(l-1); e_t^(l-1)) over every entity."""
    previous = snapshot.entity_layers[layer - 1]
    per_vrkg = [
        smooth_graph(previous, previous, g, n_iterations)[0] for g in partition.subgraphs
    ]
    return fuse(per_vrkg, snapshot.fusion_weights), per_vrkg


def encode_users_layer(
    snapshot: PropagationSnapshot, user_adjacency: Adjacency, layer: int, n_iterations: int
) -> np.ndarray:
    """e_u^(l) = LWS(e_u^(l-1); item rows of e^(l-1)); `user_adjacency` maps users to entity ids."""
    return smooth_graph(
        snapshot.user_layers[layer - 1],
        snapshot.entity_layers[layer - 1],
        user_adjacency,
        n_iterations,
    )[0]


def final_representations(snapshot: PropagationSnapshot) -> Tuple[np.ndarray, np.ndarray]:
    return np.sum(snapshot.user_layers, axis=0), np.sum(snapshot.entity_layers, axis=0)


def item_representations(entity_final: np.ndarray, item_entity: np.ndarray) -> np.ndarray:
    return entity_final[item_entity]


def predict(user_final: np.ndarray, item_final: np.ndarray, user: int, item: int) -> float:
    return float(np.dot(user_final[user], item_final[item]))
