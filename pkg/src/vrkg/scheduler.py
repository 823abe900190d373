#!/usr/bin/env python3

import os
import logging
import numpy as np
from src.models.graph import KnowledgeGraph
from src.models.partition import RelationAssignment, VrkgPartition
from src.params.parameters import ParameterSet
from src.vrkg.clustering import alternate, identity_assignment, relation_features
from src.vrkg.partition import exposure_counts, partition_graph


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


class RelationClusterer:
    """
    Owns when and how the KG is re-partitioned into virtual relational subgraphs.

    strategy: "entity-grounded" derives relation features from the current entity
        embeddings; "static" clusters the free relation vectors.
    schedule: "periodic" re-clusters with one round at the start of every epoch
        that is a positive multiple of `every`; "once" only clusters before training.
    per_relation: keep one virtual relation per original relation and never re-cluster.
    """

    def __init__(
        self,
        kg: KnowledgeGraph,
        strategy: str = "entity-grounded",
        schedule: str = "periodic",
        init_rounds: int = 10,
        every: int = 10,
        per_relation: bool = False,
    ):
        self.kg = kg
        self.strategy = strategy
        self.schedule = schedule
        self.init_rounds = init_rounds
        self.every = every
        self.per_relation = per_relation
        self.partition: VrkgPartition = None

    def initialize(self, params: ParameterSet) -> VrkgPartition:
        if self.per_relation:
            self.partition = partition_graph(
                self.kg, identity_assignment(self.kg.relation_count)
            )
            self._log("Per-relation subgraphs", [])
            return self.partition
        return self._cluster(params, self.init_rounds, "Initial clustering")

    def is_due(self, epoch: int) -> bool:
        return (
            not self.per_relation
            and self.schedule == "periodic"
            and epoch > 0
            and epoch % self.every == 0
        )

    def recluster(self, params: ParameterSet) -> VrkgPartition:
        return self._cluster(params, 1, "Re-clustering")

    def restore(self, assign: np.ndarray, n_virtual: int) -> VrkgPartition:
        """Partition from a stored assignment; similarity is the assignment's one-hot."""
        assign = np.asarray(assign, dtype=np.int64)
        similarity = np.zeros((assign.shape[0], n_virtual))
        similarity[np.arange(assign.shape[0]), assign] = 1.0
        self.partition = partition_graph(
            self.kg,
            RelationAssignment(assign=assign, similarity=similarity, n_virtual=n_virtual),
        )
        return self.partition

    def _cluster(self, params: ParameterSet, rounds: int, label: str) -> VrkgPartition:
        features = relation_features(self.kg, params, self.strategy)
        assignment, centroids, history = alternate(features, params.centroids, rounds)
        params.centroids[...] = centroids
        if self.strategy == "entity-grounded":
            params.relation_feat[...] = features
        self.partition = partition_graph(self.kg, assignment)
        self._log(label, history)
        return self.partition

    def _log(self, label: str, history) -> None:
        counts = exposure_counts(self.partition).tolist()
        objective = (
            " -> ".join(f"{value:.4f}" for value in history) if history else "n/a"
        )
        logger.info(f"{label}: exposure counts {counts}, objective {objective}")
