#!/usr/bin/env python3

import os
import logging
import numpy as np
from src.graph.knowledge_graph import relation_adjacency
from src.models.graph import KnowledgeGraph
from src.models.partition import RelationAssignment, VrkgPartition
from src.system.exceptions import GraphException


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


def partition_graph(kg: KnowledgeGraph, assignment: RelationAssignment) -> VrkgPartition:
    if assignment.assign.shape[0] != kg.relation_count:
        raise GraphException(
            f"assignment covers {assignment.assign.shape[0]} relations, "
            f"graph has {kg.relation_count}"
        )
    subgraphs = [
        relation_adjacency(kg, assignment.assign == k)
        for k in range(assignment.n_virtual)
    ]
    partition = VrkgPartition(subgraphs=subgraphs, assignment=assignment)
    if partition.triple_count != kg.triple_count:
        raise GraphException(
            f"partition covers {partition.triple_count} of {kg.triple_count} triples"
        )
    return partition


def exposure_counts(partition: VrkgPartition) -> np.ndarray:
    return np.asarray([g.edge_count for g in partition.subgraphs], dtype=np.int64)
