#!/usr/bin/env python3

import os
import logging
import numpy as np
from typing import Dict, List, Tuple
from src.models.graph import KnowledgeGraph
from src.models.partition import RelationAssignment
from src.params.parameters import ParameterSet


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

STRATEGIES = ("entity-grounded", "static")


def relation_features(
    kg: KnowledgeGraph, params: ParameterSet, strategy: str
) -> np.ndarray:
    """
    r_p for every relation. "static" returns the stored free vectors;
    "entity-grounded" uses the mean translation e_t - e_h over the relation's
    triples, keeping the stored vector for relations without triples.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown clustering strategy {strategy!r}")
    stored = params.relation_feat
    if strategy == "static":
        return stored.copy()

    entities = params.entity_emb
    differences = entities[kg.tails] - entities[kg.heads]
    sums = np.zeros_like(stored)
    np.add.at(sums, kg.relations, differences)
    counts = np.bincount(kg.relations, minlength=stored.shape[0])
    features = stored.copy()
    seen = counts > 0
    features[seen] = sums[seen] / counts[seen, None]
    return features


def assign_relations(features: np.ndarray, centroids: np.ndarray) -> RelationAssignment:
    similarity = features @ centroids.T
    # argmax returns the first maximum, i.e. the lowest virtual-relation index
    assign = (
        np.argmax(similarity, axis=1).astype(np.int64)
        if similarity.shape[0]
        else np.zeros(0, dtype=np.int64)
    )
    return RelationAssignment(
        assign=assign, similarity=similarity, n_virtual=centroids.shape[0]
    )


def update_centroids(
    features: np.ndarray, assignment: RelationAssignment, centroids: np.ndarray
) -> np.ndarray:
    """Mean of the assigned features; an empty cluster keeps its previous centroid."""
    updated = centroids.copy()
    for k in range(centroids.shape[0]):
        members = assignment.members(k)
        if members.size == 0:
            logger.warning(f"Virtual relation {k} has no member relations; keeping its centroid")
            continue
        updated[k] = features[members].mean(axis=0)
    return updated


def alternate(
    features: np.ndarray, centroids: np.ndarray, rounds: int
) -> Tuple[RelationAssignment, np.ndarray, List[float]]:
    """
    Assign under the current centroids, then run up to `rounds` update+assign
    rounds. A round that would lower sum_p features[p] . centroids[assign[p]]
    is discarded and the alternation stops there.
    """
    assignment = assign_relations(features, centroids)
    history = [assignment.objective]
    for round_index in range(rounds):
        candidate_centroids = update_centroids(features, assignment, centroids)
        candidate = assign_relations(features, candidate_centroids)
        if candidate.objective < history[-1]:
            logger.debug(
                f"Alternation stopped after {round_index} rounds: objective would drop "
                f"from {history[-1]:.6f} to {candidate.objective:.6f}"
            )
            break
        centroids, assignment = candidate_centroids, candidate
        history.append(candidate.objective)
    return assignment, centroids, history


def identity_assignment(relation_count: int) -> RelationAssignment:
    """One virtual relation per original relation."""
    return RelationAssignment(
        assign=np.arange(relation_count, dtype=np.int64),
        similarity=np.eye(relation_count),
        n_virtual=max(1, relation_count),
    )


def cluster_objective(
    params: ParameterSet, assign: np.ndarray, weight: float
) -> Tuple[float, Dict[str, np.ndarray]]:
    """
    weight * sum_p |r_p - v_assign(p)|^2 with its gradients for relation_feat and
    centroids; the training signal for free relation vectors under "static".
    """
    if weight == 0.0 or assign.size == 0:
        return 0.0, {
            "relation_feat": np.zeros_like(params.relation_feat),
            "centroids": np.zeros_like(params.centroids),
        }
    residual = params.relation_feat - params.centroids[assign]
    value = float(weight * np.sum(residual * residual))
    grad_features = 2.0 * weight * residual
    grad_centroids = np.zeros_like(params.centroids)
    np.add.at(grad_centroids, assign, -grad_features)
    return value, {"relation_feat": grad_features, "centroids": grad_centroids}
