#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass
from typing import List, Optional, Tuple
from src.lws.smoothing import smooth_graph_backward
from src.model.propagation import Propagator, final_representations
from src.models.snapshot import PropagationSnapshot
from src.params.parameters import GradientSet, ParameterSet, add_l2_gradient, l2_penalty
from src.train.loss import bpr_loss, bpr_margin_gradient
from src.train.sampler import BprBatch
from src.vrkg.clustering import cluster_objective


@dataclass(frozen=True)
class LossBreakdown:
    bpr: float
    l2: float
    cluster: float
    triples: int

    @property
    def total(self) -> float:
        return self.bpr + self.l2 + self.cluster

    @property
    def mean_bpr(self) -> float:
        return self.bpr / self.triples if self.triples else 0.0


def batch_scores(
    snapshot: PropagationSnapshot, item_entity: np.ndarray, batch: BprBatch
) -> Tuple[np.ndarray, np.ndarray]:
    users, entities = final_representations(snapshot)
    user_rows = users[batch.users]
    pos = np.einsum("ij,ij->i", user_rows, entities[item_entity[batch.positives]])
    neg = np.einsum("ij,ij->i", user_rows, entities[item_entity[batch.negatives]])
    return pos, neg


def _score_gradients(
    snapshot: PropagationSnapshot, item_entity: np.ndarray, batch: BprBatch
) -> Tuple[float, np.ndarray, np.ndarray]:
    """BPR loss and its gradients with respect to the final user/entity matrices."""
    users, entities = final_representations(snapshot)
    pos_rows = item_entity[batch.positives]
    neg_rows = item_entity[batch.negatives]
    user_rows = users[batch.users]
    pos = np.einsum("ij,ij->i", user_rows, entities[pos_rows])
    neg = np.einsum("ij,ij->i", user_rows, entities[neg_rows])

    margin_grad = bpr_margin_gradient(pos, neg)[:, None]
    grad_users = np.zeros_like(users)
    np.add.at(grad_users, batch.users, margin_grad * (entities[pos_rows] - entities[neg_rows]))
    grad_entities = np.zeros_like(entities)
    np.add.at(grad_entities, pos_rows, margin_grad * user_rows)
    np.add.at(grad_entities, neg_rows, -margin_grad * user_rows)
    return bpr_loss(pos, neg), grad_users, grad_entities


def _softmax_backward(weights: np.ndarray, grad_weights: np.ndarray) -> np.ndarray:
    return weights * (grad_weights - np.dot(weights, grad_weights))


def propagation_backward(
    propagator: Propagator,
    snapshot: PropagationSnapshot,
    grad_users_final: np.ndarray,
    grad_entities_final: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Reverse sweep from layer L down to layer 0. Returns the gradients for the
    layer-0 user table, the layer-0 entity table and the fusion logits.
    """
    weights = snapshot.fusion_weights
    subgraphs = propagator.partition.subgraphs
    q = propagator.n_iterations
    symmetric = propagator.item_user_adjacency is not None
    mask = propagator.item_mask[:, None]

    # every layer feeds the final sum, so each layer's gradient starts from it
    grad_users = grad_users_final.copy()
    grad_entities = grad_entities_final.copy()
    grad_weights = np.zeros_like(weights)

    for layer in range(snapshot.n_layers, 0, -1):
        entities_prev = snapshot.entity_layers[layer - 1]
        users_prev = snapshot.user_layers[layer - 1]
        per_vrkg = snapshot.per_vrkg_buffers[layer - 1]

        grad_fused = grad_entities
        grad_item_side: Optional[np.ndarray] = None
        if symmetric:
            grad_fused = np.where(mask, 0.5 * grad_entities, grad_entities)
            grad_item_side = np.where(mask, 0.5 * grad_entities, 0.0)

        for k, encoded in enumerate(per_vrkg):
            grad_weights[k] += float(np.sum(grad_fused * encoded))

        def entity_task(k: int):
            return lambda: smooth_graph_backward(
                entities_prev, entities_prev, subgraphs[k], q, weights[k] * grad_fused
            )

        tasks = [entity_task(k) for k in range(len(subgraphs))]
        tasks.append(
            lambda: smooth_graph_backward(
                users_prev, entities_prev, propagator.user_adjacency, q, grad_users
            )
        )
        if symmetric:
            tasks.append(
                lambda: smooth_graph_backward(
                    entities_prev,
                    users_prev,
                    propagator.item_user_adjacency,
                    q,
                    grad_item_side,
                )
            )
        results: List[Tuple[np.ndarray, np.ndarray]] = propagator.run_tasks(tasks)

        next_entities = grad_entities_final.copy()
        next_users = grad_users_final.copy()
        for grad_centers, grad_neighbors in results[: len(subgraphs)]:
            next_entities += grad_centers
            next_entities += grad_neighbors
        user_centers, user_neighbors = results[len(subgraphs)]
        next_users += user_centers
        next_entities += user_neighbors
        if symmetric:
            item_centers, item_neighbors = results[len(subgraphs) + 1]
            next_entities += item_centers
            next_users += item_neighbors
        grad_entities, grad_users = next_entities, next_users

    return grad_users, grad_entities, _softmax_backward(weights, grad_weights)


def backward(
    propagator: Propagator,
    params: ParameterSet,
    snapshot: PropagationSnapshot,
    batch: BprBatch,
    l2: float,
    cluster_weight: float = 0.0,
) -> Tuple[LossBreakdown, GradientSet]:
    """
    Full-objective gradient for one batch: BPR over the batch, L2 over the
    registry and, when relation vectors are trainable, the clustering term.
    """
    bpr, grad_users_final, grad_entities_final = _score_gradients(
        snapshot, params.item_entity, batch
    )
    grad_users, grad_entities, grad_logits = propagation_backward(
        propagator, snapshot, grad_users_final, grad_entities_final
    )

    grads = GradientSet.zeros_like(params)
    grads["user_emb"] += grad_users
    grads["entity_emb"] += grad_entities
    grads["fusion_logits"] += grad_logits

    penalty = l2_penalty(params, l2)
    add_l2_gradient(params, grads, l2)

    cluster = 0.0
    if "relation_feat" in grads:
        cluster, cluster_grads = cluster_objective(
            params, propagator.partition.assignment.assign, cluster_weight
        )
        for name, grad in cluster_grads.items():
            grads[name] += grad

    grads.check_finite()
    return LossBreakdown(bpr=bpr, l2=penalty, cluster=cluster, triples=len(batch)), grads


def objective(
    propagator: Propagator,
    params: ParameterSet,
    batch: BprBatch,
    l2: float,
    cluster_weight: float = 0.0,
) -> float:
    """Forward-only value of the objective `backward` differentiates."""
    snapshot = propagator.forward(params)
    pos, neg = batch_scores(snapshot, params.item_entity, batch)
    value = bpr_loss(pos, neg) + l2_penalty(params, l2)
    if "relation_feat" in params.trainable:
        value += cluster_objective(
            params, propagator.partition.assignment.assign, cluster_weight
        )[0]
    return value
