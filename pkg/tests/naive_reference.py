#!/usr/bin/env python3
"""
Per-node forward pass written with plain loops. It shares no code with the
vectorised propagation and serves as its oracle in the tests.
"""

import math
import numpy as np
from typing import Dict, List, Sequence, Tuple


def bound(u: List[float]) -> List[float]:
    norm = math.sqrt(sum(x * x for x in u))
    if norm == 0.0:
        return [0.0] * len(u)
    scale = norm / (norm * norm + 1.0)
    return [x * scale for x in u]


def smooth(center: List[float], neighbors: List[List[float]], rounds: int) -> List[float]:
    current = list(center)
    for _ in range(rounds):
        total = list(current)
        for vec in neighbors:
            weight = sum(a * b for a, b in zip(current, vec))
            total = [t + weight * v for t, v in zip(total, vec)]
        current = bound(total)
    return current


def naive_forward(
    users: np.ndarray,
    entities: np.ndarray,
    fusion_logits: np.ndarray,
    triples: Sequence[Tuple[int, int, int]],
    assign: Sequence[int],
    user_items: Dict[int, List[int]],
    item_entity: Sequence[int],
    rounds: int,
    layers: int,
    symmetric: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """Final (summed over layers) user and entity representations."""
    n_virtual = len(fusion_logits)
    top = max(fusion_logits)
    exps = [math.exp(z - top) for z in fusion_logits]
    alpha = [e / sum(exps) for e in exps]

    tails: Dict[Tuple[int, int], List[int]] = {}
    for head, relation, tail in triples:
        tails.setdefault((head, assign[relation]), []).append(tail)
    item_rows = {int(e): i for i, e in enumerate(item_entity)}
    item_users: Dict[int, List[int]] = {}
    for user, items in user_items.items():
        for item in items:
            item_users.setdefault(item, []).append(user)

    user_layer = [list(map(float, row)) for row in users]
    entity_layer = [list(map(float, row)) for row in entities]
    user_total = [list(row) for row in user_layer]
    entity_total = [list(row) for row in entity_layer]

    for _ in range(layers):
        next_entities = []
        for h in range(len(entity_layer)):
            fused = [0.0] * len(entity_layer[h])
            for k in range(n_virtual):
                neighbors = [entity_layer[t] for t in tails.get((h, k), [])]
                encoded = smooth(entity_layer[h], neighbors, rounds)
                fused = [f + alpha[k] * x for f, x in zip(fused, encoded)]
            if symmetric and h in item_rows:
                neighbors = [user_layer[u] for u in item_users.get(item_rows[h], [])]
                user_side = smooth(entity_layer[h], neighbors, rounds)
                fused = [0.5 * (f + y) for f, y in zip(fused, user_side)]
            next_entities.append(fused)

        next_users = []
        for u in range(len(user_layer)):
            neighbors = [entity_layer[item_entity[i]] for i in user_items.get(u, [])]
            next_users.append(smooth(user_layer[u], neighbors, rounds))

        entity_layer, user_layer = next_entities, next_users
        user_total = [[a + b for a, b in zip(t, r)] for t, r in zip(user_total, user_layer)]
        entity_total = [
            [a + b for a, b in zip(t, r)] for t, r in zip(entity_total, entity_layer)
        ]
    return np.asarray(user_total), np.asarray(entity_total)
