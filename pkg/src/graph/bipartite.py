#!/usr/bin/env python3

import numpy as np
from src.models.graph import Adjacency, BipartiteGraph
from src.models.dataset import InteractionSet
from src.system.exceptions import GraphException


def build_bipartite(train: InteractionSet) -> BipartiteGraph:
    """User-item graph G^I over the training positives; duplicate pairs are rejected."""
    users = np.asarray(train.users, dtype=np.int64)
    items = np.asarray(train.items, dtype=np.int64)
    keys = users * max(train.item_count, 1) + items
    if np.unique(keys).shape[0] != keys.shape[0]:
        raise GraphException("duplicate (user, item) edge in training interactions")
    return BipartiteGraph(
        user_to_items=Adjacency.from_edges(
            users, items, train.user_count, train.item_count
        ),
        user_count=train.user_count,
        item_count=train.item_count,
    )
