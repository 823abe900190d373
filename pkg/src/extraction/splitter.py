#!/usr/bin/env python3

import os
import math
import logging
import numpy as np
from src.core.seeding import make_rng
from src.models.dataset import InteractionSet, SplitDataset
from src.system.exceptions import ConfigurationException


logger: logging.Logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


def train_size(total: int, ratio: float) -> int:
    # tolerance keeps e.g. 0.29 * 100 from flooring to 28
    return int(math.floor(ratio * total + 1e-9))


def split(
    interactions: InteractionSet,
    seed: int,
    ratio: float = 0.8,
    stratified: bool = False,
) -> SplitDataset:
    if not 0.0 < ratio < 1.0:
        raise ConfigurationException(f"split ratio must lie in (0, 1), got {ratio}")

    rng = make_rng(seed)
    if stratified:
        train_index = []
        order = np.lexsort((interactions.items, interactions.users))
        counts = np.bincount(interactions.users, minlength=interactions.user_count)
        for block in np.split(order, np.cumsum(counts)[:-1]):
            if block.size == 0:
                continue
            keep = max(1, train_size(block.size, ratio))
            train_index.append(rng.permutation(block)[:keep])
        train_index = (
            np.concatenate(train_index) if train_index else np.zeros(0, dtype=np.int64)
        )
    else:
        permutation = rng.permutation(interactions.size)
        train_index = permutation[: train_size(interactions.size, ratio)]

    is_train = np.zeros(interactions.size, dtype=bool)
    is_train[train_index] = True
    dataset = SplitDataset(
        train=interactions.subset(np.flatnonzero(is_train)),
        test=interactions.subset(np.flatnonzero(~is_train)),
        seed=seed,
        ratio=ratio,
        stratified=stratified,
    )
    logger.info(
        f"Split {interactions.size} pairs with seed {seed}: "
        f"{dataset.train.size} train / {dataset.test.size} test"
        f"{' (per-user)' if stratified else ''}"
    )
    return dataset
