#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass
from typing import Iterator
from src.models.dataset import InteractionSet
from src.system.exceptions import SamplingException


@dataclass(frozen=True)
class BprBatch:
    users: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray

    def __len__(self) -> int:
        return int(self.users.shape[0])


class NegativeSampler:
    """
    Pairs training positives with one uniform negative each. Negatives are
    rejection-sampled against the user's full (train + test) positive set.
    """

    def __init__(self, train: InteractionSet, full: InteractionSet):
        self.train = train
        self.item_count = train.item_count
        self.known = np.unique(full.keys())
        self.full_degree = np.bincount(full.users, minlength=full.user_count)

    def _check_users(self, users: np.ndarray) -> None:
        saturated = users[self.full_degree[users] >= self.item_count]
        if saturated.size:
            raise SamplingException(
                f"user {int(saturated[0])} interacted with all {self.item_count} items; "
                "no negative item can be sampled"
            )

    def is_known(self, users: np.ndarray, items: np.ndarray) -> np.ndarray:
        keys = users.astype(np.int64) * self.item_count + items
        position = np.searchsorted(self.known, keys)
        position = np.minimum(position, max(self.known.shape[0] - 1, 0))
        return (self.known.shape[0] > 0) & (self.known[position] == keys)

    def negatives(self, users: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        users = np.asarray(users, dtype=np.int64)
        self._check_users(users)
        negatives = rng.integers(0, self.item_count, size=users.shape[0])
        pending = np.flatnonzero(self.is_known(users, negatives))
        while pending.size:
            negatives[pending] = rng.integers(0, self.item_count, size=pending.size)
            pending = pending[self.is_known(users[pending], negatives[pending])]
        return negatives

    def batch(self, index: np.ndarray, rng: np.random.Generator) -> BprBatch:
        users = self.train.users[index]
        return BprBatch(
            users=users,
            positives=self.train.items[index],
            negatives=self.negatives(users, rng),
        )

    def sample_batch(self, batch_size: int, rng: np.random.Generator) -> BprBatch:
        """Positives drawn uniformly (with replacement) from the training pairs."""
        if self.train.size == 0:
            raise SamplingException("no training pairs to sample from")
        return self.batch(rng.integers(0, self.train.size, size=batch_size), rng)

    def epoch_batches(
        self, batch_size: int, rng: np.random.Generator
    ) -> Iterator[BprBatch]:
        """One pass over a fresh shuffle of the training pairs."""
        permutation = rng.permutation(self.train.size)
        for start in range(0, permutation.shape[0], batch_size):
            yield self.batch(permutation[start : start + batch_size], rng)


def sample_batch(
    train: InteractionSet,
    full: InteractionSet,
    batch_size: int,
    rng: np.random.Generator,
) -> BprBatch:
    return NegativeSampler(train, full).sample_batch(batch_size, rng)
