#!/usr/bin/env python3

import numpy as np
from typing import Dict, List, Tuple
from pydantic import BaseModel, ConfigDict, Field


class InteractionSet(BaseModel):
    """Deduplicated positive (user, item) pairs over dense ids."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    users: np.ndarray
    items: np.ndarray
    user_count: int = Field(ge=0)
    item_count: int = Field(ge=0)

    @property
    def size(self) -> int:
        return int(self.users.shape[0])

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return list(zip(self.users.tolist(), self.items.tolist()))

    def keys(self) -> np.ndarray:
        return self.users.astype(np.int64) * max(self.item_count, 1) + self.items

    def subset(self, index: np.ndarray) -> "InteractionSet":
        index = np.sort(np.asarray(index, dtype=np.int64))
        return InteractionSet(
            users=self.users[index],
            items=self.items[index],
            user_count=self.user_count,
            item_count=self.item_count,
        )

    def items_by_user(self) -> List[np.ndarray]:
        order = np.lexsort((self.items, self.users))
        counts = np.bincount(self.users, minlength=self.user_count)
        return np.split(self.items[order], np.cumsum(counts)[:-1])


class SplitDataset(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    train: InteractionSet
    test: InteractionSet
    seed: int
    ratio: float
    stratified: bool = False

    @property
    def full(self) -> InteractionSet:
        return InteractionSet(
            users=np.concatenate([self.train.users, self.test.users]),
            items=np.concatenate([self.train.items, self.test.items]),
            user_count=self.train.user_count,
            item_count=self.train.item_count,
        )

    def cold_users(self) -> np.ndarray:
        """Users with test positives but no training positive."""
        in_train = np.zeros(self.train.user_count, dtype=bool)
        in_train[self.train.users] = True
        in_test = np.zeros(self.test.user_count, dtype=bool)
        in_test[self.test.users] = True
        return np.flatnonzero(in_test & ~in_train)


class IdMaps(BaseModel):
    """Raw -> dense maps. Items occupy entity ids [0, item_count) via `item_entity`."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    users: Dict[int, int] = Field(default_factory=dict)
    items: Dict[int, int] = Field(default_factory=dict)
    entities: Dict[int, int] = Field(default_factory=dict)
    relations: Dict[int, int] = Field(default_factory=dict)
    item_entity: np.ndarray = Field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @staticmethod
    def invert(mapping: Dict[int, int]) -> Dict[int, int]:
        return {dense: raw for raw, dense in mapping.items()}

    def raw_user(self, dense: int) -> int:
        return self.invert(self.users)[dense]

    def raw_item(self, dense: int) -> int:
        return self.invert(self.items)[dense]
