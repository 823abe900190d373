#!/usr/bin/env python3

import numpy as np
from typing import List
from pydantic import BaseModel, ConfigDict, Field
from src.models.graph import Adjacency


class RelationAssignment(BaseModel):
    """assign[p] = argmax_k similarity[p, k], lowest k on ties."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    assign: np.ndarray
    similarity: np.ndarray
    n_virtual: int = Field(ge=1)

    @property
    def objective(self) -> float:
        """Sum over relations of the similarity to the assigned virtual relation."""
        if self.assign.size == 0:
            return 0.0
        rows = np.arange(self.assign.shape[0])
        return float(self.similarity[rows, self.assign].sum())

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assign == k)


class VrkgPartition(BaseModel):
    """K virtual relational subgraphs; every triple lands in exactly one."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    subgraphs: List[Adjacency]
    assignment: RelationAssignment

    @property
    def n_virtual(self) -> int:
        return len(self.subgraphs)

    @property
    def triple_count(self) -> int:
        return sum(g.edge_count for g in self.subgraphs)
