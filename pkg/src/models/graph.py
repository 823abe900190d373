#!/usr/bin/env python3

import numpy as np
import scipy.sparse as sp
from dataclasses import dataclass
from typing import Iterator
from pydantic import BaseModel, ConfigDict, Field


@dataclass(frozen=True)
class Triple:
    head: int
    relation: int
    tail: int


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


class Adjacency:
    """
    Row-major sparse structure: row r owns indices[indptr[r]:indptr[r+1]].

    Repeated (row, col) entries are kept as separate edges so a duplicated fact
    contributes once per occurrence.
    """

    __slots__ = ("indptr", "indices", "n_rows", "n_cols", "rows")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, n_rows: int, n_cols: int):
        self.indptr = _freeze(np.asarray(indptr, dtype=np.int64))
        self.indices = _freeze(np.asarray(indices, dtype=np.int64))
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.rows = _freeze(
            np.repeat(np.arange(self.n_rows, dtype=np.int64), np.diff(self.indptr))
        )

    @classmethod
    def from_edges(
        cls, rows: np.ndarray, cols: np.ndarray, n_rows: int, n_cols: int
    ) -> "Adjacency":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        order = np.lexsort((cols, rows))
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
        return cls(
            indptr=indptr,
            indices=cols[order],
            n_rows=n_rows,
            n_cols=n_cols,
        )

    @property
    def edge_count(self) -> int:
        return int(self.indices.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def row(self, r: int) -> np.ndarray:
        return self.indices[self.indptr[r] : self.indptr[r + 1]]

    def matrix(self, data: np.ndarray = None) -> sp.csr_matrix:
        if data is None:
            data = np.ones(self.edge_count, dtype=np.float64)
        return sp.csr_matrix(
            (data, self.indices, self.indptr), shape=(self.n_rows, self.n_cols)
        )

    def transpose(self) -> "Adjacency":
        return Adjacency.from_edges(self.indices, self.rows, self.n_cols, self.n_rows)


class KnowledgeGraph(BaseModel):
    """
    Immutable triple store. `heads/relations/tails` keep the input order; the
    head-major CSR (`indptr`, `adj_relations`, `adj_tails`) lists every entity's
    neighbors sorted by (relation, tail).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    heads: np.ndarray
    relations: np.ndarray
    tails: np.ndarray
    entity_count: int = Field(ge=0)
    relation_count: int = Field(ge=0)
    canonical_relation_count: int = Field(ge=0)
    inverse_closed: bool = False
    indptr: np.ndarray
    adj_relations: np.ndarray
    adj_tails: np.ndarray

    @property
    def triple_count(self) -> int:
        return int(self.heads.shape[0])

    def triple(self, index: int) -> Triple:
        return Triple(
            int(self.heads[index]), int(self.relations[index]), int(self.tails[index])
        )

    def triples(self) -> Iterator[Triple]:
        for index in range(self.triple_count):
            yield self.triple(index)

    def as_array(self) -> np.ndarray:
        return np.stack([self.heads, self.relations, self.tails], axis=1)

    def relation_counts(self) -> np.ndarray:
        return np.bincount(self.relations, minlength=self.relation_count)


class BipartiteGraph(BaseModel):
    """User -> item CSR over training positives only."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    user_to_items: Adjacency
    user_count: int = Field(ge=0)
    item_count: int = Field(ge=0)

    @property
    def edge_count(self) -> int:
        return self.user_to_items.edge_count

    def items_of(self, user: int) -> np.ndarray:
        return self.user_to_items.row(user)

    def entity_adjacency(self, item_entity: np.ndarray, entity_count: int) -> Adjacency:
        """Users -> aligned entity rows, for propagation against entity matrices."""
        adjacency = self.user_to_items
        return Adjacency.from_edges(
            adjacency.rows,
            np.asarray(item_entity, dtype=np.int64)[adjacency.indices],
            adjacency.n_rows,
            entity_count,
        )
