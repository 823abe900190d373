#!/usr/bin/env python3

import os
import logging
import numpy as np
from typing import Sequence, Union
from src.models.graph import Adjacency, KnowledgeGraph, Triple
from src.system.exceptions import GraphException


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

TripleInput = Union[Sequence[Triple], np.ndarray]


def _as_columns(triples: TripleInput) -> np.ndarray:
    if isinstance(triples, np.ndarray):
        array = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    else:
        array = np.array(
            [(t.head, t.relation, t.tail) for t in triples], dtype=np.int64
        ).reshape(-1, 3)
    return array


def _first_out_of_range(array: np.ndarray, entity_count: int, relation_count: int) -> int:
    bad = (
        (array[:, 0] < 0)
        | (array[:, 0] >= entity_count)
        | (array[:, 2] < 0)
        | (array[:, 2] >= entity_count)
        | (array[:, 1] < 0)
        | (array[:, 1] >= relation_count)
    )
    hits = np.flatnonzero(bad)
    return int(hits[0]) if hits.size else -1


def _assemble(
    array: np.ndarray,
    entity_count: int,
    relation_count: int,
    canonical_relation_count: int,
    inverse_closed: bool,
) -> KnowledgeGraph:
    heads, relations, tails = (np.ascontiguousarray(array[:, c]) for c in range(3))
    order = np.lexsort((tails, relations, heads))
    indptr = np.zeros(entity_count + 1, dtype=np.int64)
    np.cumsum(np.bincount(heads, minlength=entity_count), out=indptr[1:])

    if indptr[-1] != heads.shape[0]:
        raise GraphException(
            f"edge conservation violated: adjacency holds {indptr[-1]} edges "
            f"for {heads.shape[0]} triples"
        )

    arrays = [heads, relations, tails, indptr, relations[order], tails[order]]
    for a in arrays:
        a.flags.writeable = False
    return KnowledgeGraph(
        heads=heads,
        relations=relations,
        tails=tails,
        entity_count=entity_count,
        relation_count=relation_count,
        canonical_relation_count=canonical_relation_count,
        inverse_closed=inverse_closed,
        indptr=indptr,
        adj_relations=arrays[4],
        adj_tails=arrays[5],
    )


def build_kg(triples: TripleInput, entity_count: int, relation_count: int) -> KnowledgeGraph:
    """
    Build the immutable triple store. Duplicates are kept as repeated edges;
    inverse relations are not added here (see add_inverse_relations).
    """
    if entity_count < 0 or relation_count < 0:
        raise GraphException("entity and relation counts must be non-negative")
    array = _as_columns(triples)
    offending = _first_out_of_range(array, entity_count, relation_count)
    if offending >= 0:
        h, r, t = array[offending]
        raise GraphException(
            f"id out of range in ({h}, {r}, {t}) "
            f"with {entity_count} entities and {relation_count} relations",
            triple_index=offending,
        )
    return _assemble(
        array,
        entity_count=entity_count,
        relation_count=relation_count,
        canonical_relation_count=relation_count,
        inverse_closed=False,
    )


def add_inverse_relations(kg: KnowledgeGraph) -> KnowledgeGraph:
    """Append (t, r + R, h) for every (h, r, t); relation r + R is the inverse of r."""
    if kg.inverse_closed:
        raise GraphException("inverse relations were already added to this graph")
    canonical = kg.relation_count
    array = kg.as_array()
    inverse = np.stack([array[:, 2], array[:, 1] + canonical, array[:, 0]], axis=1)
    closed = _assemble(
        np.concatenate([array, inverse], axis=0),
        entity_count=kg.entity_count,
        relation_count=2 * canonical,
        canonical_relation_count=canonical,
        inverse_closed=True,
    )
    logger.debug(
        f"Inverse closure: {kg.triple_count} -> {closed.triple_count} triples, "
        f"{canonical} -> {closed.relation_count} relations"
    )
    return closed


def neighbors(kg: KnowledgeGraph, entity: int, relation: int) -> np.ndarray:
    """Sorted tails of (entity, relation, ·); empty when there are none."""
    if not 0 <= entity < kg.entity_count:
        raise GraphException(f"entity {entity} out of range [0, {kg.entity_count})")
    if not 0 <= relation < kg.relation_count:
        raise GraphException(
            f"relation {relation} out of range [0, {kg.relation_count})"
        )
    start, stop = kg.indptr[entity], kg.indptr[entity + 1]
    block = kg.adj_relations[start:stop]
    lo = np.searchsorted(block, relation, side="left")
    hi = np.searchsorted(block, relation, side="right")
    return kg.adj_tails[start + lo : start + hi]


def relation_adjacency(kg: KnowledgeGraph, relation_mask: np.ndarray) -> Adjacency:
    """Entity x entity adjacency restricted to relations where `relation_mask` is set."""
    relation_mask = np.asarray(relation_mask, dtype=bool)
    keep = relation_mask[kg.relations]
    return Adjacency.from_edges(
        kg.heads[keep], kg.tails[keep], kg.entity_count, kg.entity_count
    )
