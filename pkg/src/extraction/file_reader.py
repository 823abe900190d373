#!/usr/bin/env python3

import os
import logging
import numpy as np
from pathlib import Path
from typing import Dict, Iterator, List, Tuple
from src.graph.knowledge_graph import add_inverse_relations, build_kg
from src.models.dataset import IdMaps, InteractionSet
from src.models.graph import KnowledgeGraph
from src.system.exceptions import DataException, ParseException


logger: logging.Logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


def _check_path(path: Path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise DataException(f"Data file does not exist: {path}")
    return path


def read_records(path: str | Path, columns: int) -> Iterator[Tuple[int, List[int]]]:
    """
    Yield (line_number, first `columns` integer fields) for every non-blank,
    tab-separated line. Trailing whitespace (including a stray CR) is trimmed.
    """
    path = _check_path(Path(path))
    with open(path, "r", encoding="utf-8") as file:
        for line_number, line in enumerate(file, 1):
            line = line.rstrip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < columns:
                raise ParseException(
                    path,
                    line_number,
                    f"expected at least {columns} tab-separated columns, got {len(fields)}",
                )
            try:
                values = [int(field) for field in fields[:columns]]
            except ValueError:
                raise ParseException(
                    path, line_number, f"non-integer id in {fields[:columns]!r}"
                )
            yield line_number, values


def _dense_ids(raw: np.ndarray) -> Tuple[Dict[int, int], np.ndarray]:
    unique, inverse = np.unique(raw, return_inverse=True)
    mapping = {int(r): d for d, r in enumerate(unique.tolist())}
    return mapping, inverse.astype(np.int64)


def load_interactions(path: str | Path) -> Tuple[InteractionSet, IdMaps]:
    """
    Parse `rawUser<TAB>rawItem[<TAB>rating]` records. Every record is a positive;
    repeated pairs are kept once. Dense ids follow ascending raw id order.
    """
    path = _check_path(Path(path))
    raw = [values for _, values in read_records(path, columns=2)]
    if not raw:
        raise DataException(f"Interaction file is empty: {path}")

    raw_pairs = np.asarray(raw, dtype=np.int64)
    user_map, users = _dense_ids(raw_pairs[:, 0])
    item_map, items = _dense_ids(raw_pairs[:, 1])
    keys = np.unique(users * len(item_map) + items)
    users, items = keys // len(item_map), keys % len(item_map)

    duplicates = raw_pairs.shape[0] - keys.shape[0]
    if duplicates:
        logger.debug(f"Dropped {duplicates} duplicate interaction records from {path}")

    interactions = InteractionSet(
        users=users,
        items=items,
        user_count=len(user_map),
        item_count=len(item_map),
    )
    maps = IdMaps(
        users=user_map,
        items=item_map,
        item_entity=np.arange(len(item_map), dtype=np.int64),
    )
    logger.info(
        f"Loaded {interactions.size} interactions: "
        f"{interactions.user_count} users, {interactions.item_count} items"
    )
    return interactions, maps


def load_triples(path: str | Path, maps: IdMaps) -> Tuple[KnowledgeGraph, IdMaps]:
    """
    Parse `rawHead<TAB>rawRelation<TAB>rawTail` records into an inverse-closed
    KnowledgeGraph. Raw ids equal to a raw item id resolve to that item's entity;
    the remaining entities are numbered after the items in ascending raw order.
    """
    path = _check_path(Path(path))
    raw = [values for _, values in read_records(path, columns=3)]
    raw_triples = np.asarray(raw, dtype=np.int64).reshape(-1, 3)
    if not raw:
        logger.warning(f"Knowledge graph file holds no triples: {path}")

    item_count = len(maps.items)
    entity_map: Dict[int, int] = {
        raw_item: int(maps.item_entity[dense]) for raw_item, dense in maps.items.items()
    }
    raw_entities = np.unique(np.concatenate([raw_triples[:, 0], raw_triples[:, 2]]))
    fresh = [int(e) for e in raw_entities.tolist() if int(e) not in entity_map]
    for offset, raw_entity in enumerate(fresh):
        entity_map[raw_entity] = item_count + offset

    relation_map, relations = _dense_ids(raw_triples[:, 1])
    lookup = np.vectorize(entity_map.__getitem__, otypes=[np.int64])
    heads = lookup(raw_triples[:, 0]) if raw else np.zeros(0, dtype=np.int64)
    tails = lookup(raw_triples[:, 2]) if raw else np.zeros(0, dtype=np.int64)

    kg = build_kg(
        np.stack([heads, relations, tails], axis=1),
        entity_count=item_count + len(fresh),
        relation_count=len(relation_map),
    )
    closed = add_inverse_relations(kg)
    updated = maps.model_copy(update={"entities": entity_map, "relations": relation_map})
    logger.info(
        f"Loaded knowledge graph: {closed.entity_count} entities, "
        f"{kg.relation_count} relations ({closed.relation_count} with inverses), "
        f"{kg.triple_count} triples ({closed.triple_count} with inverses)"
    )
    return closed, updated
