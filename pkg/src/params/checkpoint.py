#!/usr/bin/env python3
"""
Binary checkpoint and layer-dump layouts.

checkpoint.bin:
    8 bytes   magic b"VRKGCKPT"
    u64 LE    version
    u64 LE x7 M, |E|, |R|, d, K, Q, L
    f64 LE    user_emb (M x d), entity_emb (|E| x d), relation_feat (|R| x d),
              centroids (K x d), fusion_logits (K), each row-major
    i32 LE    relation -> virtual relation assignment (|R|)

layers.bin:
    8 bytes   magic b"VRKGLAYR"
    u64 LE    version
    u64 LE x4 L + 1, M, |E|, d
    f64 LE    user layers 0..L (M x d each), then entity layers 0..L (|E| x d each)
"""

import os
import logging
import numpy as np
from pathlib import Path
from typing import List, Tuple
from pydantic import BaseModel, ConfigDict
from src.params.parameters import ParameterSet
from src.system.exceptions import CheckpointException


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

CHECKPOINT_MAGIC = b"VRKGCKPT"
LAYERS_MAGIC = b"VRKGLAYR"
VERSION = 1
FLOAT = np.dtype("<f8")
COUNT = np.dtype("<u8")
INDEX = np.dtype("<i4")


class CheckpointHeader(BaseModel):
    model_config = ConfigDict(frozen=True)

    user_count: int
    entity_count: int
    relation_count: int
    dim: int
    n_virtual: int
    n_iterations: int
    n_layers: int


def _read(path: Path, magic: bytes, n_counts: int) -> Tuple[bytes, np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointException(f"Checkpoint file not found: {path}")
    data = path.read_bytes()
    header_size = len(magic) + COUNT.itemsize * (1 + n_counts)
    if len(data) < header_size:
        raise CheckpointException(f"Truncated header in {path}")
    if data[: len(magic)] != magic:
        raise CheckpointException(
            f"Bad magic in {path}: expected {magic!r}, found {data[:len(magic)]!r}"
        )
    counts = np.frombuffer(data, dtype=COUNT, count=1 + n_counts, offset=len(magic))
    if int(counts[0]) != VERSION:
        raise CheckpointException(f"Unsupported version {int(counts[0])} in {path}")
    return data, counts[1:].astype(np.int64)


def _take(data: bytes, offset: int, dtype: np.dtype, shape: Tuple[int, ...], path: Path):
    count = int(np.prod(shape)) if shape else 1
    if count == 0:
        return np.zeros(shape, dtype=dtype.newbyteorder("=")), offset
    end = offset + count * dtype.itemsize
    if end > len(data):
        raise CheckpointException(f"Truncated payload in {path}")
    array = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
    return array.reshape(shape).astype(dtype.newbyteorder("="), copy=True), end


def save_checkpoint(
    path: Path,
    params: ParameterSet,
    assignment: np.ndarray,
    n_iterations: int,
    n_layers: int,
) -> Path:
    path = Path(path)
    assignment = np.asarray(assignment)
    if assignment.shape[0] != params.relation_count:
        raise CheckpointException(
            f"assignment covers {assignment.shape[0]} relations, "
            f"parameters hold {params.relation_count}"
        )
    counts = [
        params.user_count,
        params.entity_count,
        params.relation_count,
        params.dim,
        params.n_virtual,
        n_iterations,
        n_layers,
    ]
    with open(path, "wb") as f:
        f.write(CHECKPOINT_MAGIC)
        f.write(np.asarray([VERSION, *counts], dtype=COUNT).tobytes())
        for _, array in params.all_blocks():
            f.write(np.ascontiguousarray(array, dtype=FLOAT).tobytes())
        f.write(assignment.astype(INDEX).tobytes())
    logger.debug(f"Checkpoint written: {path}")
    return path


def load_checkpoint(
    path: Path,
    item_entity: np.ndarray = None,
    trainable: Tuple[str, ...] = None,
) -> Tuple[ParameterSet, np.ndarray, CheckpointHeader]:
    path = Path(path)
    data, counts = _read(path, CHECKPOINT_MAGIC, 7)
    header = CheckpointHeader(
        **dict(zip(CheckpointHeader.model_fields, (int(c) for c in counts)))
    )
    m, e, r, d, k = (
        header.user_count,
        header.entity_count,
        header.relation_count,
        header.dim,
        header.n_virtual,
    )
    offset = len(CHECKPOINT_MAGIC) + COUNT.itemsize * 8
    arrays = {}
    for name, shape in (
        ("user_emb", (m, d)),
        ("entity_emb", (e, d)),
        ("relation_feat", (r, d)),
        ("centroids", (k, d)),
        ("fusion_logits", (k,)),
    ):
        arrays[name], offset = _take(data, offset, FLOAT, shape, path)
    assignment, offset = _take(data, offset, INDEX, (r,), path)
    if offset != len(data):
        raise CheckpointException(f"Trailing bytes after payload in {path}")

    params = ParameterSet(
        **arrays,
        item_entity=(
            np.asarray(item_entity, dtype=np.int64)
            if item_entity is not None
            else np.zeros(0, dtype=np.int64)
        ),
    )
    if trainable is not None:
        params.trainable = tuple(trainable)
    return params, assignment.astype(np.int64), header


def save_layers(
    path: Path, user_layers: List[np.ndarray], entity_layers: List[np.ndarray]
) -> Path:
    path = Path(path)
    n_layers = len(user_layers)
    m, d = user_layers[0].shape
    e = entity_layers[0].shape[0]
    with open(path, "wb") as f:
        f.write(LAYERS_MAGIC)
        f.write(np.asarray([VERSION, n_layers, m, e, d], dtype=COUNT).tobytes())
        for layer in (*user_layers, *entity_layers):
            f.write(np.ascontiguousarray(layer, dtype=FLOAT).tobytes())
    logger.debug(f"Layer dump written: {path}")
    return path


def load_layers(path: Path) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    path = Path(path)
    data, counts = _read(path, LAYERS_MAGIC, 4)
    n_layers, m, e, d = (int(c) for c in counts)
    offset = len(LAYERS_MAGIC) + COUNT.itemsize * 5
    users, entities = [], []
    for _ in range(n_layers):
        layer, offset = _take(data, offset, FLOAT, (m, d), path)
        users.append(layer)
    for _ in range(n_layers):
        layer, offset = _take(data, offset, FLOAT, (e, d), path)
        entities.append(layer)
    return users, entities
