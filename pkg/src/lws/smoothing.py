#!/usr/bin/env python3
"""
Local Weighted Smoothing.

One aggregation step moves a center vector toward the inner-product weighted
sum of its fixed neighbor vectors and rescales the result with the bounding map
u -> u * |u| / (|u|^2 + 1). Weights are not softmax-normalised, so the full
neighbor list is always used.
"""

import numpy as np
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple
from pydantic import BaseModel, ConfigDict, Field
from src.models.graph import Adjacency


class LwsConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_iterations: int = Field(default=3, ge=1, description="Q")


def propagation_weight(center_vec: np.ndarray, neighbor_vec: np.ndarray) -> float:
    return float(np.dot(center_vec, neighbor_vec))


def norm_bound(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    norm = np.linalg.norm(u)
    if norm == 0.0:
        return np.zeros_like(u)
    return u * (norm / (norm * norm + 1.0))


def norm_bound_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return matrix * (norms / (norms * norms + 1.0))


def norm_bound_rows_backward(matrix: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Vector-Jacobian product of norm_bound_rows at `matrix`; zero rows get zero gradient."""
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    squared = norms * norms
    scale = norms / (squared + 1.0)
    slope = (1.0 - squared) / (squared + 1.0) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(norms > 0.0, slope / norms, 0.0)
    projection = np.sum(matrix * grad, axis=1, keepdims=True)
    return scale * grad + radial * projection * matrix


def aggregate_once(
    center_vec: np.ndarray, neighbor_ids: Sequence[int], neighbor_matrix: np.ndarray
) -> np.ndarray:
    center_vec = np.asarray(center_vec, dtype=np.float64)
    ids = np.asarray(neighbor_ids, dtype=np.int64)
    if ids.size == 0:
        return norm_bound(center_vec)
    neighbors = np.asarray(neighbor_matrix, dtype=np.float64)[ids]
    weights = neighbors @ center_vec
    return norm_bound(center_vec + weights @ neighbors)


def lws_smooth(
    center_vec: np.ndarray,
    neighbor_ids: Sequence[int],
    neighbor_matrix: np.ndarray,
    n_iterations: int,
) -> np.ndarray:
    """Q aggregation steps; weights are recomputed from the current vector every step."""
    LwsConfig(n_iterations=n_iterations)
    smoothed = aggregate_once(center_vec, neighbor_ids, neighbor_matrix)
    for _ in range(n_iterations - 1):
        smoothed = aggregate_once(smoothed, neighbor_ids, neighbor_matrix)
    return smoothed


@dataclass
class SmoothingTrace:
    """Per-step inputs and pre-bound sums of one whole-graph pass."""

    inputs: List[np.ndarray] = field(default_factory=list)
    sums: List[np.ndarray] = field(default_factory=list)
    weights: List[np.ndarray] = field(default_factory=list)


def _edge_weights(
    centers: np.ndarray, neighbors: np.ndarray, rows: np.ndarray, cols: np.ndarray
) -> np.ndarray:
    return np.einsum("ij,ij->i", centers[rows], neighbors[cols])


def smooth_graph(
    centers: np.ndarray,
    neighbors: np.ndarray,
    adjacency: Adjacency,
    n_iterations: int,
    keep_trace: bool = False,
) -> Tuple[np.ndarray, SmoothingTrace]:
    """
    lws_smooth applied to every row of `centers` at once. Row r smooths against
    neighbors[adjacency.row(r)]; `neighbors` is held fixed across the Q steps.
    """
    rows, cols = adjacency.rows, adjacency.indices
    trace = SmoothingTrace()
    current = centers
    for _ in range(n_iterations):
        weights = _edge_weights(current, neighbors, rows, cols)
        summed = current + adjacency.matrix(weights) @ neighbors
        if keep_trace:
            trace.inputs.append(current)
            trace.sums.append(summed)
            trace.weights.append(weights)
        current = norm_bound_rows(summed)
    return current, trace


def smooth_graph_backward(
    centers: np.ndarray,
    neighbors: np.ndarray,
    adjacency: Adjacency,
    n_iterations: int,
    grad_output: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gradients of a smooth_graph pass with respect to `centers` and `neighbors`.
    The forward steps are recomputed here rather than kept from the forward pass.
    """
    _, trace = smooth_graph(centers, neighbors, adjacency, n_iterations, keep_trace=True)
    rows, cols = adjacency.rows, adjacency.indices
    grad_neighbors = np.zeros_like(neighbors)
    grad = grad_output
    for step in reversed(range(n_iterations)):
        current, summed = trace.inputs[step], trace.sums[step]
        grad_sum = norm_bound_rows_backward(summed, grad)
        # d pi(h, t) for every stored edge
        grad_weights = adjacency.matrix(_edge_weights(grad_sum, neighbors, rows, cols))
        weighted = adjacency.matrix(trace.weights[step])
        grad_neighbors += weighted.T @ grad_sum + grad_weights.T @ current
        grad = grad_sum + grad_weights @ neighbors
    return grad, grad_neighbors
