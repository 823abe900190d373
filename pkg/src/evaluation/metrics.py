#!/usr/bin/env python3

import os
import logging
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence
from src.models.dataset import InteractionSet, SplitDataset
from src.models.graph import Adjacency
from src.models.metrics import CutoffMetrics, MetricsReport


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

METRICS = ("recall", "ndcg", "hr", "precision")
CHUNK_USERS = 256


def _positives(interactions: InteractionSet) -> Adjacency:
    return Adjacency.from_edges(
        interactions.users,
        interactions.items,
        interactions.user_count,
        interactions.item_count,
    )


def _discounts(length: int) -> np.ndarray:
    return 1.0 / np.log2(np.arange(2, length + 2, dtype=np.float64))


def rank_items(
    user: int,
    user_final: np.ndarray,
    item_final: np.ndarray,
    train_positives: np.ndarray,
) -> np.ndarray:
    """Every item except `train_positives`, by descending score; ties go to the lower id."""
    scores = item_final @ user_final[user]
    order = np.argsort(-scores, kind="stable")
    return order[~np.isin(order, train_positives)]


def compute_metrics(
    ranked: np.ndarray, test_positives: np.ndarray, cutoffs: Sequence[int]
) -> Optional[Dict[int, Dict[str, float]]]:
    """Per-user metric rows; None when the user has no test positive."""
    n_pos = int(np.unique(test_positives).shape[0])
    if n_pos == 0:
        return None
    longest = max(cutoffs)
    hits = np.isin(np.asarray(ranked)[:longest], test_positives).astype(np.float64)
    hits = np.pad(hits, (0, longest - hits.shape[0]))
    rows = _metric_rows(hits[None, :], np.asarray([n_pos]), cutoffs)
    return {n: {name: float(values[0]) for name, values in row.items()} for n, row in rows.items()}


def _metric_rows(
    hits: np.ndarray, n_pos: np.ndarray, cutoffs: Sequence[int]
) -> Dict[int, Dict[str, np.ndarray]]:
    """hits[u, r] = 1 when the item at rank r + 1 is a test positive of user u."""
    discounts = _discounts(hits.shape[1])
    # same accumulation order for both, so a perfect ranking scores exactly 1
    ideal = np.cumsum(discounts)
    gains = np.cumsum(hits * discounts, axis=1)
    rows = {}
    for n in cutoffs:
        found = hits[:, :n].sum(axis=1)
        rows[n] = {
            "recall": found / n_pos,
            "ndcg": gains[:, n - 1] / ideal[np.minimum(n, n_pos) - 1],
            "hr": (found > 0).astype(np.float64),
            "precision": found / n,
        }
    return rows


class Evaluator:
    """All-ranking evaluation over a frozen pair of final representation matrices."""

    def __init__(
        self,
        dataset: SplitDataset,
        cutoffs: Sequence[int],
        workers: int = 1,
        drop_cold_users: bool = False,
    ):
        self.cutoffs = sorted(set(int(n) for n in cutoffs))
        self.workers = max(1, int(workers))
        self.item_count = dataset.train.item_count
        self.train_positives = _positives(dataset.train)
        self.test_positives = _positives(dataset.test)

        cold = dataset.cold_users()
        self.cold_users = int(cold.shape[0])
        users = np.flatnonzero(self.test_positives.degrees > 0)
        if drop_cold_users:
            users = np.setdiff1d(users, cold)
        elif self.cold_users:
            logger.warning(
                f"{self.cold_users} users have test positives but no training pairs; "
                "they are ranked from their identity embedding"
            )
        self.users = users

    def _chunk(self, users: np.ndarray, user_final: np.ndarray, item_final: np.ndarray):
        longest = min(max(self.cutoffs), self.item_count)
        scores = user_final[users] @ item_final.T
        seen_rows = np.repeat(np.arange(users.shape[0]), self.train_positives.degrees[users])
        seen_cols = np.concatenate([self.train_positives.row(u) for u in users])
        scores[seen_rows, seen_cols] = -np.inf
        top = np.argsort(-scores, axis=1, kind="stable")[:, :longest]

        relevant = np.zeros_like(scores, dtype=bool)
        test_rows = np.repeat(np.arange(users.shape[0]), self.test_positives.degrees[users])
        test_cols = np.concatenate([self.test_positives.row(u) for u in users])
        relevant[test_rows, test_cols] = True
        hits = np.take_along_axis(relevant, top, axis=1).astype(np.float64)
        hits = np.pad(hits, ((0, 0), (0, max(self.cutoffs) - longest)))

        n_pos = relevant.sum(axis=1)
        return _metric_rows(hits, n_pos, self.cutoffs)

    def evaluate(self, user_final: np.ndarray, item_final: np.ndarray) -> MetricsReport:
        chunks = [
            self.users[start : start + CHUNK_USERS]
            for start in range(0, self.users.shape[0], CHUNK_USERS)
        ]
        if self.workers == 1 or len(chunks) <= 1:
            results = [self._chunk(c, user_final, item_final) for c in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(
                    executor.map(lambda c: self._chunk(c, user_final, item_final), chunks)
                )

        metrics: List[CutoffMetrics] = []
        for n in self.cutoffs:
            means = {}
            for name in METRICS:
                values = (
                    np.concatenate([r[n][name] for r in results])
                    if results
                    else np.zeros(0)
                )
                means[name] = float(values.mean()) if values.size else 0.0
            metrics.append(CutoffMetrics(cutoff=n, **means))
        return MetricsReport(
            metrics=metrics,
            users_evaluated=int(self.users.shape[0]),
            cold_users=self.cold_users,
        )


def evaluate(
    user_final: np.ndarray,
    item_final: np.ndarray,
    dataset: SplitDataset,
    cutoffs: Sequence[int] = (1, 5, 10, 20),
    workers: int = 1,
    drop_cold_users: bool = False,
) -> MetricsReport:
    return Evaluator(dataset, cutoffs, workers, drop_cold_users).evaluate(
        user_final, item_final
    )
