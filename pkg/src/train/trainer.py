#!/usr/bin/env python3

import os
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from src.core.seeding import SAMPLING_STREAM, child_seed, make_rng
from src.graph.bipartite import build_bipartite
from src.evaluation.metrics import Evaluator
from src.model.propagation import Propagator, final_representations, item_representations
from src.models.config import RunConfig
from src.models.dataset import SplitDataset
from src.models.graph import KnowledgeGraph
from src.models.metrics import MetricsReport
from src.models.partition import VrkgPartition
from src.models.snapshot import PropagationSnapshot
from src.params.parameters import ParameterSet
from src.train.backward import backward
from src.train.gradcheck import verify_gradients
from src.train.optimizer import AdamOptimizer
from src.train.sampler import NegativeSampler
from src.vrkg.scheduler import RelationClusterer


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

LOG_CUTOFF = 20


@dataclass
class TrainingResult:
    params: ParameterSet
    partition: VrkgPartition
    history: List[Dict[str, float]] = field(default_factory=list)
    report: Optional[MetricsReport] = None
    snapshot: Optional[PropagationSnapshot] = None

    @property
    def epochs_run(self) -> int:
        return len(self.history)


def _log_metrics(report: MetricsReport) -> Dict[str, float]:
    at = report.at(LOG_CUTOFF)
    return {
        f"recall@{LOG_CUTOFF}": at.recall,
        f"ndcg@{LOG_CUTOFF}": at.ndcg,
        f"hr@{LOG_CUTOFF}": at.hr,
        f"precision@{LOG_CUTOFF}": at.precision,
    }


class Trainer:
    """
    BPR training with Adam. Each epoch: optional re-clustering, then one pass over
    a fresh shuffle of the training pairs, one forward/backward/step per minibatch.
    """

    def __init__(
        self,
        config: RunConfig,
        dataset: SplitDataset,
        kg: KnowledgeGraph,
        params: ParameterSet,
        workers: int = 1,
    ):
        self.config = config
        self.dataset = dataset
        self.kg = kg
        self.params = params
        self.workers = workers
        self.clusterer = RelationClusterer(
            kg,
            strategy=config.vrkg.strategy,
            schedule=config.vrkg.schedule,
            init_rounds=config.vrkg.init_rounds,
            every=config.train.eval_every,
            per_relation=config.vrkg.ablation == "per-relation",
        )
        self.bipartite = build_bipartite(dataset.train)
        self.sampler = NegativeSampler(dataset.train, dataset.full)
        self.evaluator = Evaluator(
            dataset,
            sorted(set(config.train.cutoffs) | {LOG_CUTOFF}),
            workers=workers,
            drop_cold_users=config.data.drop_cold_users,
        )

    def propagator(self, partition: VrkgPartition) -> Propagator:
        return Propagator(
            partition,
            self.bipartite,
            self.params.item_entity,
            self.kg.entity_count,
            self.config.model,
            workers=self.workers,
        )

    def evaluate(
        self, propagator: Propagator
    ) -> Tuple[MetricsReport, PropagationSnapshot]:
        snapshot = propagator.forward(self.params)
        users, entities = final_representations(snapshot)
        items = item_representations(entities, self.params.item_entity)
        return self.evaluator.evaluate(users, items), snapshot

    def fit(self) -> TrainingResult:
        train_cfg = self.config.train
        if train_cfg.verify_gradients:
            verify_gradients(self.config.model, self.config.vrkg.strategy, train_cfg.seed)

        rng = make_rng(child_seed(train_cfg.seed, SAMPLING_STREAM))
        optimizer = AdamOptimizer(self.params, train_cfg)
        propagator = self.propagator(self.clusterer.initialize(self.params))
        history: List[Dict[str, float]] = []
        best_recall, stale = -1.0, 0

        for epoch in range(train_cfg.epochs):
            if self.clusterer.is_due(epoch):
                propagator = propagator.with_partition(self.clusterer.recluster(self.params))

            loss_sum, triples = 0.0, 0
            for batch in self.sampler.epoch_batches(train_cfg.batch_size, rng):
                snapshot = propagator.forward(self.params)
                breakdown, grads = backward(
                    propagator,
                    self.params,
                    snapshot,
                    batch,
                    train_cfg.l2,
                    self.config.vrkg.cluster_weight,
                )
                optimizer.step(self.params, grads)
                loss_sum += breakdown.bpr
                triples += breakdown.triples

            row: Dict[str, float] = {"epoch": epoch + 1, "loss": loss_sum / max(triples, 1)}
            logger.info(f"Epoch {epoch + 1}/{train_cfg.epochs}: mean BPR loss {row['loss']:.6f}")

            if (epoch + 1) % train_cfg.eval_every == 0:
                report, _ = self.evaluate(propagator)
                row.update(_log_metrics(report))
                logger.info(
                    f"Epoch {epoch + 1} evaluation: "
                    + ", ".join(f"{k}={v:.4f}" for k, v in _log_metrics(report).items())
                )
                recall = report.at(LOG_CUTOFF).recall
                if recall > best_recall:
                    best_recall, stale = recall, 0
                else:
                    stale += 1
            history.append(row)

            if train_cfg.patience and stale >= train_cfg.patience:
                logger.info(
                    f"Early stop after epoch {epoch + 1}: recall@{LOG_CUTOFF} has not "
                    f"improved for {stale} evaluations"
                )
                break

        report, snapshot = self.evaluate(propagator)
        logger.info(
            f"Final evaluation over {report.users_evaluated} users: "
            + ", ".join(f"{k}={v:.4f}" for k, v in _log_metrics(report).items())
        )
        return TrainingResult(
            params=self.params,
            partition=propagator.partition,
            history=history,
            report=report,
            snapshot=snapshot,
        )


def train(
    dataset: SplitDataset,
    kg: KnowledgeGraph,
    params: ParameterSet,
    config: RunConfig,
    workers: int = 1,
) -> TrainingResult:
    return Trainer(config, dataset, kg, params, workers).fit()
