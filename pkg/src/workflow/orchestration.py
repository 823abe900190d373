#!/usr/bin/env python3

import os
import logging
import numpy as np
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple
from pydantic import BaseModel, ConfigDict
from src.core.paths import PathManager
from src.core.seeding import INIT_STREAM, SPLIT_STREAM, child_seed
from src.evaluation.metrics import Evaluator
from src.evaluation.report import (
    write_relation_assignment,
    write_relation_histogram,
    write_report,
    write_training_log,
    write_virtual_exposure,
)
from src.extraction.file_reader import load_interactions, load_triples
from src.extraction.manifest import file_sha256, read_manifest, write_manifest
from src.extraction.splitter import split
from src.graph.bipartite import build_bipartite
from src.model.propagation import Propagator, final_representations, item_representations
from src.models.config import RunConfig
from src.models.dataset import IdMaps, InteractionSet, SplitDataset
from src.models.graph import KnowledgeGraph
from src.models.metrics import MetricsReport
from src.params.checkpoint import (
    CheckpointHeader,
    load_checkpoint,
    save_checkpoint,
    save_layers,
)
from src.params.parameters import init_params, trainable_blocks
from src.system.exceptions import CheckpointMismatchException, ConfigurationException
from src.train.trainer import TrainingResult, train
from src.vrkg.partition import exposure_counts
from src.vrkg.scheduler import RelationClusterer


logger: logging.Logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


class IngestedData(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    interactions: InteractionSet
    maps: IdMaps
    kg: KnowledgeGraph
    dataset: SplitDataset


def _plain(value: Any) -> Any:
    """numpy scalars/arrays -> TOML-serialisable builtins."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


class ExperimentWorkflow:
    """
    ingest -> (ablation) -> train -> artifacts, plus evaluation of a stored
    checkpoint and KG statistics. The output directory is only created once the
    inputs have been read successfully.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.workers = config.app.workers
        self.paths = PathManager(Path(config.output.directory))

    def ingest(self, config: Optional[RunConfig] = None) -> IngestedData:
        config = config or self.config
        if not config.data.interactions or not config.data.kg:
            raise ConfigurationException(
                "both data.interactions and data.kg must be set (--interactions / --kg)"
            )
        interactions, maps = load_interactions(config.data.interactions)
        kg, maps = load_triples(config.data.kg, maps)
        dataset = split(
            interactions,
            child_seed(config.train.seed, SPLIT_STREAM),
            ratio=config.data.split_ratio,
            stratified=config.data.stratified,
        )
        cold = dataset.cold_users().shape[0]
        if cold:
            logger.warning(f"{cold} users have every interaction in the test split")
        return IngestedData(interactions=interactions, maps=maps, kg=kg, dataset=dataset)

    def resolve(self, kg: KnowledgeGraph) -> RunConfig:
        """Applies the ablation mode: only the number of virtual relations changes."""
        k = self.config.virtual_relation_count(kg.relation_count)
        if k != self.config.model.n_virtual_relations:
            logger.info(f"Ablation '{self.config.vrkg.ablation}': K = {k}")
        return self.config.with_virtual_relations(k)

    def manifest(
        self,
        config: RunConfig,
        data: IngestedData,
        exposure: np.ndarray,
        command: str,
    ) -> Dict[str, Any]:
        kg = data.kg
        return _plain(
            {
                "run": {
                    "command": command,
                    "created": datetime.now(timezone.utc).isoformat(),
                    "seed": config.train.seed,
                    "threads": self.workers,
                },
                "inputs": {
                    "interactions": str(Path(config.data.interactions).resolve()),
                    "interactions_sha256": file_sha256(config.data.interactions),
                    "kg": str(Path(config.data.kg).resolve()),
                    "kg_sha256": file_sha256(config.data.kg),
                },
                "counts": {
                    "users": data.interactions.user_count,
                    "items": data.interactions.item_count,
                    "interactions": data.interactions.size,
                    "train_pairs": data.dataset.train.size,
                    "test_pairs": data.dataset.test.size,
                    "cold_users": data.dataset.cold_users().shape[0],
                    "entities": kg.entity_count,
                    "relations": kg.relation_count,
                    "canonical_relations": kg.canonical_relation_count,
                    "triples": kg.triple_count,
                    "canonical_triples": kg.triple_count // 2,
                },
                "vrkg": {
                    "n_virtual_relations": config.model.n_virtual_relations,
                    "ablation": config.vrkg.ablation,
                    "strategy": config.vrkg.strategy,
                    "exposure_counts": exposure,
                },
                "config": config.model_dump(),
            }
        )

    def train(self) -> Tuple[TrainingResult, Path]:
        data = self.ingest()
        config = self.resolve(data.kg)
        params = init_params(
            data.interactions.user_count,
            data.kg.entity_count,
            data.kg.relation_count,
            dim=config.model.embedding_dim,
            n_virtual=config.model.n_virtual_relations,
            seed=child_seed(config.train.seed, INIT_STREAM),
            item_entity=data.maps.item_entity,
            strategy=config.vrkg.strategy,
        )
        result = train(data.dataset, data.kg, params, config, workers=self.workers)

        out = self.paths.create_dir()
        save_checkpoint(
            out / PathManager.CHECKPOINT,
            result.params,
            result.partition.assignment.assign,
            config.model.n_iterations,
            config.model.n_layers,
        )
        write_training_log(result.history, out / PathManager.TRAINING_LOG)
        write_report(result.report.select(config.train.cutoffs), out / PathManager.REPORT)
        if config.output.dump_layers:
            save_layers(
                out / PathManager.LAYERS,
                result.snapshot.user_layers,
                result.snapshot.entity_layers,
            )
        write_manifest(
            out / PathManager.MANIFEST,
            self.manifest(config, data, exposure_counts(result.partition), "train"),
        )
        logger.info(f"Run artifacts written to {out}")
        return result, out

    def _check_header(
        self, header: CheckpointHeader, config: RunConfig, kg: KnowledgeGraph, users: int
    ) -> None:
        expected = {
            "user_count": users,
            "entity_count": kg.entity_count,
            "relation_count": kg.relation_count,
            "dim": config.model.embedding_dim,
            "n_virtual": config.model.n_virtual_relations,
            "n_iterations": config.model.n_iterations,
            "n_layers": config.model.n_layers,
        }
        mismatched = [
            f"{name}: checkpoint {getattr(header, name)}, expected {value}"
            for name, value in expected.items()
            if getattr(header, name) != value
        ]
        if mismatched:
            raise CheckpointMismatchException(
                "checkpoint does not match the data/config: " + "; ".join(mismatched)
            )

    def evaluate(
        self, checkpoint: Path, cutoffs: Optional[List[int]] = None
    ) -> Tuple[MetricsReport, Path]:
        """
        Rebuilds the run from the manifest stored next to `checkpoint` (seed,
        split, model settings); explicit data paths in the current config win.
        """
        checkpoint = Path(checkpoint)
        manifest = read_manifest(checkpoint.parent / PathManager.MANIFEST)
        stored = dict(manifest.get("config", {}))
        for key in ("interactions", "kg"):
            value = getattr(self.config.data, key)
            if value:
                stored.setdefault("data", {})[key] = value
        stored["app"] = self.config.app.model_dump()
        config = RunConfig.from_mapping(stored)

        data = self.ingest(config)
        params, assign, header = load_checkpoint(
            checkpoint,
            item_entity=data.maps.item_entity,
            trainable=trainable_blocks(config.vrkg.strategy),
        )
        self._check_header(header, config, data.kg, data.interactions.user_count)

        partition = RelationClusterer(data.kg).restore(assign, header.n_virtual)
        propagator = Propagator(
            partition,
            build_bipartite(data.dataset.train),
            params.item_entity,
            data.kg.entity_count,
            config.model,
            workers=self.workers,
        )
        users, entities = final_representations(propagator.forward(params))
        cutoffs = cutoffs or config.train.cutoffs
        report = Evaluator(
            data.dataset,
            cutoffs,
            workers=self.workers,
            drop_cold_users=config.data.drop_cold_users,
        ).evaluate(users, item_representations(entities, params.item_entity))

        out = self.paths.create_dir()
        write_report(report, out / PathManager.REPORT)
        return report, out

    def stats(self, kg_path: str, checkpoint: Optional[Path] = None) -> Path:
        kg, _ = load_triples(kg_path, IdMaps())
        canonical = kg.relation_counts()[: kg.canonical_relation_count]
        assign = header = None
        if checkpoint is not None:
            _, assign, header = load_checkpoint(Path(checkpoint))
            if header.relation_count != kg.relation_count:
                raise CheckpointMismatchException(
                    f"checkpoint covers {header.relation_count} relations, "
                    f"the knowledge graph has {kg.relation_count}"
                )

        out = self.paths.create_dir()
        write_relation_histogram(canonical, out / PathManager.RELATION_HISTOGRAM)
        if assign is not None:
            counts = kg.relation_counts()
            write_relation_assignment(
                counts, assign, out / PathManager.RELATION_ASSIGNMENT
            )
            partition = RelationClusterer(kg).restore(assign, header.n_virtual)
            write_virtual_exposure(
                exposure_counts(partition), out / PathManager.VIRTUAL_EXPOSURE
            )
        return out
