#!/usr/bin/env python3

import os
import math
import logging
import numpy as np
from dataclasses import dataclass, field
from typing import List, Tuple
from src.core.seeding import make_rng
from src.graph.bipartite import build_bipartite
from src.graph.knowledge_graph import add_inverse_relations, build_kg
from src.model.propagation import Propagator
from src.models.config import ModelConfig
from src.models.dataset import InteractionSet
from src.params.parameters import GradientSet, ParameterSet, init_params
from src.system.exceptions import NumericException
from src.train.backward import LossBreakdown, backward, objective
from src.train.sampler import BprBatch, NegativeSampler
from src.vrkg.scheduler import RelationClusterer


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


@dataclass
class GradientProblem:
    params: ParameterSet
    propagator: Propagator
    batch: BprBatch
    l2: float
    cluster_weight: float

    def loss(self, params: ParameterSet) -> float:
        return objective(self.propagator, params, self.batch, self.l2, self.cluster_weight)

    def gradients(self, params: ParameterSet) -> Tuple[LossBreakdown, GradientSet]:
        snapshot = self.propagator.forward(params)
        return backward(
            self.propagator, params, snapshot, self.batch, self.l2, self.cluster_weight
        )


@dataclass(frozen=True)
class CoordinateCheck:
    block: str
    index: Tuple[int, ...]
    analytic: float
    numeric: float

    @property
    def abs_error(self) -> float:
        return abs(self.analytic - self.numeric)

    @property
    def rel_error(self) -> float:
        scale = max(abs(self.analytic), abs(self.numeric))
        return self.abs_error / scale if scale > 0 else 0.0

    def passes(self, rtol: float, atol: float) -> bool:
        return self.rel_error < rtol or self.abs_error <= atol


@dataclass
class GradientCheckReport:
    rtol: float
    atol: float
    checks: List[CoordinateCheck] = field(default_factory=list)
    registry_size: int = 0

    @property
    def failures(self) -> List[CoordinateCheck]:
        return [c for c in self.checks if not c.passes(self.rtol, self.atol)]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and not self.failures

    @property
    def covers_registry(self) -> bool:
        return len({(c.block, c.index) for c in self.checks}) == self.registry_size

    @property
    def blocks(self) -> List[str]:
        return sorted({c.block for c in self.checks})

    @property
    def max_rel_error(self) -> float:
        return max((c.rel_error for c in self.checks), default=0.0)


def build_toy_problem(
    seed: int = 0,
    model: ModelConfig = None,
    strategy: str = "entity-grounded",
    user_count: int = 5,
    item_count: int = 8,
    entity_count: int = 12,
    canonical_relations: int = 2,
    l2: float = 1e-3,
    cluster_weight: float = 1e-3,
) -> GradientProblem:
    """Small seeded recommender whose every parameter block reaches the objective."""
    model = model or ModelConfig(
        embedding_dim=8, n_virtual_relations=2, n_iterations=2, n_layers=2
    )
    rng = make_rng(seed)

    users, items = [], []
    for user in range(user_count):
        picked = rng.choice(item_count, size=int(rng.integers(2, 4)), replace=False)
        users.extend([user] * picked.size)
        items.extend(picked.tolist())
    train = InteractionSet(
        users=np.asarray(users, dtype=np.int64),
        items=np.asarray(items, dtype=np.int64),
        user_count=user_count,
        item_count=item_count,
    )

    triples = []
    for head in range(entity_count):
        for _ in range(2):
            tail = int(rng.integers(0, entity_count))
            if tail != head:
                triples.append((head, int(rng.integers(0, canonical_relations)), tail))
    # every canonical relation owns at least one fact
    for relation in range(canonical_relations):
        triples.append((relation, relation, entity_count - 1 - relation))
    kg = add_inverse_relations(
        build_kg(np.asarray(triples), entity_count, canonical_relations)
    )

    item_entity = np.arange(item_count, dtype=np.int64)
    params = init_params(
        user_count,
        entity_count,
        kg.relation_count,
        dim=model.embedding_dim,
        n_virtual=model.n_virtual_relations,
        seed=seed,
        item_entity=item_entity,
        strategy=strategy,
    )
    # non-uniform fusion weights so the logit gradient is not degenerate
    params.fusion_logits[:] = rng.normal(0.0, 0.5, size=params.n_virtual)

    clusterer = RelationClusterer(kg, strategy=strategy, schedule="once", init_rounds=3)
    partition = clusterer.initialize(params)
    propagator = Propagator(
        partition, build_bipartite(train), item_entity, entity_count, model
    )
    batch = NegativeSampler(train, train).sample_batch(12, rng)
    return GradientProblem(params, propagator, batch, l2, cluster_weight)


def _sample_coordinates(
    params: ParameterSet, n_coordinates: int, rng: np.random.Generator
) -> List[Tuple[str, Tuple[int, ...]]]:
    """Every registry coordinate when there are at most `n_coordinates`, else a spread sample."""
    if sum(array.size for _, array in params.registry()) <= n_coordinates:
        return [
            (name, tuple(int(i) for i in index))
            for name, array in params.registry()
            for index in np.ndindex(array.shape)
        ]
    blocks = sorted(params.registry(), key=lambda item: item[1].size)
    coordinates = []
    for position, (name, array) in enumerate(blocks):
        # small blocks are covered fully, the rest share what is left of the quota
        quota = math.ceil((n_coordinates - len(coordinates)) / (len(blocks) - position))
        flat = rng.permutation(array.size)[:quota]
        coordinates.extend(
            (name, tuple(int(i) for i in np.unravel_index(f, array.shape))) for f in flat
        )
    return coordinates


def check_gradients(
    problem: GradientProblem,
    n_coordinates: int = 240,
    step: float = 1e-4,
    rtol: float = 1e-4,
    atol: float = 1e-7,
    seed: int = 0,
) -> GradientCheckReport:
    """Central finite differences against the analytic gradient on sampled coordinates."""
    _, grads = problem.gradients(problem.params)
    report = GradientCheckReport(
        rtol=rtol,
        atol=atol,
        registry_size=sum(array.size for _, array in problem.params.registry()),
    )
    for name, index in _sample_coordinates(problem.params, n_coordinates, make_rng(seed)):
        shifted = problem.params.copy()
        block = shifted.block(name)
        original = block[index]
        block[index] = original + step
        upper = problem.loss(shifted)
        block[index] = original - step
        lower = problem.loss(shifted)
        report.checks.append(
            CoordinateCheck(
                block=name,
                index=index,
                analytic=float(grads[name][index]),
                numeric=(upper - lower) / (2.0 * step),
            )
        )
    logger.info(
        f"Gradient check: {len(report.checks)} coordinates over {report.blocks}, "
        f"max relative error {report.max_rel_error:.3e}, {len(report.failures)} failures"
    )
    return report


def verify_gradients(model: ModelConfig, strategy: str, seed: int) -> GradientCheckReport:
    toy_model = model.model_copy(update={"embedding_dim": 8})
    report = check_gradients(build_toy_problem(seed, toy_model, strategy), seed=seed)
    if not report.passed:
        worst = max(report.failures, key=lambda c: c.rel_error)
        raise NumericException(
            f"gradient check failed on {len(report.failures)} coordinates; worst "
            f"{worst.block}{list(worst.index)}: analytic {worst.analytic:.6e}, "
            f"numeric {worst.numeric:.6e}"
        )
    return report
