#!/usr/bin/env python3

from typing import Dict, List
from pydantic import BaseModel, ConfigDict, Field


class CutoffMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    cutoff: int = Field(ge=1)
    recall: float = Field(ge=0.0, le=1.0)
    ndcg: float = Field(ge=0.0, le=1.0)
    hr: float = Field(ge=0.0, le=1.0)
    precision: float = Field(ge=0.0, le=1.0)


class MetricsReport(BaseModel):
    """Unweighted per-user means at every cutoff."""

    model_config = ConfigDict(frozen=True)

    metrics: List[CutoffMetrics]
    users_evaluated: int = Field(ge=0)
    cold_users: int = Field(default=0, ge=0)

    @property
    def cutoffs(self) -> List[int]:
        return [m.cutoff for m in self.metrics]

    def at(self, cutoff: int) -> CutoffMetrics:
        for m in self.metrics:
            if m.cutoff == cutoff:
                return m
        raise KeyError(f"cutoff {cutoff} was not evaluated")

    def select(self, cutoffs: List[int]) -> "MetricsReport":
        wanted = set(cutoffs)
        return self.model_copy(
            update={"metrics": [m for m in self.metrics if m.cutoff in wanted]}
        )

    def rows(self) -> List[Dict[str, float]]:
        return [
            {**m.model_dump(), "users_evaluated": self.users_evaluated}
            for m in self.metrics
        ]
