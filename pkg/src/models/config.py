#!/usr/bin/env python3

from typing import Any, Dict, List, Literal
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from src.core.configuration import ConfigLoader
from src.system.environment import default_thread_count
from src.system.exceptions import ConfigurationException


ClusterStrategy = Literal["entity-grounded", "static"]
ClusterSchedule = Literal["periodic", "once"]
AblationMode = Literal["none", "k1", "per-relation", "custom-K"]


class AppConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    logging: bool = True
    logging_level: str = "INFO"
    logger_name: str = Field(default="VRKGRec", min_length=1)
    threads: int = Field(default=0, ge=0, description="0 = all logical CPUs")

    @property
    def workers(self) -> int:
        return self.threads or default_thread_count()


class ModelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    embedding_dim: int = Field(default=64, ge=1, description="d")
    n_virtual_relations: int = Field(default=3, ge=1, description="K")
    n_iterations: int = Field(default=3, ge=1, description="Q, LWS rounds per layer")
    n_layers: int = Field(default=2, ge=0, description="L, 0 keeps raw ID embeddings")
    symmetric_items: bool = False


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lr: float = Field(default=1e-4, gt=0)
    l2: float = Field(default=1e-5, ge=0)
    batch_size: int = Field(default=1024, ge=1)
    epochs: int = Field(default=1000, ge=0)
    eval_every: int = Field(default=10, ge=1)
    seed: int = Field(default=2022, ge=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    patience: int = Field(default=0, ge=0)
    verify_gradients: bool = False
    cutoffs: List[int] = Field(default_factory=lambda: [1, 5, 10, 20])

    @field_validator("cutoffs")
    @classmethod
    def validate_cutoffs(cls, cutoffs: List[int]) -> List[int]:
        if not cutoffs:
            raise ValueError("at least one cutoff is required")
        if any(n < 1 for n in cutoffs):
            raise ValueError("cutoffs must be positive")
        return sorted(set(cutoffs))


class VrkgConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    strategy: ClusterStrategy = "entity-grounded"
    schedule: ClusterSchedule = "periodic"
    init_rounds: int = Field(default=10, ge=0)
    cluster_weight: float = Field(default=1e-3, ge=0)
    ablation: AblationMode = "none"


class DataConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    interactions: str = ""
    kg: str = ""
    split_ratio: float = Field(default=0.8, gt=0, lt=1)
    stratified: bool = False
    drop_cold_users: bool = False


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    directory: str = "storage/runs/latest"
    dump_layers: bool = False


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    app: AppConfig = Field(default_factory=AppConfig)
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    vrkg: VrkgConfig = Field(default_factory=VrkgConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @classmethod
    def from_mapping(cls, mapping: Dict[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(mapping)
        except ValidationError as e:
            details = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
                for err in e.errors()
            )
            raise ConfigurationException(f"Invalid configuration: {details}")

    @classmethod
    def from_loader(cls, loader: ConfigLoader) -> "RunConfig":
        return cls.from_mapping(loader.configs)

    def virtual_relation_count(self, relation_count: int) -> int:
        """K after applying the ablation mode to a graph with `relation_count` relations."""
        if self.vrkg.ablation == "k1":
            return 1
        if self.vrkg.ablation == "per-relation":
            return max(1, relation_count)
        return self.model.n_virtual_relations

    def with_virtual_relations(self, k: int) -> "RunConfig":
        model = self.model.model_copy(update={"n_virtual_relations": k})
        return self.model_copy(update={"model": model})
