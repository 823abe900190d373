#!/usr/bin/env python3

import numpy as np
from dataclasses import dataclass, field
from typing import Dict
from src.models.config import TrainConfig
from src.params.parameters import GradientSet, ParameterSet


@dataclass
class AdamState:
    first: Dict[str, np.ndarray] = field(default_factory=dict)
    second: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params: ParameterSet) -> "AdamState":
        return cls(
            first={name: np.zeros_like(a) for name, a in params.registry()},
            second={name: np.zeros_like(a) for name, a in params.registry()},
        )


def adam_step(
    params: ParameterSet, grads: GradientSet, state: AdamState, config: TrainConfig
) -> ParameterSet:
    """In-place bias-corrected Adam update of every registry block."""
    state.step += 1
    correction1 = 1.0 - config.beta1**state.step
    correction2 = 1.0 - config.beta2**state.step
    for name, array in params.registry():
        grad = grads[name]
        m = state.first[name]
        v = state.second[name]
        m *= config.beta1
        m += (1.0 - config.beta1) * grad
        v *= config.beta2
        v += (1.0 - config.beta2) * grad * grad
        array -= config.lr * (m / correction1) / (np.sqrt(v / correction2) + config.eps)
    params.check_finite()
    return params


class AdamOptimizer:
    def __init__(self, params: ParameterSet, config: TrainConfig):
        self.config = config
        self.state = AdamState.for_params(params)

    def step(self, params: ParameterSet, grads: GradientSet) -> ParameterSet:
        return adam_step(params, grads, self.state, self.config)
