#!/usr/bin/env python3

import numpy as np
from typing import List
from pydantic import BaseModel, ConfigDict, Field


class PropagationSnapshot(BaseModel):
    """
    Output of one forward pass. Index l of `entity_layers` / `user_layers` holds
    e^(l); `per_vrkg_buffers[l - 1][k]` holds the pre-fusion e_{h,k}^(l) and
    `item_user_buffers[l - 1]` the user-side item smoothing (symmetric mode only).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    entity_layers: List[np.ndarray]
    user_layers: List[np.ndarray]
    per_vrkg_buffers: List[List[np.ndarray]] = Field(default_factory=list)
    item_user_buffers: List[np.ndarray] = Field(default_factory=list)
    fusion_weights: np.ndarray

    @property
    def n_layers(self) -> int:
        return len(self.entity_layers) - 1
