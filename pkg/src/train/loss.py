#!/usr/bin/env python3

import numpy as np
from scipy.special import expit


def bpr_loss(pos_scores: np.ndarray, neg_scores: np.ndarray) -> float:
    """sum of -ln sigmoid(pos - neg), evaluated as softplus(-(pos - neg))."""
    pos_scores = np.asarray(pos_scores, dtype=np.float64)
    neg_scores = np.asarray(neg_scores, dtype=np.float64)
    if pos_scores.shape != neg_scores.shape:
        raise ValueError(
            f"score lists differ in length: {pos_scores.shape} vs {neg_scores.shape}"
        )
    return float(np.sum(np.logaddexp(0.0, -(pos_scores - neg_scores))))


def bpr_margin_gradient(pos_scores: np.ndarray, neg_scores: np.ndarray) -> np.ndarray:
    """d loss / d (pos - neg) for every triple."""
    return -expit(-(np.asarray(pos_scores) - np.asarray(neg_scores)))
