#!/usr/bin/env python3

import os
import logging
import numpy as np
import pandas as pd
from pathlib import Path
from typing import Dict, List
from src.models.metrics import MetricsReport


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

REPORT_COLUMNS = ["cutoff", "recall", "ndcg", "hr", "precision", "users_evaluated"]
LOG_COLUMNS = ["epoch", "loss", "recall@20", "ndcg@20", "hr@20", "precision@20"]


def write_report(report: MetricsReport, path: Path) -> Path:
    frame = pd.DataFrame(report.rows(), columns=REPORT_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.6f")
    logger.info(f"Report written: {path}")
    return Path(path)


def read_report(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


def write_training_log(history: List[Dict[str, float]], path: Path) -> Path:
    """One row per epoch; metric columns stay blank on epochs without an evaluation."""
    frame = pd.DataFrame(history, columns=LOG_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.8f", na_rep="")
    logger.info(f"Training log written: {path}")
    return Path(path)


def write_relation_histogram(relation_counts: np.ndarray, path: Path) -> Path:
    """exposure count -> number of relations with that many triples."""
    exposure, relations = np.unique(np.asarray(relation_counts), return_counts=True)
    frame = pd.DataFrame({"exposure_count": exposure, "relation_count": relations})
    frame = frame.sort_values("exposure_count", ascending=False, kind="stable")
    frame.to_csv(path, index=False)
    logger.info(f"Relation histogram written: {path}")
    return Path(path)


def write_relation_assignment(
    canonical_counts: np.ndarray, assignment: np.ndarray, path: Path
) -> Path:
    frame = pd.DataFrame(
        {
            "relation_id": np.arange(assignment.shape[0]),
            "canonical_count": canonical_counts,
            "assigned_virtual_relation": assignment,
        }
    )
    frame.to_csv(path, index=False)
    logger.info(f"Relation assignment written: {path}")
    return Path(path)


def write_virtual_exposure(exposure: np.ndarray, path: Path) -> Path:
    frame = pd.DataFrame(
        {"virtual_relation": np.arange(exposure.shape[0]), "exposure_count": exposure}
    )
    frame.to_csv(path, index=False)
    logger.info(f"Virtual-relation exposure written: {path}")
    return Path(path)
