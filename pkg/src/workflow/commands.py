#!/usr/bin/env python3

import os
import logging
from pathlib import Path
from typing import Callable, List, Optional
from src.models.config import RunConfig
from src.system.exceptions import RecommenderException
from src.workflow.orchestration import ExperimentWorkflow


logger: logging.Logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

EXIT_OK = 0


def run_command(name: str, action: Callable[[], object]) -> int:
    """Runs `action`, mapping recommender errors to their exit codes."""
    try:
        action()
    except RecommenderException as e:
        logger.error(f"{name} failed [{e.category} error]: {e}")
        return e.exit_code
    return EXIT_OK


def cmd_train(config: RunConfig) -> int:
    return run_command("train", ExperimentWorkflow(config).train)


def cmd_eval(
    config: RunConfig, checkpoint: Path, cutoffs: Optional[List[int]] = None
) -> int:
    return run_command(
        "eval", lambda: ExperimentWorkflow(config).evaluate(checkpoint, cutoffs)
    )


def cmd_stats(
    config: RunConfig, kg_path: Optional[str] = None, checkpoint: Optional[Path] = None
) -> int:
    return run_command(
        "stats",
        lambda: ExperimentWorkflow(config).stats(kg_path or config.data.kg, checkpoint),
    )
