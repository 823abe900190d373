#!/usr/bin/env python3
import os
import logging
import warnings
from src.models.config import RunConfig
from src.system.logger import LoggerConfig
from src.system.environment import setup_env_variables, thread_variables

warnings.filterwarnings("ignore", category=FutureWarning)


class Bootstrap:
    """Process-wide setup shared by every command: logger and thread settings."""

    def __init__(self, config: RunConfig):
        self.config = config
        os.environ["LOGGER"] = config.app.logger_name
        self.logger: logging.Logger = LoggerConfig(
            use=config.app.logging,
            name=config.app.logger_name,
            level=config.app.logging_level,
        ).get()

    def run(self) -> logging.Logger:
        self.logger.debug("Running app configuration.")
        self._setup_environment()
        return self.logger

    def _setup_environment(self):
        workers = self.config.app.workers
        self.logger.debug(f"Setting up thread environment: {workers} threads.")
        setup_env_variables(thread_variables(workers))
