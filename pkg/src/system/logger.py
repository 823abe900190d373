#!/usr/bin/env python3

import os
import sys
import logging
import coloredlogs
from typing import Any, Dict
from pydantic import BaseModel, ConfigDict, Field, model_validator


LEVELS: Dict[str, int] = {
    "CRITICAL": logging.CRITICAL,
    "ERROR": logging.ERROR,
    "WARNING": logging.WARNING,
    "INFO": logging.INFO,
    "DEBUG": logging.DEBUG,
}
LOG_FORMAT = "%(asctime)s %(levelname)s %(filename)s:%(lineno)d %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
LEVEL_STYLES = {
    "debug": {"color": "white"},
    "info": {"color": "green"},
    "warning": {"color": "yellow"},
    "error": {"color": "red"},
    "critical": {"color": "red", "bold": True},
}


class LoggerConfig(BaseModel):
    """
    Console logger for training runs. `LOGGING_ENABLED` in the environment forces
    it on; when disabled, the named logger swallows every record.
    """

    model_config = ConfigDict(extra="forbid")

    use: bool = Field(default=False, description="Install the console handler")
    name: str = Field(default="VRKGRec", min_length=1)
    level: str = Field(default="INFO", examples=list(LEVELS))

    @model_validator(mode="before")
    @classmethod
    def normalize(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        if os.getenv("LOGGING_ENABLED", None):
            values["use"] = True
        level = values.get("level", "INFO")
        if isinstance(level, int):
            if not 0 <= level <= 50:
                raise ValueError("Log level must be between 0 and 50")
            by_number = {number: name for name, number in LEVELS.items()}
            values["level"] = by_number.get(level, "INFO")
        else:
            level = str(level).upper()
            if level not in LEVELS:
                raise ValueError(f"Invalid log level. Must be one of: {list(LEVELS)}")
            values["level"] = level
        return values

    @property
    def numeric_level(self) -> int:
        return LEVELS[self.level]

    def get(self) -> logging.Logger:
        logger = logging.getLogger(self.name)
        logger.handlers.clear()
        logger.propagate = False
        if not self.use:
            logger.addHandler(logging.NullHandler())
            return logger

        logger.setLevel(self.numeric_level)
        coloredlogs.install(
            level=self.numeric_level,
            logger=logger,
            stream=sys.stdout,
            fmt=LOG_FORMAT,
            datefmt=DATE_FORMAT,
            level_styles=LEVEL_STYLES,
        )
        return logger
