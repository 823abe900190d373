#!/usr/bin/env python3

from pathlib import Path
from typing import Optional


class RecommenderException(Exception):
    exit_code: int = 1
    category: str = "config"


class ConfigurationException(RecommenderException):
    exit_code = 1
    category = "config"


class DataException(RecommenderException):
    exit_code = 2
    category = "data"


class NumericException(RecommenderException):
    exit_code = 3
    category = "numeric"


class GraphException(DataException):
    def __init__(self, message: str, triple_index: Optional[int] = None):
        self.triple_index = triple_index
        if triple_index is not None:
            message = f"triple #{triple_index}: {message}"
        super().__init__(message)


class ParseException(DataException):
    def __init__(self, path: Path, line_number: int, message: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {message}")


class CheckpointException(DataException):
    pass


class CheckpointMismatchException(ConfigurationException):
    pass


class SamplingException(DataException):
    pass


class GradientException(NumericException):
    def __init__(self, block: str, message: str = "non-finite gradient"):
        self.block = block
        super().__init__(f"{message} in parameter block '{block}'")
