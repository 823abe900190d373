#!/usr/bin/env python3
import platform
from pathlib import Path


class PathManager:
    CHECKPOINT = "checkpoint.bin"
    TRAINING_LOG = "training_log.csv"
    REPORT = "report.csv"
    MANIFEST = "manifest.toml"
    LAYERS = "layers.bin"
    RELATION_HISTOGRAM = "relation_histogram.csv"
    RELATION_ASSIGNMENT = "relation_assignment.csv"
    VIRTUAL_EXPOSURE = "virtual_exposure.csv"

    def __init__(self, base_dir: Path):
        self.base_dir = Path(base_dir)

    def resolve(self, rel_path: str) -> Path:
        path = (self.base_dir / rel_path).resolve()
        if platform.system() == "Windows":
            path = Path(str(path).replace("/", "\\"))
        return path

    def create_dir(self, rel_path: str = ".") -> Path:
        path = self.resolve(rel_path)
        path.mkdir(parents=True, exist_ok=True)
        return path
