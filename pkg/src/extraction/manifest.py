#!/usr/bin/env python3

import os
import toml
import hashlib
import logging
from pathlib import Path
from typing import Any, Dict
from src.system.exceptions import ConfigurationException


logger: logging.Logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))


def file_sha256(path: str | Path, chunk_size: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(chunk_size), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(path: Path, manifest: Dict[str, Any]) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        toml.dump(manifest, f)
    logger.debug(f"Manifest written: {path}")
    return path


def read_manifest(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationException(f"Run manifest not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return toml.load(f)
