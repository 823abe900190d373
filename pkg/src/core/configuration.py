#!/usr/bin/env python3
import copy
import toml
from pathlib import Path
from typing import Any, Dict, Optional
from src.system.exceptions import ConfigurationException


def deep_merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigLoader:
    """
    Layered settings: packaged defaults, then an optional user TOML file, then
    dotted-key overrides (usually command-line flags).
    """

    def __init__(
        self,
        base_dir: Path = Path(__file__).parent.parent.parent,
        user_config: Optional[Path] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> None:
        self.base_dir: Path = base_dir
        self.configs: dict = self._load_toml(self.base_dir / "config/settings.toml")
        if user_config is not None:
            self.configs = deep_merge(self.configs, self._load_toml(Path(user_config)))
        for key, value in (overrides or {}).items():
            if value is not None:
                self.set(key, value)

    @staticmethod
    def _load_toml(path: Path) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as f:
                return toml.load(f)
        except FileNotFoundError:
            raise ConfigurationException(f"Config file not found: {path}")
        except toml.TomlDecodeError as e:
            raise ConfigurationException(f"Invalid TOML in {path}: {e}")

    def get(self, key: str, default=None) -> Any:
        keys = key.split(".")
        val = self.configs
        for k in keys:
            if not isinstance(val, dict):
                return default
            val = val.get(k, {})
        return val if val != {} else default

    def set(self, key: str, value: Any) -> None:
        *parents, leaf = key.split(".")
        node = self.configs
        for k in parents:
            node = node.setdefault(k, {})
        node[leaf] = value
