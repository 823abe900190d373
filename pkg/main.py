#!/usr/bin/env python3

import os
import sys
import logging
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional
from src.core.bootstrap import Bootstrap
from src.core.configuration import ConfigLoader
from src.models.config import RunConfig
from src.system.exceptions import ConfigurationException
from src.workflow.commands import cmd_eval, cmd_stats, cmd_train


logger = logging.getLogger(os.getenv("LOGGER", "VRKGRec"))

# flag -> dotted settings key
OVERRIDES = {
    "seed": "train.seed",
    "epochs": "train.epochs",
    "out": "output.directory",
    "threads": "app.threads",
    "ablation": "vrkg.ablation",
    "k": "model.n_virtual_relations",
    "layers": "model.n_layers",
    "iterations": "model.n_iterations",
    "cluster_strategy": "vrkg.strategy",
    "interactions": "data.interactions",
    "kg": "data.kg",
    "cutoffs": "train.cutoffs",
}


def parse_cutoffs(value: str) -> List[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoffs must be comma-separated integers: {value!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML file merged over config/settings.toml")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=str, help="output directory")
    common.add_argument("--threads", type=int, help="0 = all logical CPUs")
    common.add_argument("--ablation", choices=["none", "k1", "per-relation", "custom-K"])
    common.add_argument("--k", type=int, help="number of virtual relations")
    common.add_argument("--layers", type=int)
    common.add_argument("--iterations", type=int, help="LWS rounds per layer")
    common.add_argument("--cluster-strategy", choices=["entity-grounded", "static"])
    common.add_argument("--epochs", type=int)
    common.add_argument("--interactions", type=str, help="user-item interaction file")
    common.add_argument("--kg", type=str, help="knowledge-graph triple file")
    common.add_argument("--cutoffs", type=parse_cutoffs, help="e.g. 1,5,10,20")

    parser = argparse.ArgumentParser(
        prog="vrkgrec", description="Knowledge-aware recommendation over virtual relations."
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("train", parents=[common], help="ingest, train, write artifacts")
    evaluate = commands.add_parser("eval", parents=[common], help="evaluate a checkpoint")
    evaluate.add_argument("--checkpoint", type=Path, required=True)
    stats = commands.add_parser("stats", parents=[common], help="relation statistics")
    stats.add_argument("--checkpoint", type=Path)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    overrides: Dict[str, Any] = {
        key: getattr(args, flag) for flag, key in OVERRIDES.items()
    }
    return RunConfig.from_loader(
        ConfigLoader(user_config=args.config, overrides=overrides)
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except ConfigurationException as e:
        logger.error(f"{args.command} failed [{e.category} error]: {e}")
        return e.exit_code

    Bootstrap(config).run()
    if args.command == "train":
        return cmd_train(config)
    if args.command == "eval":
        return cmd_eval(config, args.checkpoint, args.cutoffs)
    return cmd_stats(config, args.kg, args.checkpoint)


if __name__ == "__main__":
    sys.exit(main())
