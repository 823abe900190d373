#!/usr/bin/env python3

import toml
import pandas as pd
import pytest
from pathlib import Path
from main import main
from tests.helpers import write_toy_config


ARTIFACTS = ("checkpoint.bin", "training_log.csv", "report.csv", "manifest.toml")


@pytest.fixture
def config_path(tmp_path) -> Path:
    return write_toy_config(tmp_path / "toy.toml", tmp_path / "unused")


def run(config_path, command, out, *extra) -> int:
    return main([command, "--config", str(config_path), "--out", str(out), "--threads", "1", *extra])


@pytest.fixture
def trained(tmp_path, config_path) -> Path:
    out = tmp_path / "run"
    assert run(config_path, "train", out, "--epochs", "10") == 0
    return out


def test_train_writes_every_artifact(trained):
    for name in ARTIFACTS:
        assert (trained / name).is_file(), name
    assert not (trained / "layers.bin").exists()

    manifest = toml.load(trained / "manifest.toml")
    assert manifest["run"]["command"] == "train"
    assert manifest["counts"]["users"] == 10
    assert manifest["counts"]["relations"] == 6
    assert manifest["vrkg"]["n_virtual_relations"] == 2
    assert sum(manifest["vrkg"]["exposure_counts"]) == manifest["counts"]["triples"] == 84
    assert len(manifest["inputs"]["kg_sha256"]) == 64


def test_training_log_columns(trained):
    frame = pd.read_csv(trained / "training_log.csv")
    assert frame.columns.tolist() == ["epoch", "loss", "recall@20", "ndcg@20", "hr@20", "precision@20"]
    assert frame["epoch"].tolist() == list(range(1, 11))
    assert frame["recall@20"].notna().sum() == 1


def test_missing_input_exits_with_data_error(tmp_path, config_path):
    out = tmp_path / "run"
    code = run(config_path, "train", out, "--interactions", str(tmp_path / "missing.txt"))
    assert code == 2
    assert not out.exists()


def test_invalid_setting_exits_with_config_error(tmp_path, config_path):
    assert run(config_path, "train", tmp_path / "run", "--k", "0") == 1


def test_k1_ablation_uses_one_virtual_relation(tmp_path, config_path):
    out = tmp_path / "k1"
    assert run(config_path, "train", out, "--epochs", "2", "--ablation", "k1") == 0
    manifest = toml.load(out / "manifest.toml")
    assert manifest["vrkg"]["n_virtual_relations"] == 1
    assert manifest["vrkg"]["exposure_counts"] == [84]


def test_per_relation_ablation_trains(tmp_path, config_path):
    out = tmp_path / "per-relation"
    assert run(config_path, "train", out, "--epochs", "2", "--ablation", "per-relation") == 0
    manifest = toml.load(out / "manifest.toml")
    assert manifest["vrkg"]["n_virtual_relations"] == 6
    assert sum(manifest["vrkg"]["exposure_counts"]) == 84


def test_eval_reproduces_the_final_report(tmp_path, config_path, trained):
    out = tmp_path / "eval"
    assert run(config_path, "eval", out, "--checkpoint", str(trained / "checkpoint.bin")) == 0
    assert (out / "report.csv").read_text() == (trained / "report.csv").read_text()


def test_eval_with_explicit_cutoffs(tmp_path, config_path, trained):
    out = tmp_path / "eval"
    code = run(
        config_path, "eval", out, "--checkpoint", str(trained / "checkpoint.bin"), "--cutoffs", "1,5,10,20"
    )
    assert code == 0
    assert pd.read_csv(out / "report.csv")["cutoff"].tolist() == [1, 5, 10, 20]


def test_eval_rejects_a_corrupted_checkpoint(tmp_path, config_path, trained):
    checkpoint = trained / "checkpoint.bin"
    data = bytearray(checkpoint.read_bytes())
    data[:4] = b"XXXX"
    checkpoint.write_bytes(bytes(data))
    assert run(config_path, "eval", tmp_path / "eval", "--checkpoint", str(checkpoint)) == 2


def write_kg(path: Path, counts) -> Path:
    lines = [
        f"{1000 + relation * 100 + i}\t{relation}\t{2000 + relation * 100 + i}"
        for relation, count in enumerate(counts)
        for i in range(count)
    ]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_stats_histogram(tmp_path, config_path):
    kg = write_kg(tmp_path / "kg.txt", (5, 5, 1))
    out = tmp_path / "stats"
    assert run(config_path, "stats", out, "--kg", str(kg)) == 0
    frame = pd.read_csv(out / "relation_histogram.csv")
    assert frame.to_dict("list") == {"exposure_count": [5, 1], "relation_count": [2, 1]}
    assert not (out / "virtual_exposure.csv").exists()


def test_stats_with_checkpoint(tmp_path, config_path, trained, kg_path):
    out = tmp_path / "stats"
    code = run(
        config_path, "stats", out, "--kg", str(kg_path), "--checkpoint", str(trained / "checkpoint.bin")
    )
    assert code == 0
    assignment = pd.read_csv(out / "relation_assignment.csv")
    assert len(assignment) == 6
    assert assignment["assigned_virtual_relation"].between(0, 1).all()
    exposure = pd.read_csv(out / "virtual_exposure.csv")
    assert exposure["exposure_count"].sum() == 84


def test_stats_rejects_a_mismatched_checkpoint(tmp_path, config_path, trained):
    kg = write_kg(tmp_path / "kg.txt", (5, 1))
    code = run(
        config_path, "stats", tmp_path / "stats", "--kg", str(kg), "--checkpoint", str(trained / "checkpoint.bin")
    )
    assert code == 1
