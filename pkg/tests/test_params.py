#!/usr/bin/env python3

import numpy as np
import pytest
from src.models.config import TrainConfig
from src.params.checkpoint import (
    CHECKPOINT_MAGIC,
    load_checkpoint,
    load_layers,
    save_checkpoint,
    save_layers,
)
from src.params.parameters import (
    GradientSet,
    add_l2_gradient,
    init_params,
    l2_penalty,
    softmax,
)
from src.system.exceptions import CheckpointException, GradientException, NumericException
from src.train.optimizer import AdamOptimizer


def test_init_params_shapes_and_bounds():
    params = init_params(5, 12, 4, dim=8, n_virtual=2, seed=1)
    assert params.user_emb.shape == (5, 8)
    assert params.entity_emb.shape == (12, 8)
    assert params.relation_feat.shape == (4, 8)
    assert params.centroids.shape == (2, 8)
    np.testing.assert_array_equal(params.fusion_logits, [0.0, 0.0])
    np.testing.assert_allclose(params.fusion_weights(), [0.5, 0.5])
    bound = 1.0 / np.sqrt(8)
    for _, array in params.all_blocks():
        assert np.all(np.abs(array) <= bound)


def test_init_params_is_seeded():
    first = init_params(3, 4, 2, dim=4, n_virtual=2, seed=9)
    again = init_params(3, 4, 2, dim=4, n_virtual=2, seed=9)
    for (_, a), (_, b) in zip(first.all_blocks(), again.all_blocks()):
        np.testing.assert_array_equal(a, b)


def test_init_params_rejects_empty_dimensions():
    with pytest.raises(NumericException):
        init_params(3, 4, 2, dim=0)


def test_registry_depends_on_strategy():
    grounded = init_params(2, 3, 2, dim=4, n_virtual=2, strategy="entity-grounded")
    static = init_params(2, 3, 2, dim=4, n_virtual=2, strategy="static")
    assert [name for name, _ in grounded.registry()] == [
        "user_emb",
        "entity_emb",
        "fusion_logits",
    ]
    assert {name for name, _ in static.registry()} == {
        "user_emb",
        "entity_emb",
        "relation_feat",
        "centroids",
        "fusion_logits",
    }


def test_item_embedding_is_a_view_of_aligned_entities():
    params = init_params(2, 6, 1, dim=4, n_virtual=1, item_entity=np.arange(3))
    params.item_emb[0, 0] = 42.0
    assert params.entity_emb[0, 0] == 42.0


def test_softmax_is_shift_invariant():
    np.testing.assert_allclose(softmax(np.array([1000.0, 1000.0])), [0.5, 0.5])
    np.testing.assert_allclose(softmax(np.array([0.0, np.log(3.0)])), [0.25, 0.75])


def test_l2_gradient_scales_with_lambda():
    params = init_params(3, 4, 2, dim=4, n_virtual=2, seed=2)
    single, double = GradientSet.zeros_like(params), GradientSet.zeros_like(params)
    add_l2_gradient(params, single, 1e-3)
    add_l2_gradient(params, double, 2e-3)
    for name, grad in single.items():
        np.testing.assert_allclose(double[name], 2.0 * grad)
    assert l2_penalty(params, 2e-3) == pytest.approx(2.0 * l2_penalty(params, 1e-3))


def test_l2_penalty_examples():
    params = init_params(1, 1, 0, dim=1, n_virtual=1, seed=0)
    for _, array in params.all_blocks():
        array[:] = 0.0
    assert l2_penalty(params, 1e-5) == 0.0
    params.user_emb[0, 0] = 2.0
    assert l2_penalty(params, 1e-5) == pytest.approx(4e-5)


def test_gradient_blocks_accumulate_in_place():
    params = init_params(2, 3, 1, dim=2, n_virtual=1, seed=0)
    grads = GradientSet.zeros_like(params)
    block = grads["user_emb"]
    grads["user_emb"] += 1.5
    grads["user_emb"] += 0.5
    assert grads["user_emb"] is block
    np.testing.assert_array_equal(block, np.full((2, 2), 2.0))


@pytest.mark.parametrize("strategy", ["entity-grounded", "static"])
def test_adam_step_moves_every_block_with_a_gradient(strategy):
    params = init_params(3, 4, 2, dim=3, n_virtual=2, seed=5, strategy=strategy)
    before = params.copy()
    grads = GradientSet.zeros_like(params)
    for name, grad in grads.items():
        grad[:] = 0.1
    AdamOptimizer(params, TrainConfig(lr=0.01)).step(params, grads)
    trained = {name for name, _ in params.registry()}
    for (name, old), (_, new) in zip(before.all_blocks(), params.all_blocks()):
        if name in trained:
            assert np.all(old != new), name
        else:
            np.testing.assert_array_equal(old, new)


def test_gradient_check_finite_names_block():
    params = init_params(2, 3, 1, dim=2, n_virtual=1)
    grads = GradientSet.zeros_like(params)
    grads["entity_emb"][1, 0] = np.nan
    with pytest.raises(GradientException) as error:
        grads.check_finite()
    assert error.value.block == "entity_emb"
    assert error.value.exit_code == 3


def test_checkpoint_round_trip_is_exact(tmp_path):
    params = init_params(4, 7, 6, dim=5, n_virtual=3, seed=4)
    params.fusion_logits[:] = [0.1, -0.2, 0.3]
    assignment = np.array([0, 2, 1, 1, 0, 2])
    path = save_checkpoint(tmp_path / "checkpoint.bin", params, assignment, 3, 2)

    loaded, loaded_assignment, header = load_checkpoint(path)
    for (name, a), (_, b) in zip(params.all_blocks(), loaded.all_blocks()):
        np.testing.assert_array_equal(a, b, err_msg=name)
    np.testing.assert_array_equal(loaded_assignment, assignment)
    assert (header.user_count, header.entity_count, header.relation_count) == (4, 7, 6)
    assert (header.dim, header.n_virtual, header.n_iterations, header.n_layers) == (5, 3, 3, 2)

    expected_size = 8 + 8 * 8 + 8 * (4 * 5 + 7 * 5 + 6 * 5 + 3 * 5 + 3) + 4 * 6
    assert path.stat().st_size == expected_size


def test_checkpoint_with_bad_magic_is_rejected(tmp_path):
    params = init_params(2, 3, 2, dim=2, n_virtual=1)
    path = save_checkpoint(tmp_path / "c.bin", params, np.zeros(2), 1, 1)
    data = bytearray(path.read_bytes())
    data[:8] = b"NOTACKPT"
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointException, match="magic"):
        load_checkpoint(path)


def test_truncated_checkpoint_is_rejected(tmp_path):
    params = init_params(2, 3, 2, dim=2, n_virtual=1)
    path = save_checkpoint(tmp_path / "c.bin", params, np.zeros(2), 1, 1)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(CheckpointException):
        load_checkpoint(path)
    path.write_bytes(CHECKPOINT_MAGIC)
    with pytest.raises(CheckpointException):
        load_checkpoint(path)


def test_checkpoint_rejects_unsupported_version(tmp_path):
    params = init_params(2, 3, 2, dim=2, n_virtual=1)
    path = save_checkpoint(tmp_path / "c.bin", params, np.zeros(2), 1, 1)
    data = bytearray(path.read_bytes())
    data[8] = 9
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointException, match="version"):
        load_checkpoint(path)


def test_layer_dump_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    users = [rng.normal(size=(3, 4)) for _ in range(3)]
    entities = [rng.normal(size=(5, 4)) for _ in range(3)]
    path = save_layers(tmp_path / "layers.bin", users, entities)
    loaded_users, loaded_entities = load_layers(path)
    assert len(loaded_users) == len(loaded_entities) == 3
    for a, b in zip(users + entities, loaded_users + loaded_entities):
        np.testing.assert_array_equal(a, b)
