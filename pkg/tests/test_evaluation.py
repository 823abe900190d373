#!/usr/bin/env python3

import numpy as np
import pandas as pd
import pytest
from src.evaluation.metrics import Evaluator, compute_metrics, evaluate, rank_items
from src.evaluation.report import read_report, write_report, write_training_log
from src.models.dataset import InteractionSet, SplitDataset


def dataset(train_pairs, test_pairs, user_count, item_count):
    def build(pairs):
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        return InteractionSet(
            users=pairs[:, 0], items=pairs[:, 1], user_count=user_count, item_count=item_count
        )

    return SplitDataset(train=build(train_pairs), test=build(test_pairs), seed=0, ratio=0.8)


def one_dim(scores):
    """Item embeddings that make every user with embedding [1] score `scores`."""
    return np.asarray(scores, dtype=np.float64)[:, None]


def test_rank_items_orders_by_score():
    order = rank_items(0, np.ones((1, 1)), one_dim([0.1, 0.9, 0.5]), np.array([], dtype=np.int64))
    np.testing.assert_array_equal(order, [1, 2, 0])


def test_rank_items_breaks_ties_by_lower_id():
    order = rank_items(0, np.ones((1, 1)), one_dim([0.5, 0.7, 0.5, 0.5]), np.array([], dtype=np.int64))
    np.testing.assert_array_equal(order, [1, 0, 2, 3])


def test_rank_items_excludes_training_positives():
    order = rank_items(0, np.ones((1, 1)), one_dim([0.1, 0.9, 0.5]), np.array([1]))
    np.testing.assert_array_equal(order, [2, 0])


def test_positive_ranked_first():
    metrics = compute_metrics(np.array([7, 1, 2, 3, 4]), np.array([7]), [5])
    assert metrics[5] == pytest.approx({"recall": 1.0, "ndcg": 1.0, "hr": 1.0, "precision": 0.2})


def test_positive_ranked_third():
    metrics = compute_metrics(np.array([1, 2, 7, 3, 4]), np.array([7]), [5])
    assert metrics[5]["ndcg"] == pytest.approx(0.5)
    assert metrics[5]["recall"] == 1.0


def test_no_hit_scores_zero():
    metrics = compute_metrics(np.array([1, 2, 3]), np.array([9]), [1, 3])
    for row in metrics.values():
        assert row == {"recall": 0.0, "ndcg": 0.0, "hr": 0.0, "precision": 0.0}


def test_user_without_test_positives_is_skipped():
    assert compute_metrics(np.array([1, 2, 3]), np.array([], dtype=np.int64), [1]) is None


def test_ranked_list_shorter_than_cutoff():
    metrics = compute_metrics(np.array([4, 2]), np.array([2, 8]), [5])
    assert metrics[5]["recall"] == pytest.approx(0.5)
    assert metrics[5]["precision"] == pytest.approx(0.2)


def test_metric_identities_on_random_rankings():
    rng = np.random.default_rng(0)
    for _ in range(200):
        ranked = rng.permutation(30)
        positives = rng.choice(30, size=int(rng.integers(1, 6)), replace=False)
        metrics = compute_metrics(ranked, positives, [1, 5, 10, 20])
        assert metrics[1]["hr"] == metrics[1]["ndcg"] == metrics[1]["precision"]
        for small, large in ((1, 5), (5, 10), (10, 20)):
            assert metrics[small]["recall"] <= metrics[large]["recall"]
            assert metrics[small]["hr"] <= metrics[large]["hr"]
        for row in metrics.values():
            assert all(0.0 <= value <= 1.0 for value in row.values())


def test_single_user_report():
    data = dataset([(0, 0)], [(0, 2)], user_count=1, item_count=4)
    users = np.ones((1, 1))
    items = one_dim([5.0, 0.1, 0.9, 0.5])
    report = evaluate(users, items, data, cutoffs=[1, 2])
    # item 0 is a training positive: ranking is 2, 3, 1
    assert report.users_evaluated == 1
    assert report.at(1).model_dump() == pytest.approx(
        {"cutoff": 1, "recall": 1.0, "ndcg": 1.0, "hr": 1.0, "precision": 1.0}
    )
    assert report.at(2).precision == pytest.approx(0.5)


def test_report_is_the_unweighted_user_mean():
    data = dataset([], [(0, 0), (1, 1), (1, 2)], user_count=2, item_count=3)
    users = np.ones((2, 1))
    items = one_dim([0.9, 0.5, 0.1])
    report = evaluate(users, items, data, cutoffs=[1])
    # user 0 hits at rank 1; user 1 finds one of two positives only at rank 2
    assert report.at(1).recall == pytest.approx((1.0 + 0.0) / 2)
    assert report.at(1).hr == pytest.approx(0.5)


def test_evaluator_matches_per_user_metrics():
    rng = np.random.default_rng(4)
    user_count, item_count = 40, 25
    train, test = [], []
    for u in range(user_count):
        items = rng.choice(item_count, size=6, replace=False)
        train += [(u, int(i)) for i in items[:4]]
        test += [(u, int(i)) for i in items[4:]]
    data = dataset(train, test, user_count, item_count)
    users = rng.normal(size=(user_count, 3))
    items = rng.normal(size=(item_count, 3))
    report = Evaluator(data, [3, 10]).evaluate(users, items)
    train_by_user = data.train.items_by_user()
    test_by_user = data.test.items_by_user()
    for n in (3, 10):
        rows = [
            compute_metrics(rank_items(u, users, items, train_by_user[u]), test_by_user[u], [n])[n]
            for u in range(user_count)
        ]
        for name in ("recall", "ndcg", "hr", "precision"):
            assert getattr(report.at(n), name) == pytest.approx(np.mean([r[name] for r in rows]))


def test_random_embeddings_score_near_chance():
    rng = np.random.default_rng(7)
    user_count, item_count = 400, 50
    train, test = [], []
    for u in range(user_count):
        items = rng.choice(item_count, size=7, replace=False)
        train += [(u, int(i)) for i in items[:5]]
        test += [(u, int(i)) for i in items[5:]]
    data = dataset(train, test, user_count, item_count)
    report = evaluate(
        rng.normal(size=(user_count, 8)), rng.normal(size=(item_count, 8)), data, cutoffs=[10]
    )
    # 10 of the 45 candidates
    assert report.at(10).recall == pytest.approx(10 / 45, abs=0.06)


def test_evaluation_is_pure_and_thread_independent():
    rng = np.random.default_rng(5)
    user_count, item_count = 600, 30
    pairs = [(u, int(i)) for u in range(user_count) for i in rng.choice(item_count, 4, replace=False)]
    data = dataset(pairs[::2], pairs[1::2], user_count, item_count)
    users = rng.normal(size=(user_count, 4))
    items = rng.normal(size=(item_count, 4))
    evaluator = Evaluator(data, [1, 5, 20])
    first = evaluator.evaluate(users, items)
    assert evaluator.evaluate(users, items) == first
    assert Evaluator(data, [1, 5, 20], workers=4).evaluate(users, items) == first


def test_cold_users_are_counted_unless_dropped():
    data = dataset([(0, 0)], [(0, 1), (1, 2)], user_count=2, item_count=3)
    users = np.ones((2, 1))
    items = one_dim([0.1, 0.9, 0.5])
    kept = evaluate(users, items, data, cutoffs=[1])
    assert kept.users_evaluated == 2
    assert kept.cold_users == 1
    dropped = evaluate(users, items, data, cutoffs=[1], drop_cold_users=True)
    assert dropped.users_evaluated == 1
    assert dropped.at(1).hr == 1.0


def test_report_csv_layout(tmp_path):
    data = dataset([(0, 0)], [(0, 2)], user_count=1, item_count=4)
    report = evaluate(np.ones((1, 1)), one_dim([5.0, 0.1, 0.9, 0.5]), data, cutoffs=[1, 5])
    path = write_report(report, tmp_path / "report.csv")
    frame = read_report(path)
    assert list(frame.columns) == ["cutoff", "recall", "ndcg", "hr", "precision", "users_evaluated"]
    assert frame["cutoff"].tolist() == [1, 5]
    assert frame["users_evaluated"].tolist() == [1, 1]
    assert "1.000000" in path.read_text()


def test_training_log_leaves_unevaluated_epochs_blank(tmp_path):
    history = [
        {"epoch": 1, "loss": 0.69},
        {"epoch": 2, "loss": 0.5, "recall@20": 0.4, "ndcg@20": 0.3, "hr@20": 0.6, "precision@20": 0.05},
    ]
    path = write_training_log(history, tmp_path / "training_log.csv")
    frame = pd.read_csv(path)
    assert frame.columns.tolist() == ["epoch", "loss", "recall@20", "ndcg@20", "hr@20", "precision@20"]
    assert frame["recall@20"].isna().tolist() == [True, False]
    assert path.read_text().splitlines()[1] == "1,0.69000000,,,,"
