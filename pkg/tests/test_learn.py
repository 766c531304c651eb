import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from radexplain.errors import MissingFeature, SingleClass
from radexplain.learn import (
    ForestModel,
    ForestParams,
    Tree,
    _cv_accuracy,
    cv_select_best,
    rf_predict_proba,
    rf_train,
    sfs_select,
)
from radexplain.synthetic import separable_dataset
from radexplain.tabular import CvScheme, FeatureMatrix


def labelled(X, y, names=None):
    X = np.asarray(X, dtype=float)
    names = names or [f"x{j}" for j in range(X.shape[1])]
    return FeatureMatrix([f"s{i}" for i in range(len(X))], names, X, np.asarray(y))


def leaf_tree(neg, pos):
    return Tree(np.array([-1]), np.array([0.0]), np.array([-1]), np.array([-1]), np.array([[neg, pos]]))


def test_one_dimensional_split():
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.uniform(-5, -1, 50), rng.uniform(1, 5, 50)])
    m = labelled(x[:, None], (x > 0).astype(int))
    model = rf_train(m, ForestParams(n_estimators=20, seed=3))
    assert np.all((rf_predict_proba(model, m) >= 0.5) == (x > 0))


def test_same_seed_same_bytes():
    m = separable_dataset(n=60, p=4, seed=1)
    a = rf_train(m, ForestParams(n_estimators=15, seed=11)).to_json()
    b = rf_train(m, ForestParams(n_estimators=15, seed=11)).to_json()
    c = rf_train(m, ForestParams(n_estimators=15, seed=12)).to_json()
    assert a == b and a != c


def test_xor_clusters():
    rng = np.random.default_rng(4)
    centres = [(-2, -2, 0), (2, 2, 0), (-2, 2, 1), (2, -2, 1)]
    X = np.concatenate([rng.normal((cx, cy), 0.5, size=(50, 2)) for cx, cy, _ in centres])
    y = np.repeat([c[2] for c in centres], 50)
    model = rf_train(labelled(X, y), ForestParams(n_estimators=30, seed=0))
    acc = np.mean((model.predict_proba(X) >= 0.5) == y)
    assert acc >= 0.95


def test_leaf_fraction_averaging():
    X = np.zeros((1, 1))
    assert ForestModel([leaf_tree(0, 4)] * 3, ("x",), 0).predict_proba(X)[0] == 1.0
    assert ForestModel([leaf_tree(0, 2), leaf_tree(5, 0)], ("x",), 0).predict_proba(X)[0] == 0.5
    assert ForestModel([leaf_tree(3, 1)], ("x",), 0).predict_proba(X)[0] == 0.25


def test_predict_matches_columns_by_name():
    m = separable_dataset(n=40, p=3, seed=2)
    model = rf_train(m, ForestParams(n_estimators=5, seed=0))
    shuffled = m.select(list(reversed(m.columns)))
    assert np.array_equal(rf_predict_proba(model, shuffled), rf_predict_proba(model, m))
    with pytest.raises(MissingFeature):
        rf_predict_proba(model, m.select(["x0", "x1"]))


def test_single_class_rejected():
    with pytest.raises(SingleClass):
        rf_train(labelled(np.ones((4, 1)), [1, 1, 1, 1]))


def test_tree_structure_invariants():
    m = separable_dataset(n=80, p=5, seed=3)
    model = rf_train(m, ForestParams(n_estimators=10, seed=1))
    for tree in model.trees:
        internal = tree.feature >= 0
        assert np.all(tree.feature[internal] < len(model.feature_names))
        leaves = ~internal
        assert np.all(tree.counts >= 0) and np.all(tree.counts[leaves].sum(axis=1) >= 2)
        # children hold exactly the parent's samples
        for node in np.flatnonzero(internal):
            assert np.array_equal(tree.counts[tree.left[node]] + tree.counts[tree.right[node]], tree.counts[node])


def test_model_json_roundtrip_and_schema():
    m = separable_dataset(n=50, p=3, seed=5)
    model = rf_train(m, ForestParams(n_estimators=7, seed=2))
    text = model.to_json()
    schema = json.loads(resources.files("radexplain.data").joinpath("forest_model.schema.json").read_text())
    jsonschema.validate(json.loads(text), schema)
    back = ForestModel.from_json(text)
    assert back.to_json() == text
    assert np.array_equal(back.predict_proba(m.values), model.predict_proba(m.values))


def test_monotone_transform_invariance():
    m = separable_dataset(n=80, p=3, seed=6)
    X = m.values
    Xt = np.column_stack([np.exp(X[:, 0]), X[:, 1] ** 3, 3 * X[:, 2] - 2])
    mt = FeatureMatrix(m.sample_ids, m.columns, Xt, m.labels)
    p = ForestParams(n_estimators=20, seed=4)
    a, b = rf_train(m, p), rf_train(mt, p)
    for t, (ta, tb) in enumerate(zip(a.trees, b.trees)):
        assert np.array_equal(ta.feature, tb.feature) and np.array_equal(ta.counts, tb.counts)
        assert np.array_equal(ta.left, tb.left) and np.array_equal(ta.right, tb.right)
        # midpoint thresholds move with the transform, so routing agrees on
        # every value the tree was grown from
        in_bag = np.unique(np.random.default_rng(np.random.SeedSequence([4, t])).integers(0, 80, 80))
        assert np.array_equal(ta.positive_fraction(X[in_bag]), tb.positive_fraction(Xt[in_bag]))


def test_sfs_picks_separating_feature_first():
    rng = np.random.default_rng(7)
    n = 60
    y = np.array([0, 1] * (n // 2))
    X = rng.normal(size=(n, 4))
    X[:, 2] = y * 3 + rng.uniform(0, 1, n)
    report = sfs_select(labelled(X, y), ForestParams(n_estimators=10, seed=0), CvScheme(k=3, repeats=1),
                        k_max=3)
    assert report.chosen[0] == "x2"
    assert len(report.chosen) == len(report.cv_accuracy_path) == len(set(report.chosen))


def test_sfs_budget_of_one():
    m = separable_dataset(n=40, p=4, seed=8)
    report = sfs_select(m, ForestParams(n_estimators=5, seed=0), CvScheme(k=2, repeats=1), k_max=1)
    assert len(report.chosen) == 1


def test_sfs_noise_stops_with_patience():
    rng = np.random.default_rng(9)
    y = np.array([0, 1] * 20)
    m = labelled(rng.normal(size=(40, 6)), y)
    report = sfs_select(m, ForestParams(n_estimators=5, seed=0), CvScheme(k=2, repeats=1), k_max=6, patience=2)
    assert len(report.explored) <= 6
    best = int(np.argmax([a for _, a in report.explored]))
    # stopped once two steps in a row failed to beat the best
    assert len(report.explored) <= best + 1 + 2
    assert report.chosen == [n for n, _ in report.explored][: best + 1]


def test_sfs_path_is_stepwise_maximum():
    rng = np.random.default_rng(10)
    y = np.array([0, 1] * 15)
    X = rng.normal(size=(30, 4))
    X[:, 1] += y * 1.5
    m = labelled(X, y)
    clf, scheme = ForestParams(n_estimators=5, seed=1), CvScheme(k=3, repeats=1, seed=2)
    report = sfs_select(m, clf, scheme, k_max=2, patience=5)
    chosen_idx = []
    for name, acc in report.explored:
        scores = []
        for c in range(4):
            if c in chosen_idx:
                continue
            cols = chosen_idx + [c]
            scores.append(_cv_accuracy(X[:, cols], y, [m.columns[i] for i in cols], clf, scheme, clf.seed))
        assert acc == max(scores)
        chosen_idx.append(m.columns.index(name))


def test_cv_select_best_counts_and_determinism():
    m = separable_dataset(n=40, p=3, seed=11)
    params = ForestParams(n_estimators=5, seed=3)
    model, report = cv_select_best(m, CvScheme(k=2, repeats=1, seed=0), params)
    assert len(report.folds) == 2
    again, report2 = cv_select_best(m, CvScheme(k=2, repeats=1, seed=0), params)
    assert again.to_json() == model.to_json() and report2.to_dict() == report.to_dict()
    accs = [r.accuracy for _, _, r in report.folds]
    assert report.best == report.folds[int(np.argmax(accs))][:2]


def test_cv_select_best_single_class():
    with pytest.raises(SingleClass):
        cv_select_best(labelled(np.ones((4, 1)), [0] * 4), CvScheme(k=2, repeats=1))
