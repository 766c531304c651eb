"""Reference random forest, sequential forward selection, and CV model choice.

The forest is deliberately plain: bootstrap per tree, Gini splits over
``ceil(sqrt(p))`` randomly chosen columns per node, midpoint thresholds,
unbounded depth, at least two samples per leaf. Every random draw comes from
``numpy.random.SeedSequence([seed, ...])`` so a given seed reproduces a
model bit for bit regardless of evaluation order.

Any object with ``fit(X, y, feature_names, seed) -> model`` where ``model``
has ``feature_names`` and ``predict_proba(X)`` can stand in for
:class:`ForestParams` in :func:`sfs_select` and :func:`cv_select_best`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import InputError, SingleClass
from .tabular import CvScheme, FeatureMatrix, evaluate, mean_std, stratified_folds

MODEL_SCHEMA_VERSION = 1


@numba.njit(cache=True)
def _grow_tree(X, y, idx, keys, mtry, min_leaf):
    cap = keys.shape[0]
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    counts = np.zeros((cap, 2), np.int64)

    buf = np.empty(idx.size, np.int64)
    stack = np.empty((cap, 3), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = idx.size
    top = 1
    n_nodes = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        m = end - start
        c1 = 0
        for t in range(start, end):
            c1 += y[idx[t]]
        c0 = m - c1
        counts[node, 0] = c0
        counts[node, 1] = c1
        if c0 == 0 or c1 == 0 or m < 2 * min_leaf:
            continue

        cols = np.sort(np.argsort(keys[node])[:mtry])
        best_score = np.inf
        best_f = -1
        best_thr = 0.0
        vals = np.empty(m, np.float64)
        labs = np.empty(m, np.int64)
        for f in cols:
            for t in range(m):
                vals[t] = X[idx[start + t], f]
            order = np.argsort(vals, kind="mergesort")
            for t in range(m):
                labs[t] = y[idx[start + order[t]]]
            l1 = 0
            for t in range(m - 1):
                l1 += labs[t]
                nl = t + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                a = vals[order[t]]
                b = vals[order[t + 1]]
                if a == b:
                    continue
                l0 = nl - l1
                r1 = c1 - l1
                r0 = nr - r1
                score = (nl - (l0 * l0 + l1 * l1) / nl) + (nr - (r0 * r0 + r1 * r1) / nr)
                if score < best_score:
                    best_score = score
                    best_f = f
                    mid = a + (b - a) / 2.0
                    best_thr = mid if mid < b else a
        if best_f < 0:
            continue

        # stable partition of idx[start:end]
        nl = 0
        for t in range(start, end):
            if X[idx[t], best_f] <= best_thr:
                buf[nl] = idx[t]
                nl += 1
        k = nl
        for t in range(start, end):
            if not X[idx[t], best_f] <= best_thr:
                buf[k] = idx[t]
                k += 1
        for t in range(m):
            idx[start + t] = buf[t]

        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top + 1, 0] = n_nodes
        stack[top + 1, 1] = start
        stack[top + 1, 2] = start + nl
        top += 2
        n_nodes += 2
    return feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes], counts[:n_nodes]


@numba.njit(cache=True)
def _tree_positive_fraction(X, feature, threshold, left, right, counts):
    out = np.empty(X.shape[0], np.float64)
    for s in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[s, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[s] = counts[node, 1] / (counts[node, 0] + counts[node, 1])
    return out


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    def positive_fraction(self, X: np.ndarray) -> np.ndarray:
        return _tree_positive_fraction(X, self.feature, self.threshold, self.left, self.right, self.counts)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int64),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int64),
            right=np.asarray(d["right"], dtype=np.int64),
            counts=np.asarray(d["counts"], dtype=np.int64).reshape(-1, 2),
        )


@dataclass
class ForestModel:
    trees: list
    feature_names: tuple
    seed: int
    min_leaf: int = 2

    @property
    def n_estimators(self) -> int:
        return len(self.trees)

    def predict_proba(self, X) -> np.ndarray:
        """Positive-class probability: mean over trees of the leaf fraction."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != len(self.feature_names):
            raise InputError(f"expected {len(self.feature_names)} feature columns")
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.positive_fraction(X)
        return total / len(self.trees)

    def to_json(self) -> str:
        doc = {
            "schema_version": MODEL_SCHEMA_VERSION,
            "kind": "ForestModel",
            "n_estimators": self.n_estimators,
            "seed": int(self.seed),
            "min_leaf": self.min_leaf,
            "feature_names": list(self.feature_names),
            "trees": [t.to_dict() for t in self.trees],
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ForestModel":
        doc = json.loads(text)
        if doc.get("kind") != "ForestModel" or doc.get("schema_version") != MODEL_SCHEMA_VERSION:
            raise InputError("not a version-1 ForestModel document")
        return cls(
            trees=[Tree.from_dict(t) for t in doc["trees"]],
            feature_names=tuple(doc["feature_names"]),
            seed=doc["seed"],
            min_leaf=doc.get("min_leaf", 2),
        )


def unit_seed(*parts: int) -> int:
    """Deterministic 32-bit seed for one unit of work (tree, fold, ...)."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


@dataclass(frozen=True)
class ForestParams:
    n_estimators: int = 100
    seed: int = 0
    min_leaf: int = 2

    def fit(self, X, y, feature_names, seed: int | None = None) -> ForestModel:
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        seed = self.seed if seed is None else seed
        n, p = X.shape
        if len(feature_names) != p:
            raise InputError("feature_names does not match X")
        if y.shape != (n,):
            raise InputError("labels do not match X")
        if np.unique(y).size < 2:
            raise SingleClass("training data holds a single class")
        mtry = max(1, math.ceil(math.sqrt(p)))
        trees = []
        for t in range(self.n_estimators):
            rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
            boot = rng.integers(0, n, size=n)
            keys = rng.random((2 * n, p))
            trees.append(Tree(*_grow_tree(X, y, boot, keys, mtry, self.min_leaf)))
        return ForestModel(trees=trees, feature_names=tuple(feature_names), seed=seed,
                           min_leaf=self.min_leaf)


def rf_train(m: FeatureMatrix, params: ForestParams = ForestParams()) -> ForestModel:
    if m.labels is None:
        raise InputError("training matrix has no labels")
    return params.fit(m.values, m.labels, m.columns)


def rf_predict_proba(model, m: FeatureMatrix) -> np.ndarray:
    """Scores for ``m``; columns are matched to the model by name."""
    return model.predict_proba(m.select(model.feature_names).values)


# -- model selection -------------------------------------------------------

def _cv_units(labels, scheme: CvScheme):
    folds = stratified_folds(labels, scheme)
    for rep in range(scheme.repeats):
        for k in range(scheme.k):
            test = folds[rep] == k
            yield rep, k, np.flatnonzero(~test), np.flatnonzero(test)


def _cv_accuracy(X, y, names, classifier, scheme, seed) -> float:
    accs = []
    for rep, k, train, test in _cv_units(y, scheme):
        model = classifier.fit(X[train], y[train], names, seed=unit_seed(seed, rep, k))
        pred = model.predict_proba(X[test]) >= 0.5
        accs.append(float(np.mean(pred == (y[test] == 1))))
    return float(np.mean(accs))


@dataclass
class SelectionReport:
    chosen: list
    cv_accuracy_path: list
    scheme: CvScheme
    seed: int
    explored: list = field(default_factory=list)  # full path before truncation

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "chosen": list(self.chosen),
            "cv_accuracy_path": list(self.cv_accuracy_path),
            "explored": list(self.explored),
            "scheme": {"k": self.scheme.k, "repeats": self.scheme.repeats,
                       "seed": self.scheme.seed, "stratified": self.scheme.stratified},
            "seed": self.seed,
        }


def sfs_select(m: FeatureMatrix, classifier=ForestParams(), scheme: CvScheme = CvScheme(),
               k_max: int = 10, patience: int = 2) -> SelectionReport:
    """Greedy forward selection maximizing mean CV accuracy.

    Each step adds the candidate with the highest accuracy (ties: earliest
    column). Stops after ``k_max`` features or ``patience`` consecutive steps
    without beating the best accuracy so far; the report keeps the shortest
    prefix reaching that best accuracy.
    """
    if m.labels is None:
        raise InputError("selection needs labels")
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    X, y = m.values, m.labels
    seed = getattr(classifier, "seed", 0)
    chosen: list[int] = []
    path: list[float] = []
    best, since_best = -np.inf, 0
    while len(chosen) < min(k_max, m.n_features):
        step_best, step_col = -np.inf, -1
        for c in range(m.n_features):
            if c in chosen:
                continue
            cols = chosen + [c]
            acc = _cv_accuracy(X[:, cols], y, [m.columns[i] for i in cols], classifier, scheme, seed)
            if acc > step_best:
                step_best, step_col = acc, c
        chosen.append(step_col)
        path.append(step_best)
        if step_best > best:
            best, since_best = step_best, 0
        else:
            since_best += 1
            if since_best >= patience:
                break
    keep = int(np.argmax(path)) + 1
    names = [m.columns[i] for i in chosen]
    return SelectionReport(chosen=names[:keep], cv_accuracy_path=path[:keep], scheme=scheme,
                           seed=seed, explored=list(zip(names, path)))


@dataclass
class CvReport:
    folds: list  # (repeat, fold, MetricsReport)
    mean: dict
    std: dict
    best: tuple  # (repeat, fold)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "mean": self.mean,
            "std": self.std,
            "best": {"repeat": self.best[0], "fold": self.best[1]},
            "folds": [{"repeat": r, "fold": k, **rep.as_dict()} for r, k, rep in self.folds],
        }


def cv_select_best(m: FeatureMatrix, scheme: CvScheme = CvScheme(),
                   classifier=ForestParams()) -> tuple[ForestModel, CvReport]:
    """Train one model per (repeat, fold) and keep the best held-out accuracy.

    Ties go to the earliest repeat, then fold. The report pools fold metrics
    as mean and population standard deviation.
    """
    if m.labels is None:
        raise InputError("training matrix has no labels")
    if np.unique(m.labels).size < 2:
        raise SingleClass("training data holds a single class")
    X, y = m.values, m.labels
    seed = getattr(classifier, "seed", 0)
    folds, best_model, best_acc, best_at = [], None, -1.0, None
    for rep, k, train, test in _cv_units(y, scheme):
        model = classifier.fit(X[train], y[train], m.columns, seed=unit_seed(seed, rep, k))
        report = evaluate(model.predict_proba(X[test]), y[test])
        folds.append((rep, k, report))
        if report.accuracy > best_acc:
            best_model, best_acc, best_at = model, report.accuracy, (rep, k)
    mean, std = mean_std([r for _, _, r in folds])
    return best_model, CvReport(folds=folds, mean=mean, std=std, best=best_at)

