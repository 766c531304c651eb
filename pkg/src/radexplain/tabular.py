"""Feature matrices, preprocessing filters, rank statistics, CV folds, metrics.

Undefined correlations (a constant rank sequence) are represented as NaN;
callers decide whether to exclude them.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .errors import (
    AllColumnsRemoved,
    ClassTooSmall,
    InputError,
    LengthMismatch,
    MissingFeature,
    SingleClass,
    TooFewSamples,
)

LABEL_NAMES = {"benign": 0, "malignant": 1, "0": 0, "1": 1}


@dataclass(frozen=True)
class FeatureMatrix:
    sample_ids: tuple
    columns: tuple
    values: np.ndarray
    labels: np.ndarray | None = None
    provenance: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InputError("feature values must be 2D")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sample_ids", tuple(str(s) for s in self.sample_ids))
        object.__setattr__(self, "columns", tuple(str(c) for c in self.columns))
        if values.shape != (len(self.sample_ids), len(self.columns)):
            raise InputError(f"values shape {values.shape} does not match "
                             f"{len(self.sample_ids)} samples x {len(self.columns)} columns")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise InputError(f"non-finite value at sample {self.sample_ids[bad[0]]!r}, "
                             f"column {self.columns[bad[1]]!r}")
        if len(set(self.columns)) != len(self.columns):
            raise InputError("duplicate column names")
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise InputError("duplicate sample ids")
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (len(self.sample_ids),):
                raise LengthMismatch("labels length differs from sample count")
            if not np.isin(labels, (0, 1)).all():
                raise InputError("labels must be 0 (benign) or 1 (malignant)")
            object.__setattr__(self, "labels", labels)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self._index(name)]

    def _index(self, name):
        try:
            return self.columns.index(name)
        except ValueError:
            raise MissingFeature(f"feature {name!r} not in matrix") from None

    def select(self, names) -> "FeatureMatrix":
        idx = [self._index(n) for n in names]
        return replace(self, columns=tuple(self.columns[i] for i in idx), values=self.values[:, idx])

    def rows(self, index) -> "FeatureMatrix":
        index = np.asarray(index)
        return replace(
            self,
            sample_ids=tuple(self.sample_ids[i] for i in index),
            values=self.values[index],
            labels=None if self.labels is None else self.labels[index],
        )


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(m: FeatureMatrix, path=None) -> str:
    """Serialize; returns the text and writes it when ``path`` is given."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["sample_id"] + (["label"] if m.labels is not None else []) + list(m.columns)
    w.writerow(header)
    for i, sid in enumerate(m.sample_ids):
        row = [sid]
        if m.labels is not None:
            row.append(str(int(m.labels[i])))
        row.extend(_fmt(v) for v in m.values[i])
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def read_csv(path, provenance: str | None = None) -> FeatureMatrix:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    return parse_csv(text, str(path) if provenance is None else provenance)


def parse_csv(text: str, provenance: str = "") -> FeatureMatrix:
    """Parse the feature CSV dialect (``sample_id[,label],features...``)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("empty feature CSV") from None
    if not header or header[0] != "sample_id":
        raise InputError("feature CSV must start with a 'sample_id' column")
    has_label = len(header) > 1 and header[1] == "label"
    first = 2 if has_label else 1
    ids, labels, rows = [], [], []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != len(header):
            raise InputError(f"line {lineno}: expected {len(header)} fields, got {len(rec)}")
        ids.append(rec[0])
        if has_label:
            try:
                labels.append(LABEL_NAMES[rec[1].strip().lower()])
            except KeyError:
                raise InputError(f"line {lineno}: unknown label {rec[1]!r}") from None
        try:
            rows.append([float(v) for v in rec[first:]])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    values = np.array(rows, dtype=np.float64).reshape(len(ids), len(header) - first)
    return FeatureMatrix(ids, header[first:], values, np.array(labels) if has_label else None,
                         provenance)


# -- preprocessing ---------------------------------------------------------

def near_zero_variance_columns(m: FeatureMatrix, cutoff: float = 0.005) -> list[str]:
    """Columns whose min-max scaled population variance is below ``cutoff``.

    Constant columns are always flagged, including when ``cutoff`` is 0.
    """
    if m.n_samples < 2:
        raise TooFewSamples("variance filter needs at least 2 samples")
    lo = m.values.min(axis=0)
    span = m.values.max(axis=0) - lo
    dropped = []
    for k, name in enumerate(m.columns):
        if span[k] == 0:
            dropped.append(name)
            continue
        var = float(np.var((m.values[:, k] - lo[k]) / span[k]))
        if var < cutoff:
            dropped.append(name)
    return dropped


def near_zero_variance_filter(m: FeatureMatrix, cutoff: float = 0.005) -> FeatureMatrix:
    dropped = set(near_zero_variance_columns(m, cutoff))
    keep = [c for c in m.columns if c not in dropped]
    if not keep:
        raise AllColumnsRemoved("near-zero variance filter removed every column")
    return m.select(keep)


def _centred_double_ranks(values: np.ndarray) -> np.ndarray:
    """2 * (average rank) - (n + 1) per column; integer valued, so exact."""
    n = values.shape[0]
    return 2.0 * rankdata(values, method="average", axis=0) - (n + 1)


def _rank_correlation(ra: np.ndarray, rb: np.ndarray) -> np.ndarray:
    """Pearson correlation between columns of two centred rank arrays."""
    num = ra.T @ rb
    ssa = (ra * ra).sum(axis=0)
    ssb = (rb * rb).sum(axis=0)
    den = np.sqrt(np.outer(ssa, ssb))
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)
    return np.clip(rho, -1.0, 1.0)


def spearman(x, y) -> float:
    """Spearman rank correlation with average ranks for ties; NaN if undefined."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch("spearman needs two 1D sequences of equal length")
    if x.size < 2:
        raise TooFewSamples("spearman needs at least 2 observations")
    rx = _centred_double_ranks(x[:, None])
    ry = _centred_double_ranks(y[:, None])
    return float(_rank_correlation(rx, ry)[0, 0])


def spearman_matrix(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Column-by-column Spearman correlations of ``a`` against ``b`` (or itself)."""
    a = np.asarray(a, dtype=np.float64)
    ra = _centred_double_ranks(a)
    rb = ra if b is None else _centred_double_ranks(np.asarray(b, dtype=np.float64))
    return _rank_correlation(ra, rb)


def correlation_prune_plan(m: FeatureMatrix, threshold: float = 0.9) -> list[tuple[str, str]]:
    """Greedy removal order as ``(dropped, correlated_with)`` pairs.

    While some remaining pair has |rho| above ``threshold``, take the pair with
    the largest |rho| (ties: earliest in column order) and drop whichever
    member has the larger mean |rho| to the other remaining columns (ties: the
    later column). Undefined correlations count as 0.
    """
    if m.n_samples < 3:
        raise TooFewSamples("correlation pruning needs at least 3 samples")
    p = m.n_features
    r = np.abs(spearman_matrix(m.values))
    r = np.nan_to_num(r, nan=0.0)
    np.fill_diagonal(r, 0.0)
    alive = np.ones(p, dtype=bool)
    upper = np.triu(np.ones((p, p), dtype=bool), k=1)
    plan = []
    while True:
        live = upper & alive[:, None] & alive[None, :]
        cand = np.where(live, r, -1.0)
        flat = int(np.argmax(cand))  # first maximum in row-major order
        i, j = divmod(flat, p)
        if cand[i, j] <= threshold:
            break
        others = alive.copy()
        n_other = int(others.sum()) - 1
        mean_i = (r[i, others].sum()) / n_other
        mean_j = (r[j, others].sum()) / n_other
        drop, keep = (i, j) if mean_i > mean_j else (j, i)
        alive[drop] = False
        plan.append((m.columns[drop], m.columns[keep]))
    return plan


def correlation_prune(m: FeatureMatrix, threshold: float = 0.9) -> FeatureMatrix:
    dropped = {d for d, _ in correlation_prune_plan(m, threshold)}
    return m.select([c for c in m.columns if c not in dropped])


# -- cross-validation --------------------------------------------------------

@dataclass(frozen=True)
class CvScheme:
    k: int = 10
    repeats: int = 20
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise InputError("CV needs k >= 2")
        if self.repeats < 1:
            raise InputError("CV needs at least one repeat")


def stratified_folds(labels, scheme: CvScheme) -> np.ndarray:
    """Fold id per sample for each repeat, shape ``(repeats, n)``.

    Within a repeat each class is shuffled by a generator seeded with
    ``(seed, repeat)`` and dealt round-robin; dealing continues where the
    previous class stopped so fold sizes stay balanced.
    """
    labels = np.asarray(labels)
    n = labels.size
    classes = np.unique(labels)
    if scheme.stratified:
        for c in classes:
            if (labels == c).sum() < scheme.k:
                raise ClassTooSmall(f"class {c} has fewer than k={scheme.k} members")
        groups = [np.flatnonzero(labels == c) for c in classes]
    else:
        if n < scheme.k:
            raise ClassTooSmall(f"fewer than k={scheme.k} samples")
        groups = [np.arange(n)]
    out = np.empty((scheme.repeats, n), dtype=np.int64)
    for rep in range(scheme.repeats):
        rng = np.random.default_rng([scheme.seed, rep])
        start = 0
        for members in groups:
            order = rng.permutation(members)
            out[rep, order] = (start + np.arange(order.size)) % scheme.k
            start = (start + order.size) % scheme.k
    return out


# -- metrics ---------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    auroc: float
    sensitivity: float
    specificity: float
    ppv: float
    npv: float
    tp: int
    tn: int
    fp: int
    fn: int

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def auroc(scores, labels) -> float:
    """Mann-Whitney AUROC with average ranks (ties count one half)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUROC needs both classes")
    ranks = rankdata(scores, method="average")
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def _ratio(a: int, b: int) -> float:
    return a / b if b else 0.0


def evaluate(scores, labels, threshold: float = 0.5) -> MetricsReport:
    """Confusion metrics at ``score >= threshold`` plus AUROC.

    Ratios with an empty denominator are reported as 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise LengthMismatch("scores and labels differ in length")
    pred = scores >= threshold
    truth = labels == 1
    tp = int((pred & truth).sum())
    tn = int((~pred & ~truth).sum())
    fp = int((pred & ~truth).sum())
    fn = int((~pred & truth).sum())
    return MetricsReport(
        accuracy=_ratio(tp + tn, labels.size),
        auroc=auroc(scores, labels),
        sensitivity=_ratio(tp, tp + fn),
        specificity=_ratio(tn, tn + fp),
        ppv=_ratio(tp, tp + fp),
        npv=_ratio(tn, tn + fn),
        tp=tp, tn=tn, fp=fp, fn=fn,
    )


def mean_std(reports: list[MetricsReport]) -> tuple[dict, dict]:
    keys = ("accuracy", "auroc", "sensitivity", "specificity", "ppv", "npv")
    arr = np.array([[getattr(r, k) for k in keys] for r in reports])
    return dict(zip(keys, arr.mean(axis=0).tolist())), dict(zip(keys, arr.std(axis=0).tolist()))
