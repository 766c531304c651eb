"""Global explanation of deep features through radiomic features.

Each deep feature is related to each radiomic feature by Spearman's rho.
A pair "explains" the deep feature at threshold ``M`` when ``rho >= M``
(signed mode) or ``|rho| >= M`` (absolute mode). Counting passing pairs per
radiomic feature, per base feature (summing original and wavelet variants)
and across a sweep of thresholds gives the report consumed by plotting and
review scripts. Undefined correlations (constant columns) never count.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InputError, SampleMismatch, TooFewSamples
from .radiomics.extract import parse_feature_name
from .tabular import FeatureMatrix, spearman_matrix

DEFAULT_THRESHOLDS = (0.30, 0.35, 0.40, 0.45)
MODES = ("signed", "absolute")
REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CorrelationMatrix:
    rho: np.ndarray  # a x b, NaN where undefined
    radiomic_names: tuple
    deep_names: tuple
    n_samples: int
    deep_provenance: str = ""

    def undefined_pairs(self) -> list[tuple[str, str]]:
        return [(self.radiomic_names[i], self.deep_names[j])
                for i, j in zip(*np.nonzero(np.isnan(self.rho)))]


@dataclass(frozen=True)
class ThresholdReport:
    thresholds: tuple
    counts: np.ndarray  # a x len(thresholds)
    mode: str
    radiomic_names: tuple


@dataclass(frozen=True)
class GroupedReport:
    thresholds: tuple
    bases: tuple
    counts: np.ndarray  # len(bases) x len(thresholds)
    members: dict  # base -> tuple of full feature names


def correlation_matrix(radiomic: FeatureMatrix, deep: FeatureMatrix) -> CorrelationMatrix:
    """Spearman rho for every (radiomic, deep) column pair.

    Samples must carry identical ids in identical order; nothing is
    reordered silently.
    """
    if radiomic.sample_ids != deep.sample_ids:
        missing = set(radiomic.sample_ids) ^ set(deep.sample_ids)
        detail = f"ids present on one side only: {sorted(missing)[:5]}" if missing else "same ids, different order"
        raise SampleMismatch(f"radiomic and deep matrices are not aligned ({detail})")
    if radiomic.n_samples < 3:
        raise TooFewSamples("need at least 3 samples to correlate")
    rho = spearman_matrix(radiomic.values, deep.values)
    return CorrelationMatrix(rho=rho, radiomic_names=radiomic.columns, deep_names=deep.columns,
                             n_samples=radiomic.n_samples, deep_provenance=deep.provenance)


def _passes(rho: np.ndarray, m: float, mode: str) -> np.ndarray:
    if mode == "signed":
        return rho >= m
    if mode == "absolute":
        return np.abs(rho) >= m
    raise InputError(f"unknown mode {mode!r}; expected one of {MODES}")


def threshold_counts(cm: CorrelationMatrix, thresholds=DEFAULT_THRESHOLDS, mode: str = "signed") -> ThresholdReport:
    thresholds = tuple(float(t) for t in thresholds)
    if not thresholds:
        raise InputError("at least one threshold is required")
    if any(not -1.0 <= t <= 1.0 for t in thresholds):
        raise InputError("thresholds must lie in [-1, 1]")
    with np.errstate(invalid="ignore"):
        counts = np.stack([_passes(cm.rho, t, mode).sum(axis=1) for t in thresholds], axis=1)
    return ThresholdReport(thresholds=thresholds, counts=counts.astype(np.int64), mode=mode,
                           radiomic_names=cm.radiomic_names)


def group_by_base(tr: ThresholdReport) -> GroupedReport:
    """Sum counts over the original and wavelet variants of each base feature.

    Features are grouped by ``(category, base_name)``, reported as
    ``category_base``. Groups are ordered by descending count at the smallest
    threshold, ties alphabetically.
    """
    members: dict[str, list[str]] = {}
    sums: dict[str, np.ndarray] = {}
    for name, row in zip(tr.radiomic_names, tr.counts):
        desc = parse_feature_name(name)
        key = f"{desc.category}_{desc.base_name}"
        members.setdefault(key, []).append(name)
        sums[key] = sums.get(key, 0) + row
    first = int(np.argmin(tr.thresholds))
    bases = sorted(sums, key=lambda b: (-int(sums[b][first]), b))
    counts = np.array([sums[b] for b in bases], dtype=np.int64).reshape(len(bases), len(tr.thresholds))
    return GroupedReport(thresholds=tr.thresholds, bases=tuple(bases), counts=counts,
                         members={b: tuple(members[b]) for b in bases})


def correlation_trend(cm: CorrelationMatrix, grid, mode: str = "signed") -> np.ndarray:
    """Total passing pairs at each point of a strictly increasing grid."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InputError("trend grid must be strictly increasing")
    with np.errstate(invalid="ignore"):
        return np.array([int(_passes(cm.rho, m, mode).sum()) for m in grid], dtype=np.int64)


def default_trend_grid(points: int = 101) -> np.ndarray:
    return np.linspace(0.0, 1.0, points)


# -- report emission -------------------------------------------------------

def build_report(cm: CorrelationMatrix, thresholds=DEFAULT_THRESHOLDS, mode: str = "signed",
                 grid=None) -> dict:
    tr = threshold_counts(cm, thresholds, mode)
    gr = group_by_base(tr)
    grid = default_trend_grid() if grid is None else grid
    trend = correlation_trend(cm, grid, mode)
    per_feature = []
    for name, row in zip(tr.radiomic_names, tr.counts):
        desc = parse_feature_name(name)
        per_feature.append({"name": name, "base": f"{desc.category}_{desc.base_name}",
                            "source": desc.source, "counts": [int(c) for c in row]})
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "thresholds": list(tr.thresholds),
        "mode": mode,
        "n_samples": cm.n_samples,
        "n_radiomic": len(cm.radiomic_names),
        "n_deep": len(cm.deep_names),
        "deep_provenance": cm.deep_provenance,
        "per_feature": per_feature,
        "grouped": [{"base": b, "counts": [int(c) for c in row]} for b, row in zip(gr.bases, gr.counts)],
        "trend": [{"M": round(float(m), 12), "total": int(t)} for m, t in zip(grid, trend)],
        "undefined_pairs": [list(p) for p in cm.undefined_pairs()],
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def report_csv(report: dict) -> str:
    """Flatten per-feature counts: one row per (feature, threshold)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", "level", "name", "base", "source", "mode", "M", "count"])
    v = report["schema_version"]
    for row in report["per_feature"]:
        for m, c in zip(report["thresholds"], row["counts"]):
            w.writerow([v, "feature", row["name"], row["base"], row["source"], report["mode"], m, c])
    for row in report["grouped"]:
        for m, c in zip(report["thresholds"], row["counts"]):
            w.writerow([v, "group", row["base"], row["base"], "", report["mode"], m, c])
    return buf.getvalue()


def report_schema() -> dict:
    text = resources.files("radexplain.data").joinpath("explain_report.schema.json").read_text("utf-8")
    return json.loads(text)


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if the report does not conform."""
    import jsonschema

    jsonschema.validate(report, report_schema())
