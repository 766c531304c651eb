import csv
import io
import json

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radexplain.errors import InputError, SampleMismatch, TooFewSamples, UnresolvableName
from radexplain.synthetic import planted_dataset
from radexplain.tabular import FeatureMatrix
from radexplain.xaicorr import (
    DEFAULT_THRESHOLDS,
    CorrelationMatrix,
    ThresholdReport,
    build_report,
    correlation_matrix,
    correlation_trend,
    default_trend_grid,
    group_by_base,
    report_csv,
    report_json,
    threshold_counts,
    validate_report,
)


def cm_from(rho, names=None, deep=None):
    rho = np.asarray(rho, dtype=float)
    names = names or [f"original_firstorder_F{i}" for i in range(rho.shape[0])]
    deep = deep or [f"d{j}" for j in range(rho.shape[1])]
    return CorrelationMatrix(rho, tuple(names), tuple(deep), 10)


def fm(ids, cols):
    names = list(cols)
    return FeatureMatrix(ids, names, np.column_stack([cols[c] for c in names]))


def test_correlation_examples():
    ids = ["a", "b", "c", "d"]
    r = fm(ids, {"original_firstorder_Energy": [1.0, 2.0, 3.0, 4.0]})
    d = fm(ids, {"same": [1.0, 2.0, 3.0, 4.0], "exp": np.exp([1.0, 2, 3, 4]), "swap": [1.0, 3.0, 2.0, 4.0]})
    cm = correlation_matrix(r, d)
    assert cm.rho.tolist() == [[1.0, 1.0, 0.8]]


def test_alignment_is_by_id():
    r = fm(["a", "b", "c"], {"original_firstorder_Energy": [1.0, 2.0, 3.0]})
    with pytest.raises(SampleMismatch):
        correlation_matrix(r, fm(["a", "c", "b"], {"d": [1.0, 2.0, 3.0]}))
    with pytest.raises(SampleMismatch):
        correlation_matrix(r, fm(["a", "b", "z"], {"d": [1.0, 2.0, 3.0]}))
    with pytest.raises(TooFewSamples):
        correlation_matrix(fm(["a", "b"], {"original_firstorder_X": [1.0, 2.0]}), fm(["a", "b"], {"d": [1.0, 2.0]}))


def test_threshold_examples():
    assert threshold_counts(cm_from([[0.5, 0.2]]), [0.45]).counts.tolist() == [[1]]
    assert threshold_counts(cm_from([[0.5, -0.7, 0.0]]), [-1.0]).counts.tolist() == [[3]]
    row = cm_from([[-0.9, 0.2]])
    assert threshold_counts(row, [0.45], "signed").counts.tolist() == [[0]]
    assert threshold_counts(row, [0.45], "absolute").counts.tolist() == [[1]]


def test_undefined_never_counts():
    cm = cm_from([[np.nan, 0.5], [np.nan, np.nan]])
    tr = threshold_counts(cm, [-1.0], "absolute")
    assert tr.counts.tolist() == [[1], [0]]
    assert cm.undefined_pairs() == [("original_firstorder_F0", "d0"), ("original_firstorder_F1", "d0"),
                                    ("original_firstorder_F1", "d1")]


def test_threshold_validation():
    with pytest.raises(InputError):
        threshold_counts(cm_from([[0.1]]), [])
    with pytest.raises(InputError):
        threshold_counts(cm_from([[0.1]]), [1.5])
    with pytest.raises(InputError):
        threshold_counts(cm_from([[0.1]]), [0.3], mode="both")


def test_defaults():
    assert DEFAULT_THRESHOLDS == (0.30, 0.35, 0.40, 0.45)


def test_grouping_sums_sources_and_orders():
    names = ["original_firstorder_Energy", "waveletLL_firstorder_Energy", "original_glcm_Contrast",
             "original_ngtdm_Contrast", "waveletHH_glcm_Contrast"]
    tr = ThresholdReport((0.3, 0.4), np.array([[3, 1], [2, 2], [0, 0], [5, 0], [1, 1]]), "signed", tuple(names))
    g = group_by_base(tr)
    assert g.bases == ("firstorder_Energy", "ngtdm_Contrast", "glcm_Contrast")
    assert g.counts.tolist() == [[5, 3], [5, 0], [1, 1]]
    assert g.members["glcm_Contrast"] == ("original_glcm_Contrast", "waveletHH_glcm_Contrast")


def test_zero_groups_are_kept():
    tr = ThresholdReport((0.3,), np.array([[0]]), "signed", ("original_glszm_ZonePercentage",))
    assert group_by_base(tr).counts.tolist() == [[0]]


def test_grouping_rejects_unknown_names():
    tr = ThresholdReport((0.3,), np.array([[1]]), "signed", ("deep_007",))
    with pytest.raises(UnresolvableName):
        group_by_base(tr)


def test_trend_identity_pairing_boundary():
    x = np.random.default_rng(0).normal(size=(20, 3))
    ids = [f"s{i}" for i in range(20)]
    r = FeatureMatrix(ids, [f"original_firstorder_F{i}" for i in range(3)], x)
    d = FeatureMatrix(ids, ["a", "b", "c"], x)
    trend = correlation_trend(correlation_matrix(r, d), [0.99, 1.0])
    assert trend[-1] >= 3


def test_trend_null_distribution():
    radiomic, deep, _ = planted_dataset(n=200, n_planted=0, seed=3)
    trend = correlation_trend(correlation_matrix(radiomic, deep), default_trend_grid())
    assert np.all(np.diff(trend) <= 0)
    assert trend[default_trend_grid() > 0.4].max() <= 1


def test_trend_plateau_at_planted_pairs():
    radiomic, deep, planted = planted_dataset(seed=4)
    cm = correlation_matrix(radiomic, deep)
    grid = default_trend_grid()
    trend = correlation_trend(cm, grid)
    assert trend[-1] == 3 and np.all(trend[grid >= 0.5] == 3)
    with pytest.raises(InputError):
        correlation_trend(cm, [0.5, 0.4])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deep_column_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = np.clip(rng.normal(scale=0.4, size=(6, 9)), -1, 1)
    perm = rng.permutation(9)
    for mode in ("signed", "absolute"):
        a = threshold_counts(cm_from(rho), DEFAULT_THRESHOLDS, mode).counts
        b = threshold_counts(cm_from(rho[:, perm]), DEFAULT_THRESHOLDS, mode).counts
        assert np.array_equal(a, b)


def test_report_is_valid_and_consistent():
    radiomic, deep, planted = planted_dataset(seed=5)
    report = build_report(correlation_matrix(radiomic, deep), mode="absolute")
    validate_report(report)
    assert json.loads(report_json(report)) == report
    for grp in report["grouped"]:
        members = [f["counts"] for f in report["per_feature"] if f["base"] == grp["base"]]
        assert grp["counts"] == np.sum(members, axis=0).tolist()
    rows = list(csv.DictReader(io.StringIO(report_csv(report))))
    assert len(rows) == 4 * (len(report["per_feature"]) + len(report["grouped"]))
    assert {r["schema_version"] for r in rows} == {"1"}


def test_report_schema_rejects_bad_documents():
    radiomic, deep, _ = planted_dataset(seed=6)
    report = build_report(correlation_matrix(radiomic, deep))
    broken = dict(report, mode="sideways")
    with pytest.raises(jsonschema.ValidationError):
        validate_report(broken)
    with pytest.raises(jsonschema.ValidationError):
        validate_report({k: v for k, v in report.items() if k != "grouped"})
