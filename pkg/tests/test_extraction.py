import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radexplain.errors import EmptyMask, UnresolvableName
from radexplain.imaging import discretize_fixed_levels, load_image, load_mask
from radexplain.radiomics import (
    CATEGORIES,
    SOURCES,
    ExtractionConfig,
    extract_all,
    feature_descriptors,
    feature_dictionary_csv,
    feature_names,
    first_order_features,
    parse_feature_name,
    shape2d_features,
    subband_mask,
)
from radexplain.radiomics.extract import shipped_feature_dictionary
from radexplain.tabular import read_csv


def first_order(values, spacing=1.0):
    img = np.asarray(values, dtype=float).reshape(1, -1)
    mask = np.ones(img.shape, bool)
    return first_order_features(img, mask, discretize_fixed_levels(img, mask, 255), spacing)


def test_first_order_small_set():
    f = first_order([1, 2, 3])
    assert f["Energy"] == 14 and f["Mean"] == 2 and f["Range"] == 2
    assert f["Minimum"] == 1 and f["Maximum"] == 3 and f["Median"] == 2


def test_first_order_constant():
    f = first_order([5] * 6)
    assert f["Energy"] == 150 and f["Variance"] == 0
    assert f["Entropy"] == 0 and f["Uniformity"] == 1
    assert f["Skewness"] == 0 and f["Kurtosis"] == 3


def test_first_order_moments():
    f = first_order([0, 0, 0, 1])
    assert f["Mean"] == 0.25 and f["Variance"] == 0.1875
    assert abs(f["Skewness"] - 2 / math.sqrt(3)) <= 1e-12
    # m4 = (3 * 0.25**4 + 0.75**4) / 4 = 0.08203125; m4 / m2**2 = 7/3
    assert abs(f["Kurtosis"] - 7 / 3) <= 1e-12


def test_first_order_moments_brute_force():
    rng = np.random.default_rng(5)
    x = rng.gamma(2.0, 3.0, size=37)
    f = first_order(x, spacing=0.5)
    n = len(x)
    mean = sum(x) / n
    m2 = sum((v - mean) ** 2 for v in x) / n
    m3 = sum((v - mean) ** 3 for v in x) / n
    m4 = sum((v - mean) ** 4 for v in x) / n
    assert math.isclose(f["Skewness"], m3 / m2 ** 1.5, rel_tol=1e-9)
    assert math.isclose(f["Kurtosis"], m4 / m2 ** 2, rel_tol=1e-9)
    assert math.isclose(f["TotalEnergy"], 0.25 * sum(v * v for v in x), rel_tol=1e-12)
    assert math.isclose(f["RootMeanSquared"], math.sqrt(sum(v * v for v in x) / n), rel_tol=1e-12)
    assert math.isclose(f["MeanAbsoluteDeviation"], sum(abs(v - mean) for v in x) / n, rel_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100))
def test_energy_scales_quadratically(seed, a):
    x = np.random.default_rng(seed).random(20) * 50
    e1, e2 = first_order(x)["Energy"], first_order(a * x)["Energy"]
    assert math.isclose(e2, a * a * e1, rel_tol=1e-9)


def _perimeter_reference(mask):
    h, w = mask.shape
    edges = 0
    for r in range(h):
        for c in range(w):
            if mask[r, c]:
                for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                    rr, cc = r + dr, c + dc
                    edges += not (0 <= rr < h and 0 <= cc < w and mask[rr, cc])
    return edges


def _diameter_reference(mask):
    pts = [(r, c) for r, c in zip(*np.nonzero(mask))]
    return max((math.dist(p, q) for p in pts for q in pts), default=0.0)


def test_shape_single_pixel():
    f = shape2d_features(np.ones((1, 1), bool))
    assert f["PixelSurface"] == 1 and f["Perimeter"] == 4 and f["MaximumDiameter"] == 0
    assert f["Elongation"] == 1


def test_shape_square():
    f = shape2d_features(np.ones((2, 2), bool))
    assert f["PixelSurface"] == 4 and f["Perimeter"] == 8
    assert abs(f["MaximumDiameter"] - math.sqrt(2)) <= 1e-12


def test_shape_row():
    f = shape2d_features(np.ones((1, 4), bool))
    assert f["Elongation"] < 1
    # variance of 0,1,2,3 is 1.25
    assert abs(f["MajorAxisLength"] - 4 * math.sqrt(1.25)) <= 1e-12
    assert f["MinorAxisLength"] == 0


def test_shape_spacing():
    mask = np.zeros((5, 5), bool)
    mask[1:4, 1:3] = True
    f1, f2 = shape2d_features(mask), shape2d_features(mask, spacing=0.5)
    assert f2["PixelSurface"] == f1["PixelSurface"] / 4
    assert f2["Perimeter"] == f1["Perimeter"] / 2


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 9), st.integers(1, 9))
def test_shape_against_reference(seed, h, w):
    rng = np.random.default_rng(seed)
    mask = rng.random((h, w)) < 0.6
    mask[0, 0] = True
    f = shape2d_features(mask)
    assert f["Perimeter"] == _perimeter_reference(mask)
    assert abs(f["MaximumDiameter"] - _diameter_reference(mask)) <= 1e-12
    assert f["Sphericity"] == pytest.approx(2 * math.sqrt(math.pi * mask.sum()) / f["Perimeter"], rel=1e-12)


def test_shape_empty():
    with pytest.raises(EmptyMask):
        shape2d_features(np.zeros((2, 2), bool))


def test_subband_mask_majority():
    mask = np.array([[1, 1, 0, 0], [0, 0, 0, 1], [1, 1, 1, 0], [1, 0, 0, 0]], bool)
    assert subband_mask(mask).tolist() == [[True, False], [True, False]]


def test_subband_mask_tiny_roi_falls_back():
    mask = np.zeros((4, 4), bool)
    mask[1, 2] = True
    assert subband_mask(mask).tolist() == [[False, True], [False, False]]


def test_feature_names_and_order():
    names = feature_names()
    assert len(names) == len(set(names)) >= 90
    descs = feature_descriptors()
    keys = [(CATEGORIES.index(d.category), d.base_name, SOURCES.index(d.source)) for d in descs]
    assert keys == sorted(keys)
    assert all(d.source == "original" for d in descs if d.category == "shape2d")
    assert {d.category for d in descs} == set(CATEGORIES)


def test_parse_feature_name():
    d = parse_feature_name("waveletHL_glszm_SizeZoneNonUniformity")
    assert (d.source, d.category, d.base_name) == ("waveletHL", "glszm", "SizeZoneNonUniformity")
    for bad in ("Energy", "waveletLL_shape2d_Perimeter", "original_foo_Energy", "x_firstorder_Energy"):
        with pytest.raises(UnresolvableName):
            parse_feature_name(bad)


def test_constant_image_has_zero_high_band_energy():
    img = np.full((12, 10), 42.0)
    mask = np.zeros(img.shape, bool)
    mask[2:9, 3:8] = True
    f = extract_all(img, mask)
    assert f["waveletHH_firstorder_Energy"] == 0
    assert f["waveletLH_firstorder_Energy"] == 0 and f["waveletHL_firstorder_Energy"] == 0
    assert list(f) == feature_names()
    assert all(math.isfinite(v) for v in f.values())


def test_extraction_is_deterministic():
    rng = np.random.default_rng(9)
    img = rng.random((20, 18)) * 255
    mask = rng.random((20, 18)) < 0.5
    assert extract_all(img, mask) == extract_all(img.copy(), mask.copy())


def test_extraction_error_names_source():
    with pytest.raises(EmptyMask, match="original"):
        extract_all(np.ones((4, 4)), np.zeros((4, 4), bool))


def test_fixture_matches_golden(fixture_dir, golden_dir):
    golden = read_csv(golden_dir / "features.csv")
    cfg = ExtractionConfig(n_levels=64)
    with open(fixture_dir / "manifest.csv", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for i, row in enumerate(rows[:6]):
        from radexplain.imaging import crop_to_bounding_box

        img, mask = crop_to_bounding_box(load_image(fixture_dir / row["image_path"]),
                                         load_mask(fixture_dir / row["mask_path"]))
        values = np.array(list(extract_all(img, mask, cfg).values()))
        assert golden.sample_ids[i] == row["sample_id"]
        assert np.array_equal(values, golden.values[i])


def test_shipped_dictionary_is_current():
    assert shipped_feature_dictionary() == feature_dictionary_csv()
    rows = list(csv.DictReader(io.StringIO(shipped_feature_dictionary())))
    assert [r["name"] for r in rows] == feature_names()
    assert all(r["formula"] for r in rows)
