import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from radexplain.errors import DimensionMismatch, EmptyMask, InputError
from radexplain.imaging import (
    bilinear_resize,
    crop_to_bounding_box,
    discretize_fixed_levels,
    load_image,
    load_mask,
    min_max_normalize,
    resize_or_pad_patch,
    save_png8,
)

from oracles import bilinear_point


def test_crop_single_pixel():
    img = np.arange(25.0).reshape(5, 5)
    mask = np.zeros((5, 5), bool)
    mask[2, 2] = True
    c_img, c_mask = crop_to_bounding_box(img, mask)
    assert c_img.shape == (1, 1) and c_img[0, 0] == 12.0
    assert c_mask.all()


def test_crop_full_mask_is_identity():
    img = np.random.default_rng(0).random((4, 6))
    c_img, c_mask = crop_to_bounding_box(img, np.ones((4, 6), bool))
    assert np.array_equal(c_img, img) and c_mask.all()


def test_crop_two_points():
    img = np.arange(16.0).reshape(4, 4)
    mask = np.zeros((4, 4), bool)
    mask[1, 1] = mask[2, 3] = True
    c_img, c_mask = crop_to_bounding_box(img, mask)
    assert np.array_equal(c_img, img[1:3, 1:4])
    assert c_mask.sum() == 2


def test_crop_errors():
    with pytest.raises(EmptyMask):
        crop_to_bounding_box(np.ones((3, 3)), np.zeros((3, 3), bool))
    with pytest.raises(DimensionMismatch):
        crop_to_bounding_box(np.ones((3, 3)), np.ones((3, 4), bool))


@settings(max_examples=60, deadline=None)
@given(arrays(np.bool_, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_crop_idempotent(mask):
    if not mask.any():
        mask[0, 0] = True
    img = np.arange(mask.size, dtype=float).reshape(mask.shape)
    once = crop_to_bounding_box(img, mask)
    twice = crop_to_bounding_box(*once)
    assert np.array_equal(once[0], twice[0]) and np.array_equal(once[1], twice[1])
    assert np.array_equal(once[0][once[1]], img[mask])


def test_patch_identity_and_padding():
    img = np.random.default_rng(1).random((128, 128))
    assert np.array_equal(resize_or_pad_patch(img, 128), img)
    out = resize_or_pad_patch(np.full((2, 2), 7.0), 4)
    expected = np.zeros((4, 4))
    expected[1:3, 1:3] = 7
    assert np.array_equal(out, expected)


def test_patch_padding_ties_go_top_left():
    out = resize_or_pad_patch(np.ones((1, 2)), 4)
    assert np.array_equal(np.argwhere(out > 0), [[1, 1], [1, 2]])


def test_patch_downsample_matches_bilinear_oracle():
    img = np.random.default_rng(2).random((256, 128))
    out = resize_or_pad_patch(img, 128)
    assert out.shape == (128, 128)
    # 128 x 64 content centred horizontally
    assert np.all(out[:, :32] == 0) and np.all(out[:, 96:] == 0)
    content = out[:, 32:96]
    rows = img.tolist()
    for r, c in [(0, 0), (0, 63), (127, 0), (127, 63), (64, 17)]:
        ref = bilinear_point(rows, r * 255 / 127, c * 127 / 63)
        assert abs(content[r, c] - ref) <= 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(1, 16))
def test_patch_shape_property(h, w, target):
    img = np.ones((h, w))
    out = resize_or_pad_patch(img, target)
    assert out.shape == (target, target)
    if h <= target and w <= target:
        assert out.sum() == h * w


def test_bilinear_corner_alignment():
    arr = np.array([[0.0, 1.0], [2.0, 3.0]])
    out = bilinear_resize(arr, 3, 3)
    assert out[0, 0] == 0 and out[0, 2] == 1 and out[2, 0] == 2 and out[2, 2] == 3
    assert out[1, 1] == 1.5


def test_discretize_examples():
    assert np.all(discretize_fixed_levels(np.full((3, 3), 4.2), np.ones((3, 3), bool), 255).levels == 1)
    roi = discretize_fixed_levels(np.array([[0.0, 0.5, 1.0]]), np.ones((1, 3), bool), 2)
    assert roi.levels.tolist() == [[1, 2, 2]]
    roi = discretize_fixed_levels(np.array([[10.0, 20.0, 30.0]]), np.ones((1, 3), bool), 3)
    assert roi.levels.tolist() == [[1, 2, 3]]


def test_discretize_outside_mask_is_zero():
    img = np.array([[1.0, 2.0], [3.0, 100.0]])
    mask = np.array([[True, True], [True, False]])
    roi = discretize_fixed_levels(img, mask, 4)
    assert roi.levels[1, 1] == 0 and roi.n_pixels == 3
    assert roi.levels[mask].min() >= 1 and roi.levels[mask].max() <= 4


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 8)),
           elements=st.floats(0, 1000, allow_nan=False)),
    st.floats(0.01, 100), st.floats(-100, 100), st.integers(1, 255),
)
def test_discretize_affine_invariance(img, a, b, ng):
    mask = np.ones(img.shape, bool)
    base = discretize_fixed_levels(img, mask, ng).levels
    assert np.array_equal(discretize_fixed_levels(a * img + b, mask, ng).levels, base)


def test_min_max_normalize():
    assert min_max_normalize(np.array([[0.0, 5.0, 10.0]])).tolist() == [[0, 0.5, 1]]
    assert min_max_normalize(np.array([[-2.0, 0.0, 2.0]])).tolist() == [[0, 0.5, 1]]
    assert not min_max_normalize(np.full((2, 2), 3.0)).any()


def test_png_roundtrip(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    save_png8(tmp_path / "a.png", img)
    assert np.array_equal(load_image(tmp_path / "a.png"), img)
    save_png8(tmp_path / "m.png", np.array([[0, 1, 255]]))
    assert load_mask(tmp_path / "m.png").tolist() == [[False, True, True]]


def test_sixteen_bit_png(tmp_path):
    from PIL import Image

    arr = np.array([[0, 1000], [40000, 65535]], dtype=np.uint16)
    Image.fromarray(arr).save(tmp_path / "w.png")
    assert np.array_equal(load_image(tmp_path / "w.png"), arr)


def test_non_png_rejected(tmp_path):
    (tmp_path / "x.jpg").write_bytes(b"")
    with pytest.raises(InputError):
        load_image(tmp_path / "x.jpg")
    with pytest.raises(InputError):
        load_image(tmp_path / "missing.png")


def test_non_finite_rejected():
    with pytest.raises(InputError):
        min_max_normalize(np.array([[np.nan, 1.0]]))
