"""Loading and preparing 2D grayscale images and ROI masks.

Images are 2D float arrays indexed ``[row, col]`` (height x width); masks are
boolean arrays of the same shape. Physical pixel size is carried separately
as ``spacing`` (mm per pixel edge) where it matters.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatch, EmptyMask, InputError

__all__ = [
    "DiscretizedRoi",
    "as_image",
    "as_mask",
    "load_image",
    "load_mask",
    "save_png8",
    "crop_to_bounding_box",
    "bilinear_resize",
    "resize_or_pad_patch",
    "discretize_fixed_levels",
    "min_max_normalize",
]


@dataclass(frozen=True)
class DiscretizedRoi:
    """Gray levels in ``1..n_levels`` inside ``mask``; 0 outside."""

    levels: np.ndarray
    n_levels: int
    mask: np.ndarray

    @property
    def n_pixels(self) -> int:
        return int(self.mask.sum())


def as_image(pixels) -> np.ndarray:
    img = np.asarray(pixels, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InputError(f"expected a non-empty 2D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InputError("image contains non-finite intensities")
    return img


def as_mask(bits, like: np.ndarray | None = None) -> np.ndarray:
    mask = np.asarray(bits).astype(bool)
    if mask.ndim != 2:
        raise InputError(f"expected a 2D mask, got shape {mask.shape}")
    if like is not None and mask.shape != like.shape:
        raise DimensionMismatch(f"mask shape {mask.shape} != image shape {like.shape}")
    return mask


def _require_roi(image: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    image = as_image(image)
    mask = as_mask(mask, like=image)
    if not mask.any():
        raise EmptyMask("mask has no true pixel")
    return image, mask


def load_image(path) -> np.ndarray:
    """Read an 8- or 16-bit grayscale PNG into a float array."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise InputError(f"{path}: only PNG images are supported")
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "I;16", "I;16B", "I;16L", "I"):
                raise InputError(f"{path}: not a grayscale PNG (mode {im.mode})")
            arr = np.array(im)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    return as_image(arr)


def load_mask(path) -> np.ndarray:
    """Read an 8-bit PNG mask; any nonzero byte is inside the ROI."""
    path = Path(path)
    if path.suffix.lower() != ".png":
        raise InputError(f"{path}: only PNG masks are supported")
    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "1", "P"):
                raise InputError(f"{path}: mask must be an 8-bit PNG (mode {im.mode})")
            arr = np.array(im.convert("L") if im.mode == "1" else im)
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    return arr != 0


def save_png8(path, values: np.ndarray) -> None:
    arr = np.asarray(values)
    if arr.dtype != np.uint8:
        arr = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, optimize=False)


def crop_to_bounding_box(image, mask) -> tuple[np.ndarray, np.ndarray]:
    """Crop both arrays to the tightest rectangle holding every ROI pixel."""
    image, mask = _require_roi(image, mask)
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    window = np.s_[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]
    return image[window].copy(), mask[window].copy()


def bilinear_resize(arr, height: int, width: int) -> np.ndarray:
    """Corner-aligned bilinear interpolation to ``height x width``.

    Output corner pixels coincide with input corners; a length-1 target axis
    samples the first input row/column.
    """
    arr = np.asarray(arr, dtype=np.float64)
    if height < 1 or width < 1:
        raise InputError("target dimensions must be >= 1")
    h, w = arr.shape

    def coords(n_in, n_out):
        if n_out == 1 or n_in == 1:
            pos = np.zeros(n_out)
        else:
            pos = np.arange(n_out) * ((n_in - 1) / (n_out - 1))
        lo = np.minimum(np.floor(pos).astype(np.intp), n_in - 1)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, pos - lo

    r0, r1, fr = coords(h, height)
    c0, c1, fc = coords(w, width)
    fr = fr[:, None]
    fc = fc[None, :]
    top = arr[r0][:, c0] * (1 - fc) + arr[r0][:, c1] * fc
    bottom = arr[r1][:, c0] * (1 - fc) + arr[r1][:, c1] * fc
    return top * (1 - fr) + bottom * fr


def resize_or_pad_patch(image, target: int = 128) -> np.ndarray:
    """Bring a patch to ``target x target``.

    Patches that fit are centered in a zero field (odd slack goes to the
    bottom/right). Larger patches are bilinearly shrunk so the longer side
    equals ``target`` and then zero-padded along the shorter side.
    """
    image = as_image(image)
    if target < 1:
        raise InputError("target must be >= 1")
    h, w = image.shape
    if h > target or w > target:
        longer = max(h, w)
        nh = target if h == longer else max(1, int(round(h * target / longer)))
        nw = target if w == longer else max(1, int(round(w * target / longer)))
        image = bilinear_resize(image, nh, nw)
        h, w = nh, nw
    out = np.zeros((target, target), dtype=np.float64)
    top = (target - h) // 2
    left = (target - w) // 2
    out[top:top + h, left:left + w] = image
    return out


def discretize_fixed_levels(image, mask, n_levels: int = 255) -> DiscretizedRoi:
    """Fixed bin-count discretization using the ROI's own min/max."""
    image, mask = _require_roi(image, mask)
    if n_levels < 1:
        raise InputError("n_levels must be >= 1")
    vals = image[mask]
    lo, hi = vals.min(), vals.max()
    levels = np.zeros(image.shape, dtype=np.int64)
    if hi == lo:
        levels[mask] = 1
    else:
        # rounding absorbs ulp noise so boundary values bin the same way
        # after an affine intensity change
        scaled = np.round((vals - lo) / (hi - lo) * n_levels, 9)
        binned = np.floor(scaled).astype(np.int64) + 1
        levels[mask] = np.minimum(binned, n_levels)
    return DiscretizedRoi(levels=levels, n_levels=int(n_levels), mask=mask)


def min_max_normalize(image) -> np.ndarray:
    """Per-image rescale to [0, 1]; a constant image maps to zeros."""
    image = as_image(image)
    lo, hi = image.min(), image.max()
    if hi == lo:
        return np.zeros_like(image)
    return (image - lo) / (hi - lo)
