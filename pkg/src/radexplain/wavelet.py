"""Single-level orthonormal 2D Haar decomposition."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooSmall
from .imaging import as_image

_S = 1.0 / np.sqrt(2.0)

SUBBANDS = ("LL", "LH", "HL", "HH")


@dataclass(frozen=True)
class HaarSubbands:
    """Four subbands of one decomposition level.

    The first letter names the filter applied down the rows (vertical axis),
    the second the filter applied along each row (horizontal axis), so
    ``HL`` responds to changes from one row to the next.
    """

    LL: np.ndarray
    LH: np.ndarray
    HL: np.ndarray
    HH: np.ndarray
    origin: str = ""

    def __getitem__(self, name: str) -> np.ndarray:
        if name not in SUBBANDS:
            raise KeyError(name)
        return getattr(self, name)

    def items(self):
        return [(name, getattr(self, name)) for name in SUBBANDS]


def pad_to_even(arr: np.ndarray) -> np.ndarray:
    """Replicate the last row/column once along any odd axis."""
    h, w = arr.shape
    return np.pad(arr, ((0, h % 2), (0, w % 2)), mode="edge")


def haar_decompose(image, origin: str = "") -> HaarSubbands:
    img = as_image(image)
    if img.shape[0] < 2 or img.shape[1] < 2:
        raise TooSmall(f"Haar decomposition needs at least 2x2 pixels, got {img.shape}")
    x = pad_to_even(img)

    # along each row (pairs of columns)
    lo_c = (x[:, 0::2] + x[:, 1::2]) * _S
    hi_c = (x[:, 0::2] - x[:, 1::2]) * _S
    # then down the rows
    ll = (lo_c[0::2] + lo_c[1::2]) * _S
    hl = (lo_c[0::2] - lo_c[1::2]) * _S
    lh = (hi_c[0::2] + hi_c[1::2]) * _S
    hh = (hi_c[0::2] - hi_c[1::2]) * _S
    return HaarSubbands(LL=ll, LH=lh, HL=hl, HH=hh, origin=origin)
