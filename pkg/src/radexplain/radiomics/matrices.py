"""Texture matrices built from a discretized ROI.

All matrices index gray levels from 1 in the math and from 0 in the arrays,
so row ``g - 1`` belongs to level ``g``. Directional matrices aggregate the
four in-plane directions at distance one by summation before any feature is
computed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..errors import EmptyMask
from ..imaging import DiscretizedRoi

DEFAULT_OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))

_NEIGHBORS_8 = tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0))


@dataclass(frozen=True)
class Glcm:
    P: np.ndarray
    offsets: tuple
    symmetric: bool = True


@dataclass(frozen=True)
class Glrlm:
    R: np.ndarray  # R[g-1, l-1]


@dataclass(frozen=True)
class Glszm:
    S: np.ndarray  # S[g-1, z-1]
    n_pixels: int


@dataclass(frozen=True)
class Gldm:
    D: np.ndarray  # D[g-1, k], k dependent neighbours
    alpha: int = 0


@dataclass(frozen=True)
class Ngtdm:
    s: np.ndarray
    n: np.ndarray
    p: np.ndarray
    n_valid: int


def _check(roi: DiscretizedRoi) -> np.ndarray:
    if not roi.mask.any():
        raise EmptyMask("discretized ROI is empty")
    return np.where(roi.mask, roi.levels, 0).astype(np.int64)


def _shifted_pairs(levels: np.ndarray, dr: int, dc: int) -> tuple[np.ndarray, np.ndarray]:
    """Level pairs (a at p, b at p + (dr, dc)) with both ends inside the ROI."""
    h, w = levels.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r1 <= r0 or c1 <= c0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    a = levels[r0:r1, c0:c1]
    b = levels[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    keep = (a > 0) & (b > 0)
    return a[keep], b[keep]


def compute_glcm(roi: DiscretizedRoi, offsets=DEFAULT_OFFSETS, symmetric: bool = True) -> Glcm:
    levels = _check(roi)
    ng = roi.n_levels
    counts = np.zeros(ng * ng, dtype=np.float64)
    for dr, dc in offsets:
        a, b = _shifted_pairs(levels, dr, dc)
        counts += np.bincount((a - 1) * ng + (b - 1), minlength=ng * ng)
        if symmetric:
            counts += np.bincount((b - 1) * ng + (a - 1), minlength=ng * ng)
    P = counts.reshape(ng, ng)
    total = P.sum()
    if total > 0:
        P = P / total
    else:
        # no in-mask neighbour pair (isolated pixels): all mass on the
        # diagonal at the occurring levels
        hist = np.bincount(levels[levels > 0] - 1, minlength=ng).astype(np.float64)
        P = np.diag(hist / hist.sum())
    return Glcm(P=P, offsets=tuple(tuple(o) for o in offsets), symmetric=symmetric)


def _direction_lines(levels: np.ndarray, dr: int, dc: int):
    h, w = levels.shape
    if (dr, dc) == (0, 1):
        yield from levels
    elif (dr, dc) == (1, 0):
        yield from levels.T
    elif (dr, dc) == (1, 1):
        for k in range(-(h - 1), w):
            yield np.diagonal(levels, offset=k)
    elif (dr, dc) == (1, -1):
        flipped = levels[:, ::-1]
        for k in range(-(h - 1), w):
            yield np.diagonal(flipped, offset=k)
    else:
        raise ValueError(f"unsupported run direction {(dr, dc)}")


def _runs(line: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximal runs of equal non-zero values: (levels, lengths)."""
    n = line.size
    if n == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    starts = np.flatnonzero(np.r_[True, line[1:] != line[:-1]])
    lengths = np.diff(np.r_[starts, n])
    vals = line[starts]
    keep = vals > 0
    return vals[keep], lengths[keep]


def compute_glrlm(roi: DiscretizedRoi, directions=DEFAULT_OFFSETS) -> Glrlm:
    levels = _check(roi)
    ng = roi.n_levels
    lmax = max(levels.shape)
    R = np.zeros((ng, lmax), dtype=np.int64)
    for dr, dc in directions:
        for line in _direction_lines(levels, dr, dc):
            vals, lengths = _runs(np.asarray(line))
            np.add.at(R, (vals - 1, lengths - 1), 1)
    return Glrlm(R=R)


_STRUCT_8 = np.ones((3, 3), dtype=bool)


def compute_glszm(roi: DiscretizedRoi) -> Glszm:
    levels = _check(roi)
    ng = roi.n_levels
    n_pixels = int((levels > 0).sum())
    S = np.zeros((ng, n_pixels), dtype=np.int64)
    for g in np.unique(levels[levels > 0]):
        labelled, n_zones = ndimage.label(levels == g, structure=_STRUCT_8)
        sizes = np.bincount(labelled.ravel())[1:]
        np.add.at(S[g - 1], sizes - 1, 1)
    return Glszm(S=S, n_pixels=n_pixels)


def _neighbour_stack(levels: np.ndarray) -> np.ndarray:
    """8 x H x W array of neighbour levels (0 where outside image or ROI)."""
    padded = np.pad(levels, 1)
    h, w = levels.shape
    return np.stack([padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w] for dr, dc in _NEIGHBORS_8])


def compute_gldm(roi: DiscretizedRoi, alpha: int = 0) -> Gldm:
    levels = _check(roi)
    ng = roi.n_levels
    nb = _neighbour_stack(levels)
    inside = levels > 0
    dependent = (nb > 0) & (np.abs(nb - levels[None]) <= alpha)
    k = dependent.sum(axis=0)[inside]
    D = np.zeros((ng, 9), dtype=np.int64)
    np.add.at(D, (levels[inside] - 1, k), 1)
    return Gldm(D=D, alpha=alpha)


def compute_ngtdm(roi: DiscretizedRoi) -> Ngtdm:
    levels = _check(roi)
    ng = roi.n_levels
    nb = _neighbour_stack(levels)
    count = (nb > 0).sum(axis=0)
    total = nb.sum(axis=0)
    valid = (levels > 0) & (count > 0)
    g = levels[valid]
    diff = np.abs(g - total[valid] / count[valid])
    s = np.bincount(g - 1, weights=diff, minlength=ng)
    n = np.bincount(g - 1, minlength=ng).astype(np.float64)
    n_valid = int(valid.sum())
    p = n / n_valid if n_valid else np.zeros(ng)
    return Ngtdm(s=s, n=n, p=p, n_valid=n_valid)
