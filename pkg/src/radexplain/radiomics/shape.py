"""2D shape descriptors of a binary ROI."""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from ..errors import EmptyMask
from ..imaging import as_mask


def _max_diameter(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    # the farthest pair lies on the convex hull
    try:
        points = points[ConvexHull(points).vertices]
    except QhullError:
        pass  # collinear ROI, use every point
    return float(pdist(points).max())


def shape2d_features(mask, spacing: float = 1.0) -> dict[str, float]:
    """Area, perimeter and moment-based descriptors.

    Perimeter counts pixel edges between the ROI and its outside. Axis
    lengths are ``4 * sqrt(eigenvalue)`` of the population covariance of
    pixel-centre coordinates.
    """
    mask = as_mask(mask)
    if not mask.any():
        raise EmptyMask("mask has no true pixel")
    n = int(mask.sum())
    padded = np.pad(mask, 1).astype(np.int8)
    edges = int(np.abs(np.diff(padded, axis=0)).sum() + np.abs(np.diff(padded, axis=1)).sum())

    area = n * spacing ** 2
    perimeter = edges * spacing
    coords = np.argwhere(mask).astype(np.float64) * spacing
    if n > 1:
        centred = coords - coords.mean(axis=0)
        cov = centred.T @ centred / n
        minor_ev, major_ev = np.clip(np.linalg.eigvalsh(cov), 0.0, None)
    else:
        minor_ev = major_ev = 0.0
    elongation = float(np.sqrt(minor_ev / major_ev)) if major_ev > 0 else 1.0

    return {
        "Elongation": elongation,
        "MajorAxisLength": float(4 * np.sqrt(major_ev)),
        "MaximumDiameter": _max_diameter(coords),
        "MinorAxisLength": float(4 * np.sqrt(minor_ev)),
        "Perimeter": float(perimeter),
        "PerimeterSurfaceRatio": float(perimeter / area),
        "PixelSurface": float(area),
        "Sphericity": float(2 * np.sqrt(np.pi * area) / perimeter),
    }
