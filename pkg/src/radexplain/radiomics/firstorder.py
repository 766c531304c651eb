"""Intensity statistics over the ROI."""
from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch, EmptyMask
from ..imaging import DiscretizedRoi, as_image, as_mask


def first_order_features(image, mask, roi: DiscretizedRoi, spacing: float = 1.0) -> dict[str, float]:
    """Histogram and moment statistics of in-mask intensities.

    Energy-type features use raw intensities; Entropy and Uniformity use
    the discretized levels in ``roi``. Kurtosis is the plain fourth
    standardized moment (3 for a normal sample). A zero-variance ROI reports
    skewness 0 and kurtosis 3.
    """
    image = as_image(image)
    mask = as_mask(mask, like=image)
    if roi.mask.shape != mask.shape:
        raise DimensionMismatch("discretized ROI does not match the mask")
    if not mask.any():
        raise EmptyMask("mask has no true pixel")
    x = image[mask]
    n = x.size
    mean = float(x.mean())
    dev = x - mean
    m2 = float((dev ** 2).mean())
    m3 = float((dev ** 3).mean())
    m4 = float((dev ** 4).mean())
    if m2 > 0:
        skewness = m3 / m2 ** 1.5
        kurtosis = m4 / m2 ** 2
    else:
        skewness, kurtosis = 0.0, 3.0

    counts = np.bincount(roi.levels[roi.mask])
    q = counts[counts > 0] / counts.sum()
    energy = float((x ** 2).sum())
    p10, p25, p75, p90 = np.percentile(x, [10, 25, 75, 90])
    inner = x[(x >= p10) & (x <= p90)]

    return {
        "10Percentile": float(p10),
        "90Percentile": float(p90),
        "Energy": energy,
        "Entropy": float(-(q * np.log2(q)).sum()),
        "InterquartileRange": float(p75 - p25),
        "Kurtosis": float(kurtosis),
        "Maximum": float(x.max()),
        "Mean": mean,
        "MeanAbsoluteDeviation": float(np.abs(dev).mean()),
        "Median": float(np.median(x)),
        "Minimum": float(x.min()),
        "Range": float(x.max() - x.min()),
        "RobustMeanAbsoluteDeviation": float(np.abs(inner - inner.mean()).mean()),
        "RootMeanSquared": float(np.sqrt(energy / n)),
        "Skewness": float(skewness),
        "TotalEnergy": float(spacing ** 2 * energy),
        "Uniformity": float((q ** 2).sum()),
        "Variance": m2,
    }
