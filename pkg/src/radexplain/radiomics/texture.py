"""Texture features computed from the matrices in :mod:`.matrices`.

Entropies are base 2 with ``0 * log 0 = 0``. Gray levels are 1-based.
"""
from __future__ import annotations

import numpy as np

from .matrices import Glcm, Gldm, Glrlm, Glszm, Ngtdm

COARSENESS_CAP = 1e6


def _entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def glcm_features(glcm: Glcm) -> dict[str, float]:
    P = glcm.P
    ng = P.shape[0]
    i = np.arange(1, ng + 1, dtype=np.float64)[:, None]
    j = i.T
    px = P.sum(axis=1)
    py = P.sum(axis=0)
    lv = i.ravel()
    mux = float((lv * px).sum())
    muy = float((lv * py).sum())
    sigx = float(np.sqrt((((lv - mux) ** 2) * px).sum()))
    sigy = float(np.sqrt((((lv - muy) ** 2) * py).sum()))

    diff = np.abs(i - j).astype(np.int64)
    p_minus = np.bincount(diff.ravel(), weights=P.ravel(), minlength=ng)
    ks = np.arange(ng, dtype=np.float64)
    p_plus = np.bincount((i + j).astype(np.int64).ravel() - 2, weights=P.ravel(), minlength=2 * ng - 1)
    ks_plus = np.arange(2, 2 * ng + 1, dtype=np.float64)
    diff_avg = float((ks * p_minus).sum())
    centred_sum = i + j - mux - muy

    if sigx * sigy == 0:
        correlation = 1.0
    else:
        correlation = float(((i * j * P).sum() - mux * muy) / (sigx * sigy))

    off = diff > 0
    hx, hy = _entropy(px), _entropy(py)
    hxy = _entropy(P.ravel())
    outer = px[:, None] * py[None, :]
    nz = P > 0
    hxy1 = float(-(P[nz] * np.log2(outer[nz])).sum())
    imc1 = (hxy - hxy1) / max(hx, hy) if max(hx, hy) > 0 else 0.0

    return {
        "Autocorrelation": float((i * j * P).sum()),
        "ClusterProminence": float((centred_sum ** 4 * P).sum()),
        "ClusterShade": float((centred_sum ** 3 * P).sum()),
        "ClusterTendency": float((centred_sum ** 2 * P).sum()),
        "Contrast": float(((i - j) ** 2 * P).sum()),
        "Correlation": correlation,
        "DifferenceAverage": diff_avg,
        "DifferenceEntropy": _entropy(p_minus),
        "DifferenceVariance": float((((ks - diff_avg) ** 2) * p_minus).sum()),
        "Idm": float((P / (1 + diff ** 2)).sum()),
        "Idmn": float((P / (1 + diff ** 2 / ng ** 2)).sum()),
        "Idn": float((P / (1 + diff / ng)).sum()),
        "Imc1": float(imc1),
        "InverseDifference": float((P / (1 + diff)).sum()),
        "InverseVariance": float((P[off] / diff[off] ** 2).sum()),
        "JointAverage": mux,
        "JointEnergy": float((P ** 2).sum()),
        "JointEntropy": hxy,
        "MaximumProbability": float(P.max()),
        "SumAverage": float((ks_plus * p_plus).sum()),
        "SumEntropy": _entropy(p_plus),
        "SumSquares": float((((i - mux) ** 2) * P).sum()),
    }


def _size_features(M: np.ndarray, prefix_small: str, prefix_large: str, unit: str):
    """Features shared by run-length, size-zone and dependence matrices.

    ``M[g-1, s-1]`` counts items of level ``g`` and size ``s``.
    """
    M = M.astype(np.float64)
    ng, ns = M.shape
    g = np.arange(1, ng + 1, dtype=np.float64)[:, None]
    s = np.arange(1, ns + 1, dtype=np.float64)[None, :]
    total = M.sum()
    p = M / total
    pg = M.sum(axis=1)
    ps = M.sum(axis=0)
    mu_g = float((p * g).sum())
    mu_s = float((p * s).sum())
    out = {
        f"{prefix_small}Emphasis": float((M / s ** 2).sum() / total),
        f"{prefix_large}Emphasis": float((M * s ** 2).sum() / total),
        "GrayLevelNonUniformity": float((pg ** 2).sum() / total),
        "GrayLevelNonUniformityNormalized": float((pg ** 2).sum() / total ** 2),
        f"{unit}NonUniformity": float((ps ** 2).sum() / total),
        f"{unit}NonUniformityNormalized": float((ps ** 2).sum() / total ** 2),
        "GrayLevelVariance": float((p * (g - mu_g) ** 2).sum()),
        f"{unit}Variance": float((p * (s - mu_s) ** 2).sum()),
        f"{unit}Entropy": _entropy(p.ravel()),
        f"{prefix_small}LowGrayLevelEmphasis": float((M / (s ** 2 * g ** 2)).sum() / total),
        f"{prefix_small}HighGrayLevelEmphasis": float((M * g ** 2 / s ** 2).sum() / total),
        f"{prefix_large}LowGrayLevelEmphasis": float((M * s ** 2 / g ** 2).sum() / total),
        f"{prefix_large}HighGrayLevelEmphasis": float((M * s ** 2 * g ** 2).sum() / total),
    }
    return out, total, g, pg


def glrlm_features(glrlm: Glrlm) -> dict[str, float]:
    R = glrlm.R
    lengths = np.arange(1, R.shape[1] + 1)
    n_run_pixels = float((R.sum(axis=0) * lengths).sum())
    out, n_runs, g, pg = _size_features(R, "ShortRun", "LongRun", "RunLength")
    out["RunEntropy"] = out.pop("RunLengthEntropy")
    out["RunVariance"] = out.pop("RunLengthVariance")
    gl = g.ravel()
    out["LowGrayLevelRunEmphasis"] = float((pg / gl ** 2).sum() / n_runs)
    out["HighGrayLevelRunEmphasis"] = float((pg * gl ** 2).sum() / n_runs)
    # each direction partitions the ROI, so run pixels = directions x pixels
    out["RunPercentage"] = float(n_runs / n_run_pixels)
    return dict(sorted(out.items()))


def glszm_features(glszm: Glszm) -> dict[str, float]:
    out, n_zones, g, pg = _size_features(glszm.S, "SmallArea", "LargeArea", "SizeZone")
    out["ZoneEntropy"] = out.pop("SizeZoneEntropy")
    out["ZoneVariance"] = out.pop("SizeZoneVariance")
    gl = g.ravel()
    out["LowGrayLevelZoneEmphasis"] = float((pg / gl ** 2).sum() / n_zones)
    out["HighGrayLevelZoneEmphasis"] = float((pg * gl ** 2).sum() / n_zones)
    out["ZonePercentage"] = float(n_zones / glszm.n_pixels)
    return dict(sorted(out.items()))


def gldm_features(gldm: Gldm) -> dict[str, float]:
    """Dependence features.

    Emphasis, variance and entropy terms use the dependence size
    ``k + 1`` (the pixel itself plus its ``k`` dependent neighbours).
    """
    out, n_pixels, g, pg = _size_features(gldm.D, "SmallDependence", "LargeDependence", "Dependence")
    gl = g.ravel()
    out["LowGrayLevelEmphasis"] = float((pg / gl ** 2).sum() / n_pixels)
    out["HighGrayLevelEmphasis"] = float((pg * gl ** 2).sum() / n_pixels)
    return dict(sorted(out.items()))


def ngtdm_features(ngtdm: Ngtdm) -> dict[str, float]:
    s, p, nvp = ngtdm.s, ngtdm.p, ngtdm.n_valid
    ng = s.size
    lv = np.arange(1, ng + 1, dtype=np.float64)
    occ = p > 0
    ngp = int(occ.sum())
    ps = float((p * s).sum())
    s_sum = float(s.sum())

    coarseness = COARSENESS_CAP if ps == 0 else min(1.0 / ps, COARSENESS_CAP)
    if ngp <= 1:
        return {"Busyness": 0.0, "Coarseness": coarseness, "Complexity": 0.0,
                "Contrast": 0.0, "Strength": 0.0}

    i, pi, si = lv[occ][:, None], p[occ][:, None], s[occ][:, None]
    j, pj, sj = i.T, pi.T, si.T
    contrast = float((pi * pj * (i - j) ** 2).sum() / (ngp * (ngp - 1)) * s_sum / nvp)
    busy_den = float(np.abs(i * pi - j * pj).sum())
    busyness = ps / busy_den if busy_den > 0 else 0.0
    complexity = float((np.abs(i - j) * (pi * si + pj * sj) / (pi + pj)).sum() / nvp)
    strength = float(((pi + pj) * (i - j) ** 2).sum() / s_sum) if s_sum > 0 else 0.0
    return {"Busyness": float(busyness), "Coarseness": coarseness, "Complexity": complexity,
            "Contrast": contrast, "Strength": strength}
