"""Full feature vector for one image/mask pair, plus the feature dictionary."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..errors import RadExplainError, UnresolvableName
from ..imaging import as_image, as_mask, discretize_fixed_levels
from ..wavelet import haar_decompose, pad_to_even
from .firstorder import first_order_features
from .matrices import compute_glcm, compute_gldm, compute_glrlm, compute_glszm, compute_ngtdm
from .shape import shape2d_features
from .texture import glcm_features, gldm_features, glrlm_features, glszm_features, ngtdm_features

CATEGORIES = ("shape2d", "firstorder", "glcm", "glrlm", "glszm", "gldm", "ngtdm")
SOURCES = ("original", "waveletLL", "waveletLH", "waveletHL", "waveletHH")


@dataclass(frozen=True)
class FeatureDescriptor:
    base_name: str
    category: str
    source: str

    @property
    def name(self) -> str:
        return f"{self.source}_{self.category}_{self.base_name}"


@dataclass(frozen=True)
class ExtractionConfig:
    n_levels: int = 255
    spacing: float = 1.0
    gldm_alpha: int = 0


def parse_feature_name(name: str) -> FeatureDescriptor:
    parts = name.split("_", 2)
    if len(parts) != 3 or parts[0] not in SOURCES or parts[1] not in CATEGORIES or not parts[2]:
        raise UnresolvableName(f"not a radiomic feature name: {name!r}")
    source, category, base = parts
    if category == "shape2d" and source != "original":
        raise UnresolvableName(f"shape features exist only for the original image: {name!r}")
    return FeatureDescriptor(base_name=base, category=category, source=source)


def subband_mask(mask: np.ndarray) -> np.ndarray:
    """Project a mask onto the Haar subband grid.

    A subband pixel is inside when at least two of its four parent pixels
    are. If that leaves nothing (tiny ROIs), any inside parent counts.
    """
    m = pad_to_even(as_mask(mask)).astype(np.int64)
    votes = m[0::2, 0::2] + m[0::2, 1::2] + m[1::2, 0::2] + m[1::2, 1::2]
    out = votes >= 2
    if not out.any():
        out = votes >= 1
    return out


def _texture(image, mask, cfg: ExtractionConfig) -> dict[str, dict[str, float]]:
    roi = discretize_fixed_levels(image, mask, cfg.n_levels)
    return {
        "firstorder": first_order_features(image, mask, roi, cfg.spacing),
        "glcm": glcm_features(compute_glcm(roi)),
        "glrlm": glrlm_features(compute_glrlm(roi)),
        "glszm": glszm_features(compute_glszm(roi)),
        "gldm": gldm_features(compute_gldm(roi, cfg.gldm_alpha)),
        "ngtdm": ngtdm_features(compute_ngtdm(roi)),
    }


def extract_all(image, mask, config: ExtractionConfig | None = None) -> dict[str, float]:
    """Every feature for one ROI, keyed by full name in dictionary order."""
    cfg = config or ExtractionConfig()
    image = as_image(image)
    mask = as_mask(mask, like=image)
    per_source: dict[str, dict[str, dict[str, float]]] = {}
    try:
        per_source["original"] = {"shape2d": shape2d_features(mask, cfg.spacing)}
        per_source["original"].update(_texture(image, mask, cfg))
    except RadExplainError as exc:
        raise type(exc)(f"original: {exc}") from exc

    try:
        bands = haar_decompose(image)
    except RadExplainError as exc:
        raise type(exc)(f"wavelet: {exc}") from exc
    sub_mask = subband_mask(mask)
    for band, coeffs in bands.items():
        source = f"wavelet{band}"
        try:
            per_source[source] = _texture(coeffs, sub_mask, cfg)
        except RadExplainError as exc:
            raise type(exc)(f"{source}: {exc}") from exc

    out = {}
    for desc in feature_descriptors():
        out[desc.name] = per_source[desc.source][desc.category][desc.base_name]
    return out


_BASE_NAMES: dict[str, list[str]] | None = None


def base_names() -> dict[str, list[str]]:
    """Base feature names per category, derived from a probe extraction."""
    global _BASE_NAMES
    if _BASE_NAMES is None:
        img = np.arange(16, dtype=np.float64).reshape(4, 4)
        mask = np.ones((4, 4), dtype=bool)
        cfg = ExtractionConfig(n_levels=4)
        found = {"shape2d": shape2d_features(mask)}
        found.update(_texture(img, mask, cfg))
        _BASE_NAMES = {cat: sorted(found[cat]) for cat in CATEGORIES}
    return _BASE_NAMES


def feature_descriptors() -> list[FeatureDescriptor]:
    """Ordered by category, then base name, then source."""
    out = []
    names = base_names()
    for category in CATEGORIES:
        sources = ("original",) if category == "shape2d" else SOURCES
        for base in names[category]:
            out.extend(FeatureDescriptor(base, category, src) for src in sources)
    return out


def feature_names() -> list[str]:
    return [d.name for d in feature_descriptors()]


def feature_dictionary_rows() -> list[dict[str, str]]:
    from .formulas import FORMULAS

    return [
        {"name": d.name, "category": d.category, "source": d.source,
         "base_name": d.base_name, "formula": FORMULAS[d.category][d.base_name]}
        for d in feature_descriptors()
    ]


def feature_dictionary_csv() -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["name", "category", "source", "base_name", "formula"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(feature_dictionary_rows())
    return buf.getvalue()


def shipped_feature_dictionary() -> str:
    return resources.files("radexplain.data").joinpath("feature_dictionary.csv").read_text("utf-8")
