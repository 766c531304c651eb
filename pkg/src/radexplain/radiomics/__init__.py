"""Radiomic feature extraction: texture matrices, feature formulas, driver."""
from .extract import (
    CATEGORIES,
    SOURCES,
    ExtractionConfig,
    FeatureDescriptor,
    extract_all,
    feature_descriptors,
    feature_dictionary_csv,
    feature_names,
    parse_feature_name,
    subband_mask,
)
from .firstorder import first_order_features
from .matrices import (
    Glcm,
    Gldm,
    Glrlm,
    Glszm,
    Ngtdm,
    compute_glcm,
    compute_gldm,
    compute_glrlm,
    compute_glszm,
    compute_ngtdm,
)
from .shape import shape2d_features
from .texture import glcm_features, gldm_features, glrlm_features, glszm_features, ngtdm_features

__all__ = [
    "CATEGORIES", "SOURCES", "ExtractionConfig", "FeatureDescriptor", "extract_all", "feature_descriptors",
    "feature_dictionary_csv", "feature_names", "parse_feature_name", "subband_mask", "first_order_features",
    "Glcm", "Gldm", "Glrlm", "Glszm", "Ngtdm", "compute_glcm", "compute_gldm", "compute_glrlm", "compute_glszm",
    "compute_ngtdm", "shape2d_features", "glcm_features", "gldm_features", "glrlm_features", "glszm_features",
    "ngtdm_features",
]
