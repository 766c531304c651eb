"""Pipeline configuration read from an INI-style key/value file.

Example (all values shown are the defaults)::

    [extract]
    n_levels = 255          ; gray levels for texture discretization
    spacing = 1.0           ; mm per pixel edge
    gldm_alpha = 0

    [preprocess]
    nzv_cutoff = 0.005      ; variance cutoff on min-max scaled features
    prune_threshold = 0.9   ; |Spearman rho| above which one feature is dropped

    [explain]
    thresholds = 0.30, 0.35, 0.40, 0.45
    mode = signed           ; signed (rho >= M) or absolute (|rho| >= M)
    trend_points = 101

    [cv]
    k = 10
    repeats = 20
    seed = 0

    [rf]
    n_estimators = 100
    seed = 0

    [sfs]
    k_max = 10
    patience = 2

    [cam]
    q = 0.2                 ; top fraction for the Jaccard overlap
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import InputError
from .learn import ForestParams
from .radiomics.extract import ExtractionConfig
from .tabular import CvScheme
from .xaicorr import DEFAULT_THRESHOLDS, MODES


@dataclass(frozen=True)
class PipelineConfig:
    n_levels: int = 255
    spacing: float = 1.0
    gldm_alpha: int = 0
    nzv_cutoff: float = 0.005
    prune_threshold: float = 0.9
    thresholds: tuple = DEFAULT_THRESHOLDS
    mode: str = "signed"
    trend_points: int = 101
    cv_k: int = 10
    cv_repeats: int = 20
    cv_seed: int = 0
    rf_n_estimators: int = 100
    rf_seed: int = 0
    sfs_k_max: int = 10
    sfs_patience: int = 2
    cam_q: float = 0.2
    source: str = field(default="", compare=False)

    @property
    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(n_levels=self.n_levels, spacing=self.spacing, gldm_alpha=self.gldm_alpha)

    @property
    def cv(self) -> CvScheme:
        return CvScheme(k=self.cv_k, repeats=self.cv_repeats, seed=self.cv_seed)

    @property
    def rf(self) -> ForestParams:
        return ForestParams(n_estimators=self.rf_n_estimators, seed=self.rf_seed)

    def with_seed(self, seed: int) -> "PipelineConfig":
        return replace(self, cv_seed=seed, rf_seed=seed)


# (section, key) -> dataclass field
_KEYS = {
    ("extract", "n_levels"): "n_levels",
    ("extract", "spacing"): "spacing",
    ("extract", "gldm_alpha"): "gldm_alpha",
    ("preprocess", "nzv_cutoff"): "nzv_cutoff",
    ("preprocess", "prune_threshold"): "prune_threshold",
    ("explain", "thresholds"): "thresholds",
    ("explain", "mode"): "mode",
    ("explain", "trend_points"): "trend_points",
    ("cv", "k"): "cv_k",
    ("cv", "repeats"): "cv_repeats",
    ("cv", "seed"): "cv_seed",
    ("rf", "n_estimators"): "rf_n_estimators",
    ("rf", "seed"): "rf_seed",
    ("sfs", "k_max"): "sfs_k_max",
    ("sfs", "patience"): "sfs_patience",
    ("cam", "q"): "cam_q",
}


def _convert(name: str, raw: str):
    default = getattr(PipelineConfig, name)
    try:
        if name == "thresholds":
            return tuple(float(x) for x in raw.replace(";", ",").split(",") if x.strip())
        if name == "mode":
            if raw not in MODES:
                raise ValueError(f"mode must be one of {MODES}")
            return raw
        if isinstance(default, int):
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise InputError(f"config value for {name!r}: {exc}") from None


def load_config(path=None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise InputError(f"{path}: config file not found") from None
    except configparser.Error as exc:
        raise InputError(f"{path}: {exc}") from None
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            try:
                name = _KEYS[(section, key)]
            except KeyError:
                raise InputError(f"{path}: unknown config key [{section}] {key}") from None
            values[name] = _convert(name, raw.strip())
    return PipelineConfig(**values, source=Path(path).name)


def config_fields() -> list[str]:
    return [f.name for f in fields(PipelineConfig) if f.name != "source"]
