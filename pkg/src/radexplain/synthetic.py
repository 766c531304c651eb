"""Seeded synthetic data: lesion images, planted-correlation tables, fixtures.

Used by the test-suite, the acceptance checks and the tutorials. Nothing
here pretends to be clinical data.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy import ndimage

from .imaging import save_png8
from .radiomics.extract import feature_names
from .tabular import FeatureMatrix, spearman, write_csv

# -- tabular -----------------------------------------------------------------


def separable_dataset(n: int = 200, p: int = 5, seed: int = 0, gap: float = 1.0) -> FeatureMatrix:
    """Balanced two-class data split by a hyperplane with an empty band.

    Labels follow the sign of ``x . w`` (``w`` a random unit vector); each
    class is then pushed ``gap / 2`` away from the plane along ``w``.
    """
    rng = np.random.default_rng(seed)
    w = rng.normal(size=p)
    w /= np.linalg.norm(w)
    X = rng.normal(size=(n, p))
    y = np.zeros(n, dtype=np.int64)
    y[: n // 2] = 1
    rng.shuffle(y)
    proj = X @ w
    # project onto the plane, then place each point on its class side
    X = X - np.outer(proj, w) + np.outer(np.where(y == 1, 1, -1) * (np.abs(proj) + gap / 2), w)
    ids = [f"s{i:03d}" for i in range(n)]
    return FeatureMatrix(ids, [f"x{j}" for j in range(p)], X, y, provenance=f"separable(seed={seed})")


def planted_dataset(n: int = 200, n_radiomic: int = 20, n_deep: int = 30, n_planted: int = 3,
                    seed: int = 0):
    """Radiomic and deep matrices with known monotone pairs.

    Deep columns ``0..n_planted-1`` are strictly increasing transforms of
    distinct radiomic columns; the others are independent noise. Radiomic
    columns carry real feature names so they can be grouped.

    Returns ``(radiomic, deep, planted)`` where ``planted`` lists
    ``(radiomic_name, deep_name)`` pairs.
    """
    rng = np.random.default_rng(seed)
    names = feature_names()
    r_names = [names[i] for i in rng.choice(len(names), size=n_radiomic, replace=False)]
    R = rng.normal(size=(n, n_radiomic))
    D = rng.normal(size=(n, n_deep))
    sources = rng.choice(n_radiomic, size=n_planted, replace=False)
    transforms = (np.exp, lambda v: v ** 3, lambda v: 2.5 * v + 7.0, np.arctan)
    planted = []
    for j, src in enumerate(sources):
        D[:, j] = transforms[j % len(transforms)](R[:, src])
        planted.append((r_names[src], f"deep_{j:03d}"))
    ids = [f"p{i:03d}" for i in range(n)]
    radiomic = FeatureMatrix(ids, r_names, R, provenance="planted radiomic")
    deep = FeatureMatrix(ids, [f"deep_{j:03d}" for j in range(n_deep)], D, provenance="planted deep")
    return radiomic, deep, planted


def _column_with_rho(ref: np.ndarray, target: float, rng, tol: float = 0.004) -> np.ndarray:
    """Noisy copy of ``ref`` whose Spearman rho with ``ref`` is within ``tol`` of ``target``."""
    ranks = np.argsort(np.argsort(ref)).astype(np.float64)
    for _ in range(100):
        noise = rng.normal(size=ref.size) * ranks.std()
        lo, hi = 0.0, 50.0
        for _ in range(80):
            mid = (lo + hi) / 2
            rho = spearman(ref, ranks + mid * noise)
            if abs(rho - target) <= tol:
                return ranks + mid * noise
            lo, hi = (mid, hi) if rho > target else (lo, mid)
    raise RuntimeError("could not reach the requested correlation")


# (rho, how many deep features) built against firstorder Energy
ENERGY_BANDS = ((0.47, 2), (0.42, 2), (0.37, 5), (0.32, 6))


def banded_dataset(n: int = 200, n_noise_deep: int = 40, seed: int = 0):
    """Radiomic/deep pair where one base feature has a staircase of counts.

    Radiomic columns cover five base features over all five sources.
    ``original_firstorder_Energy`` and ``original_firstorder_TotalEnergy``
    share ranks (TotalEnergy is a scaled copy); 15 deep features are built to
    correlate with them at the levels in :data:`ENERGY_BANDS`, giving signed
    counts 15/9/4/2 at M = 0.30/0.35/0.40/0.45 for each. The remaining
    columns are noise.
    """
    rng = np.random.default_rng(seed)
    bases = [("firstorder", "Energy"), ("firstorder", "TotalEnergy"), ("glszm", "SizeZoneNonUniformity"),
             ("gldm", "DependenceNonUniformity"), ("glrlm", "RunLengthNonUniformity")]
    sources = ("original", "waveletLL", "waveletLH", "waveletHL", "waveletHH")
    cols, names = [], []
    energy = rng.gamma(2.0, 1e5, size=n)
    for category, base in bases:
        for src in sources:
            names.append(f"{src}_{category}_{base}")
            if src == "original" and base == "Energy":
                cols.append(energy)
            elif src == "original" and base == "TotalEnergy":
                cols.append(0.25 * energy)
            else:
                cols.append(rng.gamma(2.0, 10.0, size=n))
    deep_cols = []
    for rho, count in ENERGY_BANDS:
        for _ in range(count):
            deep_cols.append(_column_with_rho(energy, rho, rng))
    for _ in range(n_noise_deep):
        deep_cols.append(rng.normal(size=n))
    ids = [f"f{i:03d}" for i in range(n)]
    radiomic = FeatureMatrix(ids, names, np.column_stack(cols), provenance="banded radiomic")
    deep = FeatureMatrix(ids, [f"cnn_{j:03d}" for j in range(len(deep_cols))], np.column_stack(deep_cols),
                         provenance="banded deep")
    return radiomic, deep


# -- images ------------------------------------------------------------------


def lesion_image(size: int, malignant: bool, rng) -> tuple[np.ndarray, np.ndarray]:
    """Ultrasound-like 8-bit patch with one hypoechoic lesion and its mask.

    Malignant lesions get an irregular (lobulated) border and more
    heterogeneous echotexture than benign ones.
    """
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    cy, cx = size / 2 + rng.uniform(-2, 2, size=2)
    a, b = rng.uniform(0.22, 0.34, size=2) * size
    theta = np.arctan2(yy - cy, xx - cx)
    lobes = rng.uniform(0.12, 0.22) * np.sin(rng.integers(4, 8) * theta + rng.uniform(0, 2 * np.pi)) \
        if malignant else 0.03 * np.sin(2 * theta)
    radius = np.sqrt(((yy - cy) / a) ** 2 + ((xx - cx) / b) ** 2)
    mask = radius <= 1.0 + lobes

    speckle = rng.gamma(4.0, 1.0 / 4.0, size=(size, size))
    background = 150 + 25 * ndimage.gaussian_filter(rng.normal(size=(size, size)), 3)
    lesion_level = rng.uniform(55, 85)
    texture = ndimage.gaussian_filter(rng.normal(size=(size, size)), 1.0 if malignant else 2.5)
    texture *= (40 if malignant else 12) / (texture.std() + 1e-12)
    img = np.where(mask, lesion_level + texture, background) * speckle
    img = ndimage.gaussian_filter(img, 0.7)
    return np.clip(img, 0, 255).round().astype(np.uint8), mask


def write_lesion_fixture(directory, n: int = 40, size: int = 48, seed: int = 0, n_deep_noise: int = 12) -> Path:
    """Write a small dataset: PNG images/masks, manifest, deep features, config.

    Deep features are computed straight from the pixels (not from the
    radiomic extractor): a few monotone functions of lesion statistics plus
    pure noise columns.
    """
    directory = Path(directory)
    (directory / "images").mkdir(parents=True, exist_ok=True)
    (directory / "masks").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    labels = np.array([i % 2 for i in range(n)])
    rows, deep = [], []
    for i in range(n):
        sid = f"case{i:03d}"
        img, mask = lesion_image(size, bool(labels[i]), rng)
        save_png8(directory / "images" / f"{sid}.png", img)
        save_png8(directory / "masks" / f"{sid}.png", mask.astype(np.uint8) * 255)
        rows.append([sid, f"images/{sid}.png", f"masks/{sid}.png", "malignant" if labels[i] else "benign"])
        x = img[mask].astype(np.float64)
        stats = [np.log1p((x ** 2).sum()), np.sqrt(mask.sum()), np.tanh(x.std() / 20.0), x.mean() ** 0.5]
        deep.append(stats + list(rng.normal(size=n_deep_noise)))
    with open(directory / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sample_id", "image_path", "mask_path", "label"])
        w.writerows(rows)
    deep_m = FeatureMatrix([r[0] for r in rows], [f"deep_{j:03d}" for j in range(len(deep[0]))], np.array(deep))
    write_csv(deep_m, directory / "deep_features.csv")
    (directory / "config.ini").write_text(FIXTURE_CONFIG, encoding="utf-8")
    return directory


FIXTURE_CONFIG = """\
; small protocol so the end-to-end fixture runs in seconds
[extract]
n_levels = 64

[cv]
k = 5
repeats = 2
seed = 7

[rf]
n_estimators = 25
seed = 7

[sfs]
k_max = 3
patience = 2
"""
