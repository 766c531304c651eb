"""Class activation maps rebuilt from exported network tensors.

Nothing here runs a network: activations, gradients and Score-CAM channel
weights are produced elsewhere and read from disk. Every map is passed
through ReLU (or a clamp) and divided by its maximum, so outputs lie in
[0, 1] with a maximum of exactly 1 unless the map is all zero.
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .errors import InputError, LengthMismatch, ShapeMismatch
from .imaging import bilinear_resize, save_png8

ATNS_MAGIC = b"ATNS"
ATNS_VERSION = 1
_HEADER = struct.Struct("<4sHIII")


def _stack(a, name="activations") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 2:
        a = a[None]
    if a.ndim != 3 or a.shape[0] < 1:
        raise ShapeMismatch(f"{name} must be K x H x W with K >= 1, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} contain non-finite values")
    return a


def max_normalize(raw: np.ndarray) -> np.ndarray:
    raw = np.maximum(raw, 0.0)
    peak = raw.max()
    if peak <= 0:
        return np.zeros_like(raw)
    return raw / peak


def grad_cam(activations, gradients) -> np.ndarray:
    A = _stack(activations)
    G = _stack(gradients, "gradients")
    if A.shape != G.shape:
        raise ShapeMismatch(f"activation shape {A.shape} != gradient shape {G.shape}")
    alpha = G.mean(axis=(1, 2))
    return max_normalize(np.tensordot(alpha, A, axes=1))


def score_cam(activations, weights, softmax: bool = False) -> np.ndarray:
    """Weighted activation sum with ingested channel weights.

    ``softmax=True`` passes the weights through a softmax first, as the
    original Score-CAM formulation does; by default they are used as given.
    """
    A = _stack(activations)
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size != A.shape[0]:
        raise LengthMismatch(f"{w.size} weights for {A.shape[0]} activation maps")
    if softmax:
        e = np.exp(w - w.max())
        w = e / e.sum()
    return max_normalize(np.tensordot(w, A, axes=1))


def eigen_cam(activations) -> np.ndarray:
    """Projection of the activations on their first principal direction.

    The (H*W) x K activation matrix is factorized by SVD and the map is the
    first left singular vector scaled by its singular value. The arbitrary
    SVD sign is fixed so the map sums to a non-negative value; negative
    remainders are clamped to zero.
    """
    A = _stack(activations)
    k, h, w = A.shape
    O = A.reshape(k, h * w).T
    if not O.any():
        return np.zeros((h, w))
    u, s, _ = np.linalg.svd(O, full_matrices=False)
    proj = u[:, 0] * s[0]
    if proj.sum() < 0:
        proj = -proj
    return max_normalize(proj.reshape(h, w))


def upsample_bilinear(saliency, height: int, width: int) -> np.ndarray:
    """Corner-aligned bilinear resize, then re-normalized by the maximum."""
    out = bilinear_resize(np.asarray(saliency, dtype=np.float64), height, width)
    return max_normalize(out)


def _top_set(flat: np.ndarray, n_top: int) -> set:
    order = np.lexsort((np.arange(flat.size), -flat))  # value desc, index asc
    return set(order[:n_top].tolist())


def map_discrepancy(a, b, q: float = 0.2) -> dict:
    """Pearson correlation and top-``q`` Jaccard overlap of two maps.

    Pearson is NaN when either map is constant. The top set holds the
    ``ceil(q * H * W)`` highest pixels, ties resolved by row-major index.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeMismatch(f"map shapes differ: {a.shape} vs {b.shape}")
    if not 0 < q <= 1:
        raise InputError("q must lie in (0, 1]")
    fa, fb = a.ravel(), b.ravel()
    da, db = fa - fa.mean(), fb - fb.mean()
    den = math.sqrt(float((da * da).sum()) * float((db * db).sum()))
    pearson = float((da * db).sum() / den) if den > 0 else float("nan")
    n_top = math.ceil(round(q * fa.size, 9))
    ta, tb = _top_set(fa, n_top), _top_set(fb, n_top)
    return {"pearson": pearson, "top_q_jaccard": len(ta & tb) / len(ta | tb), "q": q, "n_top": n_top}


# -- file formats ----------------------------------------------------------

def write_atns(path, stack) -> None:
    """Write a K x H x W stack as little-endian float32 in the ATNS container."""
    arr = np.asarray(stack, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    k, h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(ATNS_MAGIC, ATNS_VERSION, k, h, w))
        fh.write(arr.astype("<f4").tobytes(order="C"))


def read_atns(path) -> np.ndarray:
    try:
        data = Path(path).read_bytes()
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    if len(data) < _HEADER.size:
        raise InputError(f"{path}: truncated ATNS header")
    magic, version, k, h, w = _HEADER.unpack_from(data)
    if magic != ATNS_MAGIC:
        raise InputError(f"{path}: bad magic {magic!r}")
    if version != ATNS_VERSION:
        raise InputError(f"{path}: unsupported ATNS version {version}")
    n = k * h * w
    if len(data) != _HEADER.size + 4 * n:
        raise InputError(f"{path}: expected {n} float32 values")
    return np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(k, h, w).astype(np.float64)


def read_weights(path) -> np.ndarray:
    """One weight per line (CSV with a single column, no header)."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except FileNotFoundError:
        raise InputError(f"{path}: file not found") from None
    try:
        return np.array([float(x.strip().rstrip(",")) for x in lines if x.strip()], dtype=np.float64)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def export_saliency(saliency, png_path, sidecar_path) -> None:
    """8-bit PNG (value * 255, rounded) plus the float32 map as a K=1 ATNS file."""
    sal = np.asarray(saliency, dtype=np.float64)
    save_png8(png_path, np.rint(sal * 255))
    write_atns(sidecar_path, sal[None])
