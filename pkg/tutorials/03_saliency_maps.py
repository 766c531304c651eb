"""Rebuilding CAM saliency maps from exported tensors.

Activations normally come from a network; here a stack is made from two
spatial patterns so the expected maps are known in advance.
"""
import tempfile
from pathlib import Path

import numpy as np

from radexplain.cam import eigen_cam, grad_cam, map_discrepancy, read_atns, score_cam, write_atns

yy, xx = np.mgrid[0:16, 0:16]
blob = np.exp(-((yy - 5) ** 2 + (xx - 10) ** 2) / 8.0)
edge = (xx < 4).astype(float)
activations = np.stack([3 * blob, 0.5 * blob + 0.2 * edge, edge])

# Gradients that favour the blob channels, and Score-CAM weights from elsewhere.
gradients = np.stack([np.full((16, 16), 0.4), np.full((16, 16), 0.1), np.full((16, 16), -0.3)])
weights = np.array([0.8, 0.15, 0.05])

maps = {
    "grad": grad_cam(activations, gradients),
    "score": score_cam(activations, weights),
    "eigen": eigen_cam(activations),
}
for name, m in maps.items():
    r, c = np.unravel_index(np.argmax(m), m.shape)
    print(f"{name:5s} peak at ({r}, {c}), mean {m.mean():.3f}")

# How much do the methods agree?
for a, b in (("grad", "score"), ("grad", "eigen"), ("score", "eigen")):
    d = map_discrepancy(maps[a], maps[b], q=0.1)
    print(f"{a} vs {b}: pearson {d['pearson']:.3f}, top-10% jaccard {d['top_q_jaccard']:.3f}")

# Tensors travel as float32 in a small binary format; this is what `radexplain cam` reads.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "activations.atns"
    write_atns(path, activations)
    assert np.array_equal(read_atns(path), activations.astype(np.float32))
    print("wrote and re-read", path.name, read_atns(path).shape)
