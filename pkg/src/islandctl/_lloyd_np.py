"""Pure-numpy Lloyd-iteration kernels (fallback for the compiled extension).

Semantics match ``_lloyd_cy``: nearest center by squared Euclidean distance with
ties broken toward the lowest center index, centers updated to cluster means.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def assign_labels(points: np.ndarray, centers: np.ndarray,
                  labels: np.ndarray, dists: np.ndarray) -> None:
    """Fill ``labels`` with each point's nearest center and ``dists`` with the
    squared distance to it."""
    diff = points[:, None, :] - centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diff, diff)
    np.argmin(d2, axis=1, out=labels)
    dists[:] = d2[np.arange(points.shape[0]), labels]


def update_centers(points: np.ndarray, labels: np.ndarray, k: int,
                   centers: np.ndarray, counts: np.ndarray) -> None:
    """Set each center to the mean of its assigned points; empty clusters keep
    their previous center (``counts`` reports sizes)."""
    counts[:] = np.bincount(labels, minlength=k)
    sums = np.zeros_like(centers)
    np.add.at(sums, labels, points)
    nonempty = counts > 0
    centers[nonempty] = sums[nonempty] / counts[nonempty, None]


def objective(points: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    """Within-groups sum of squared errors at the given assignment/centers."""
    diff = points - centers[labels]
    return float(np.einsum("nd,nd->", diff, diff))
