"""Deterministic seeded k-means with restarts over embedding rows.

Initialization is k-means++ driven by a counter-based generator (Philox) keyed
by ``seed + restart_index``, so restarts are independent and reproducible
regardless of execution order. The Lloyd iteration runs on a compiled kernel
when the extension is available, with a numpy fallback selected at import
(``ISLANDCTL_PURE_PYTHON=1`` forces the fallback).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _lloyd_np
from .errors import UsageError, ValidationError
from .spectral import Partition

if os.environ.get("ISLANDCTL_PURE_PYTHON"):
    _kernel = _lloyd_np
else:
    try:
        from . import _lloyd_cy as _kernel  # type: ignore[no-redef]
    except ImportError:
        _kernel = _lloyd_np

_MASK64 = (1 << 64) - 1


def lloyd_backend() -> str:
    """Name of the kernel selected at import ("cython" or "numpy")."""
    return _kernel.BACKEND


@dataclass(frozen=True)
class KMeansConfig:
    seed: int = 0
    restarts: int = 20
    max_iters: int = 300
    tolerance: float = 0.0  # 0 -> exact assignment-fixpoint convergence

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tolerance < 0:
            raise ValidationError("tolerance must be nonnegative")


@dataclass(frozen=True)
class ClusterResult:
    assignment: Partition
    centers: np.ndarray
    wgss: float
    restart_index: int
    iterations: int


IterationHook = Callable[[int, int, float], None]


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: first center uniform, then distance^2-weighted draws."""
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            # all remaining points coincide with chosen centers; take first unused row
            centers[c] = points[np.argmax(d2)]
        else:
            centers[c] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _repair_empty(points, centers, labels, dists, counts, kernel) -> bool:
    """Reseed each empty center at the point currently farthest from its own
    center (deterministic: first argmax); returns True if anything changed."""
    k = centers.shape[0]
    changed = False
    taken: list[int] = []
    for c in range(k):
        if counts[c] > 0:
            continue
        if taken:
            dists[taken] = -1.0
        far = int(np.argmax(dists))
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] = 1
        centers[c] = points[far]
        dists[far] = 0.0
        taken.append(far)
        changed = True
    return changed


def _single_run(points, k, rng, max_iters, tolerance, hook, restart, kernel):
    n = points.shape[0]
    centers = _kmeanspp_init(points, k, rng)
    labels = np.empty(n, dtype=np.intp)
    prev = np.full(n, -1, dtype=np.intp)
    dists = np.empty(n)
    counts = np.empty(k, dtype=np.intp)
    iterations = 0
    for it in range(max_iters):
        iterations = it + 1
        kernel.assign_labels(points, centers, labels, dists)
        kernel.update_centers(points, labels, k, centers, counts)
        for _ in range(k):  # repair may empty a singleton donor; bounded re-runs
            if not (counts == 0).any():
                break
            if not _repair_empty(points, centers, labels, dists, counts, kernel):
                break
            kernel.update_centers(points, labels, k, centers, counts)
        obj = kernel.objective(points, centers, labels)
        if hook is not None:
            hook(restart, it, obj)
        if np.array_equal(labels, prev):
            break
        if tolerance > 0.0 and it > 0:
            shift = np.abs(centers - prev_centers).max()
            if shift <= tolerance:
                break
        prev[:] = labels
        prev_centers = centers.copy()
    return labels, centers, float(kernel.objective(points, centers, labels)), iterations


def kmeans(
    points: np.ndarray,
    k: int,
    cfg: KMeansConfig,
    iteration_hook: IterationHook | None = None,
    backend: str | None = None,
) -> ClusterResult:
    """Best-of-restarts k-means; ties by lowest restart index.

    ``backend`` overrides the import-time kernel selection ("cython"/"numpy"),
    mainly for the benchmark.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise UsageError(f"points must be 2-D, got shape {points.shape}")
    if not np.isfinite(points).all():
        raise ValidationError("points contain non-finite values")
    distinct = np.unique(points, axis=0).shape[0]
    if k > distinct:
        raise UsageError(f"k={k} exceeds the number of distinct rows ({distinct})")
    if k < 1:
        raise UsageError("k must be >= 1")

    if backend is None:
        kernel = _kernel
    elif backend == "numpy":
        kernel = _lloyd_np
    elif backend == "cython":
        from . import _lloyd_cy  # raises ImportError if the extension is absent

        kernel = _lloyd_cy
    else:
        raise UsageError(f"unknown kmeans backend {backend!r}")

    best: tuple[float, int] | None = None
    best_run = None
    for r in range(cfg.restarts):
        rng = np.random.Generator(np.random.Philox(key=(cfg.seed + r) & _MASK64))
        labels, centers, obj, iters = _single_run(
            points, k, rng, cfg.max_iters, cfg.tolerance, iteration_hook, r, kernel
        )
        if best is None or obj < best[0]:
            best = (obj, r)
            best_run = (labels, centers, obj, iters)
    labels, centers, obj, iters = best_run
    return ClusterResult(
        assignment=Partition(labels=tuple(int(l) for l in labels), k=k),
        centers=centers,
        wgss=obj,
        restart_index=best[1],
        iterations=iters,
    )


def wgss(points: np.ndarray, result: ClusterResult) -> float:
    """Recompute the objective independently of the solver kernels."""
    points = np.asarray(points, dtype=np.float64)
    labels = np.asarray(result.assignment.labels)
    if points.shape[0] != labels.shape[0] or points.shape[1] != result.centers.shape[1]:
        raise ValidationError(
            f"shape mismatch: points {points.shape}, labels {labels.shape}, "
            f"centers {result.centers.shape}"
        )
    total = 0.0
    for i in range(points.shape[0]):
        diff = points[i] - result.centers[labels[i]]
        total += float(diff @ diff)
    return total
