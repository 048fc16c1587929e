"""Cut metrics, normalized Laplacian and the k-dimensional spectral embedding.

The random-walk normalized Laplacian L_N = I - A^-1 W is non-symmetric; its
eigenpairs are computed through the similar symmetric problem
(I - A^-1/2 W A^-1/2) u = lambda u and transformed back with v = A^-1/2 u,
which shares the spectrum and is numerically robust.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import EigensolverError, UsageError, ValidationError
from .model import BusIndex
from .weights import DegreeMatrix, WeightedGraph

#: residual bound ||L_N v - lambda v||_inf accepted per eigenpair
RESIDUAL_TOL = 1e-8
#: allowed negative slack on eigenvalues of a PSD operator
EIGENVALUE_SLACK = 1e-10
#: above this many buses the embedding switches to an iterative sparse solver
DENSE_CUTOFF = 2000


@dataclass(frozen=True)
class Partition:
    """Assignment of every bus index to one of k nonempty clusters."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("partition needs k >= 1")
        present = set(self.labels)
        if not present <= set(range(self.k)):
            raise ValidationError(f"labels outside 0..{self.k - 1}")
        if len(present) != self.k:
            empty = sorted(set(range(self.k)) - present)
            raise ValidationError(f"empty clusters {empty}")

    def islands(self, index: BusIndex) -> list[set[int]]:
        """Bus-id sets per cluster, ordered by cluster label."""
        out: list[set[int]] = [set() for _ in range(self.k)]
        for i, lab in enumerate(self.labels):
            out[lab].add(index.id_of(i))
        return out

    def relabeled_by_min_bus(self, index: BusIndex) -> "Partition":
        """Deterministic canonical labeling: clusters ordered by smallest bus id."""
        islands = self.islands(index)
        order = sorted(range(self.k), key=lambda c: min(islands[c]))
        remap = {old: new for new, old in enumerate(order)}
        return Partition(labels=tuple(remap[l] for l in self.labels), k=self.k)


def cut_value(g: WeightedGraph, s: set[int], t: set[int]) -> float:
    """Sum of weights over ordered bus pairs (i in s, j in t); s, t disjoint."""
    overlap = s & t
    if overlap:
        raise ValidationError(f"cut sets overlap on buses {sorted(overlap)}")
    total = 0.0
    small, other = (s, t) if len(s) <= len(t) else (t, s)
    for (a, b), edge in g.edges.items():
        if (a in small and b in other) or (b in small and a in other):
            total += edge.weight
    return total


def total_cut(g: WeightedGraph, p: Partition) -> float:
    """Half the summed pairwise cluster cuts == each crossing edge counted once."""
    labels = {g.index.id_of(i): lab for i, lab in enumerate(p.labels)}
    return sum(e.weight for (a, b), e in g.edges.items() if labels[a] != labels[b])


def ncut_value(g: WeightedGraph, a: DegreeMatrix, p: Partition) -> float:
    """Sum over clusters of cut(V_s, complement) / vol(V_s)."""
    labels = np.asarray(p.labels)
    cuts = np.zeros(p.k)
    for (u, v), edge in g.edges.items():
        lu = p.labels[g.index.index_of(u)]
        lv = p.labels[g.index.index_of(v)]
        if lu != lv:
            cuts[lu] += edge.weight
            cuts[lv] += edge.weight
    total = 0.0
    for c in range(p.k):
        vol = a.a[labels == c].sum()
        if vol <= 0:
            raise ValidationError(f"cluster {c} has zero volume")
        total += cuts[c] / vol
    return float(total)


def normalized_laplacian(g: WeightedGraph, a: DegreeMatrix) -> np.ndarray:
    """Dense L_N = I - A^-1 W; rows sum to zero."""
    w = g.to_dense()
    return np.eye(g.n) - w / a.a[:, None]


@dataclass(frozen=True)
class SpectralEmbedding:
    """Eigenvectors of L_N for the k smallest eigenvalues.

    ``m`` columns are unit-norm with the largest-magnitude entry positive;
    ``column_scales`` are the pre-normalization column norms of A^-1/2 U, kept so
    the row-normalized clustering variant can be derived exactly.
    """

    m: np.ndarray
    eigenvalues: np.ndarray
    column_scales: np.ndarray

    def __post_init__(self):
        ev = self.eigenvalues
        if np.any(np.diff(ev) < -1e-12):
            raise EigensolverError("eigenvalues not ascending")
        if np.any(ev < -EIGENVALUE_SLACK):
            raise EigensolverError(f"negative eigenvalue {ev.min():.3e}")

    @property
    def k(self) -> int:
        return self.m.shape[1]

    def clustering_rows(self, row_normalize: bool) -> np.ndarray:
        """Rows handed to k-means: raw eigenvector rows, or unit-normalized rows.

        Row normalization cancels the per-row A^-1/2 factor, so the normalized
        rows coincide for the random-walk and symmetric eigenvector conventions.
        """
        if not row_normalize:
            return self.m.copy()
        raw = self.m * self.column_scales[None, :]
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        return raw / norms


def spectral_embedding(
    g: WeightedGraph,
    a: DegreeMatrix,
    k: int,
    dense_cutoff: int = DENSE_CUTOFF,
) -> SpectralEmbedding:
    """Solve the symmetric eigenproblem and return the k smallest pairs as
    random-walk eigenvectors (deterministic column signs, validated residuals)."""
    n = g.n
    if not 2 <= k <= n:
        raise UsageError(f"k must be in [2, {n}], got {k}")
    d = 1.0 / np.sqrt(a.a)
    w_sparse = None
    if n <= dense_cutoff:
        w = g.to_dense()
        sym = np.eye(n) - (d[:, None] * w * d[None, :])
        sym = 0.5 * (sym + sym.T)
        try:
            evals, u = scipy.linalg.eigh(sym, subset_by_index=(0, k - 1))
        except scipy.linalg.LinAlgError as exc:
            raise EigensolverError(f"dense eigensolver failed: {exc}") from exc
    else:
        rows, cols, vals = [], [], []
        for (bi, bj), edge in g.edges.items():
            i = g.index.index_of(bi)
            j = g.index.index_of(bj)
            rows += [i, j]
            cols += [j, i]
            vals += [edge.weight, edge.weight]
        w_sparse = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        sym = scipy.sparse.eye(n, format="csr") - scipy.sparse.diags(d) @ w_sparse @ scipy.sparse.diags(d)
        try:
            evals, u = scipy.sparse.linalg.eigsh(sym, k=k, which="SA", tol=0)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise EigensolverError(f"iterative eigensolver did not converge: {exc}") from exc
        order = np.argsort(evals)
        evals, u = evals[order], u[:, order]

    raw = d[:, None] * u  # random-walk eigenvectors, one per column
    scales = np.linalg.norm(raw, axis=0)
    m = raw / scales[None, :]
    for c in range(k):
        lead = np.argmax(np.abs(m[:, c]))
        if m[lead, c] < 0:
            m[:, c] = -m[:, c]

    evals = np.where(np.abs(evals) < EIGENVALUE_SLACK, np.maximum(evals, 0.0), evals)
    wm = w @ m if w_sparse is None else w_sparse @ m
    residual = np.abs(m - wm / a.a[:, None] - m * evals[None, :]).max()
    if residual > RESIDUAL_TOL:
        raise EigensolverError(f"eigenpair residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}")
    return SpectralEmbedding(m=m, eigenvalues=evals, column_scales=scales)
