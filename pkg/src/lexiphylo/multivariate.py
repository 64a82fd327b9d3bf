"""Standardization, correlation-matrix PCA, and k-means over PC scores.

The PCA eigendecomposition uses cyclic Jacobi rotations on the 6x6 sample
correlation matrix rather than an iterative black-box solver: the problem
is tiny and the rotations give bitwise-reproducible eigenpairs. Variables
on incommensurate scales (counts, proportions, statistics) make
correlation PCA the right default; covariance PCA would let the largest
count dominate.

k-means uses k-means++ seeding with independent restarts on Philox streams
``(seed, restart)``; the best (lowest-WCSS) restart wins, ties going to the
lowest restart index, so the result is independent of execution order.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._rng import stream
from .metrics import FeatureTable

DEFAULT_RESTARTS = 25
MAX_LLOYD_ITERATIONS = 100
JACOBI_TOL = 1e-12
LOW_STRUCTURE_SILHOUETTE = 0.5


class ZeroVarianceWarning(UserWarning):
    """A feature column had no variance and was zeroed before PCA."""


class LowStructureWarning(UserWarning):
    """Best silhouette over the k range indicates weak cluster structure."""


@dataclass(frozen=True)
class PcaResult:
    """Eigenpairs of the correlation matrix plus scores and contributions.

    ``loadings`` holds orthonormal eigenvector columns; ``scores`` is the
    standardized data projected onto them; ``contributions[v, k]`` is the
    percentage of dimension k carried by variable v (squared loadings,
    columns summing to 100).
    """

    eigenvalues: np.ndarray
    loadings: np.ndarray
    scores: np.ndarray
    contributions: np.ndarray
    explained_variance: np.ndarray
    variables: tuple[str, ...]
    row_labels: tuple[str, ...]


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    centroids: np.ndarray
    wcss: float
    k: int
    seed: int
    n_restarts: int


def standardize(table: FeatureTable) -> FeatureTable:
    """Z-score every column (sample standard deviation, ddof=1).

    Zero-variance columns become all zeros with a ZeroVarianceWarning.
    Idempotent: standardizing a standardized table changes nothing.
    """
    if len(table.row_labels) < 3:
        raise ValueError("need >= 3 rows to standardize")
    x = np.asarray(table.values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("feature table contains non-finite cells")
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1)
    out = np.zeros_like(x)
    for j, sd in enumerate(stds):
        if sd == 0.0:
            warnings.warn(
                f"column {table.columns[j]!r} has zero variance; set to zeros",
                ZeroVarianceWarning,
                stacklevel=2,
            )
        else:
            out[:, j] = (x[:, j] - means[j]) / sd
    return FeatureTable(table.row_labels, table.columns, out, standardized=True)


def _jacobi_eigh(a: np.ndarray, tol: float = JACOBI_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps all (p, q) pairs, rotating away each off-diagonal element, until
    the largest off-diagonal magnitude drops below ``tol``. Returns
    (eigenvalues, eigenvector columns), unsorted.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    for _sweep in range(100):
        off = np.max(np.abs(a - np.diag(np.diag(a))))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * 1e-3:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    else:
        raise RuntimeError("Jacobi iteration failed to converge")
    return np.diag(a).copy(), v


def pca(table: FeatureTable) -> PcaResult:
    """Correlation-matrix PCA of a standardized feature table.

    Eigenpairs are sorted by descending eigenvalue (stable on ties); tiny
    negative eigenvalues from roundoff are clamped to zero. Axis sign
    orientation is left to the ranking stage.
    """
    if not table.standardized:
        raise ValueError("pca requires a standardized table")
    x = np.asarray(table.values, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("feature table contains non-finite cells")
    n_rows, n_cols = x.shape
    if n_rows < 3:
        raise ValueError("need >= 3 rows for PCA")

    corr = x.T @ x / (n_rows - 1)
    # Exact unit diagonal for non-degenerate columns keeps the trace at n_cols.
    for j in range(n_cols):
        if corr[j, j] != 0.0:
            corr[j, j] = 1.0
    corr = (corr + corr.T) / 2.0

    eigenvalues, vectors = _jacobi_eigh(corr)
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = np.maximum(eigenvalues[order], 0.0)
    loadings = vectors[:, order]

    scores = x @ loadings
    col_norms = np.sum(loadings * loadings, axis=0)
    contributions = 100.0 * (loadings * loadings) / col_norms
    total = eigenvalues.sum()
    explained = eigenvalues / total if total > 0 else np.zeros_like(eigenvalues)
    return PcaResult(
        eigenvalues=eigenvalues,
        loadings=loadings,
        scores=scores,
        contributions=contributions,
        explained_variance=explained,
        variables=table.columns,
        row_labels=table.row_labels,
    )


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(x)
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total == 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centers[j] = x[idx]
        d2 = np.minimum(d2, np.sum((x - centers[j]) ** 2, axis=1))
    return centers


def _lloyd(
    x: np.ndarray, centers: np.ndarray, k: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd iterations until assignments stabilize or the iteration cap."""
    labels = np.full(len(x), -1)
    previous_wcss = np.inf
    for _ in range(MAX_LLOYD_ITERATIONS):
        d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)  # ties go to the lowest index
        # Re-home any empty cluster to the point farthest from its centroid.
        point_d2 = d2[np.arange(len(x)), new_labels]
        for j in range(k):
            if not np.any(new_labels == j):
                idx = int(np.argmax(point_d2))
                new_labels[idx] = j
                point_d2[idx] = 0.0
        wcss = 0.0
        for j in range(k):
            members = x[new_labels == j]
            centers[j] = members.mean(axis=0)
            wcss += float(np.sum((members - centers[j]) ** 2))
        if wcss > previous_wcss + 1e-9 * max(1.0, previous_wcss):
            raise AssertionError("k-means WCSS increased across an iteration")
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        previous_wcss = wcss
    # Final WCSS against the updated centroids.
    d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    wcss = float(np.sum(d2[np.arange(len(x)), labels]))
    return labels, centers, wcss


def kmeans(
    scores: np.ndarray,
    k: int,
    seed: int,
    n_restarts: int = DEFAULT_RESTARTS,
) -> ClusterAssignment:
    """Best-of-``n_restarts`` k-means on the given score matrix."""
    x = np.asarray(scores, dtype=float)
    if x.ndim != 2:
        raise ValueError("scores must be a 2-D matrix")
    n = len(x)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k ({k}) exceeds the number of rows ({n})")
    if n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")

    best: tuple[float, int, np.ndarray, np.ndarray] | None = None
    for restart in range(n_restarts):
        rng = stream(seed, restart)
        centers = _kmeans_pp_init(x, k, rng)
        labels, centers, wcss = _lloyd(x, centers.copy(), k)
        if best is None or wcss < best[0]:
            best = (wcss, restart, labels, centers)
    assert best is not None
    wcss, _restart, labels, centers = best
    return ClusterAssignment(
        labels=labels, centroids=centers, wcss=wcss, k=k, seed=seed, n_restarts=n_restarts
    )


def silhouette_score(x: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette coefficient; points in singleton clusters score 0."""
    x = np.asarray(x, dtype=float)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise ValueError("silhouette needs >= 2 clusters")
    dist = np.sqrt(np.sum((x[:, None, :] - x[None, :, :]) ** 2, axis=2))
    values = np.zeros(len(x))
    for i in range(len(x)):
        own = labels == labels[i]
        n_own = int(own.sum())
        if n_own <= 1:
            continue
        a = dist[i, own].sum() / (n_own - 1)
        b = min(
            float(dist[i, labels == other].mean())
            for other in clusters
            if other != labels[i]
        )
        denom = max(a, b)
        values[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(values.mean())


def choose_k(
    scores: np.ndarray,
    k_range: range | list[int],
    seed: int,
    n_restarts: int = DEFAULT_RESTARTS,
) -> int:
    """Pick the k in ``k_range`` maximizing mean silhouette (ties -> smaller k).

    Emits LowStructureWarning when even the best k clusters weakly
    (mean silhouette below ``LOW_STRUCTURE_SILHOUETTE``).
    """
    x = np.asarray(scores, dtype=float)
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("empty k range")
    if ks[0] < 2 or ks[-1] > len(x) - 1:
        raise ValueError(f"k range must lie within [2, {len(x) - 1}]")

    best_k = None
    best_sil = -np.inf
    for k in ks:
        assignment = kmeans(x, k, seed=seed, n_restarts=n_restarts)
        sil = silhouette_score(x, assignment.labels)
        if sil > best_sil:
            best_k, best_sil = k, sil
    assert best_k is not None
    if best_sil < LOW_STRUCTURE_SILHOUETTE:
        warnings.warn(
            f"low cluster structure: best mean silhouette {best_sil:.3f} "
            f"< {LOW_STRUCTURE_SILHOUETTE}",
            LowStructureWarning,
            stacklevel=2,
        )
    return best_k
