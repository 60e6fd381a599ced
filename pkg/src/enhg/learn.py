"""Spectral clustering and label propagation on a hypergraph."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datio import LabelVector
from .hypergraph import Hypergraph, laplacian, theta_matrix


class LearnError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralEmbedding:
    vectors: np.ndarray  # (n, k), column i pairs with eigvals[i]
    eigvals: np.ndarray


@dataclass(frozen=True)
class ClusteringResult:
    assignments: np.ndarray
    embedding: SpectralEmbedding
    inertia: float


def spectral_embedding(L, k) -> SpectralEmbedding:
    """Eigenvectors for the ``k`` smallest eigenvalues of a symmetric matrix.

    Signs are fixed so that each eigenvector's largest-magnitude entry is
    positive (the lowest index wins ties).
    """
    L = np.asarray(L, dtype=np.float64)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise LearnError(f"matrix must be square, got {L.shape}")
    n = L.shape[0]
    if not 1 <= k <= n:
        raise LearnError(f"k must be in [1, {n}], got {k}")
    if np.abs(L - L.T).max() > 1e-10:
        raise LearnError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (L + L.T))
    vals, vecs = vals[:k], vecs[:, :k].copy()
    mags = np.abs(vecs)
    # lowest index among entries within rounding of the column maximum
    lead = np.argmax(mags >= mags.max(axis=0) - 1e-12, axis=0)
    flip = vecs[lead, np.arange(k)] < 0
    vecs[:, flip] *= -1.0
    return SpectralEmbedding(vecs, vals)


def _kmeans_once(points, k, rng, max_iter, tol):
    n = points.shape[0]
    # k-means++ seeding
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(n)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers[c] = points[idx]
        closest = np.minimum(closest, ((points - centers[c]) ** 2).sum(axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dist, axis=1)
        new = centers.copy()
        point_cost = dist[np.arange(n), labels]
        taken = set()
        for c in range(k):
            members = labels == c
            if members.any():
                new[c] = points[members].mean(axis=0)
            else:
                # empty cluster: restart it at the worst-fitted point
                order = np.argsort(-point_cost, kind="stable")
                far = next(int(i) for i in order if int(i) not in taken)
                taken.add(far)
                new[c] = points[far]
                labels[far] = c
                point_cost[far] = 0.0
        shift = float(((new - centers) ** 2).sum())
        centers = new
        if shift <= tol:
            break
    dist = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(dist, axis=1)
    inertia = float(dist[np.arange(n), labels].sum())
    return labels, inertia


def kmeans(points, k, seed=0, restarts=20, max_iter=300, tol=1e-6, threads=None):
    """Lloyd's algorithm with k-means++ seeding; best of ``restarts`` runs.

    Restart ``r`` draws from ``default_rng(seed + r)``, so results do not
    depend on whether restarts run in parallel. Ties in inertia go to the
    earliest restart. Returns ``(assignments, inertia)``.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if not 1 <= k <= n:
        raise LearnError(f"k must be in [1, {n}], got {k}")
    if restarts < 1:
        raise LearnError("restarts must be >= 1")

    def run(r):
        return _kmeans_once(points, k, np.random.default_rng(seed + r), max_iter, tol)

    workers = threads or int(os.environ.get("ENHG_THREADS", "1") or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(restarts)))
    else:
        results = [run(r) for r in range(restarts)]
    best = min(range(restarts), key=lambda r: (results[r][1], r))
    return results[best]


def spectral_clustering(G: Hypergraph, k, seed=0, restarts=20, normalize_rows=False,
                        threads=None) -> ClusteringResult:
    """Cluster vertices by k-means on the rows of the bottom-``k`` Laplacian eigenvectors."""
    if not 2 <= k <= G.n:
        raise LearnError(f"k must be in [2, {G.n}], got {k}")
    emb = spectral_embedding(laplacian(G), k)
    rows = emb.vectors
    if normalize_rows:
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        rows = rows / np.where(norms > 0, norms, 1.0)
    labels, inertia = kmeans(rows, k, seed=seed, restarts=restarts, threads=threads)
    return ClusteringResult(labels, emb, inertia)


# --------------------------------------------------------------------------
# semi-supervised

def label_matrix(labels: LabelVector, n_classes=None) -> np.ndarray:
    """One-hot ``Y`` with all-zero rows for unlabeled samples."""
    c = n_classes if n_classes is not None else labels.n_classes
    Y = np.zeros((len(labels), c))
    idx = np.flatnonzero(labels.mask)
    Y[idx, labels.labels[idx]] = 1.0
    return Y


def _check_propagation(G, Y, alpha):
    if not 0.0 < alpha < 1.0:
        raise LearnError(f"alpha must be in (0, 1), got {alpha}")
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim != 2 or Y.shape[0] != G.n:
        raise LearnError(f"Y must have shape ({G.n}, c), got {Y.shape}")
    if not np.any(Y):
        raise LearnError("no labeled samples in Y")
    return Y


def propagate_labels(G: Hypergraph, Y, alpha=0.99) -> np.ndarray:
    """Closed-form propagation: solve ``(I - alpha Theta) F = Y``."""
    Y = _check_propagation(G, Y, alpha)
    A = np.eye(G.n) - alpha * theta_matrix(G)
    try:
        factor = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as exc:
        raise LearnError(f"I - alpha*Theta is not positive definite: {exc}") from exc
    return np.linalg.solve(factor.T, np.linalg.solve(factor, Y))


def propagate_labels_iterative(G: Hypergraph, Y, alpha=0.99, tol=1e-10, max_iter=100000):
    """Fixed-point iteration ``F <- alpha Theta F + Y`` starting from ``F = Y``."""
    Y = _check_propagation(G, Y, alpha)
    theta = theta_matrix(G)
    F = Y
    for _ in range(max_iter):
        nxt = alpha * (theta @ F) + Y
        if np.linalg.norm(nxt - F) <= tol:
            return nxt
        F = nxt
    raise LearnError(f"label propagation did not converge within {max_iter} iterations")


def predict_labels(F) -> LabelVector:
    """Row-wise argmax; ties go to the lowest class index."""
    F = np.asarray(F, dtype=np.float64)
    if F.ndim != 2 or F.shape[1] < 1:
        raise LearnError("F must be an (n, c) matrix with c >= 1")
    return LabelVector.known(np.argmax(F, axis=1))
