"""Comparison constructions: Gaussian-kernel pairwise graph and K-nearest-neighbour hypergraph."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .datio import check_sample_matrix
from .hypergraph import Hypergraph, HypergraphError


def median_bandwidth(X) -> float:
    """Median of the pairwise Euclidean distances between columns."""
    dists = pdist(check_sample_matrix(X).T)
    sigma = float(np.median(dists))
    if not sigma > 0:
        raise HypergraphError("median pairwise distance is zero; pass a fixed bandwidth")
    return sigma


def _bandwidth(X, bandwidth):
    if bandwidth is None or bandwidth == "median":
        return median_bandwidth(X)
    sigma = float(bandwidth)
    if not sigma > 0:
        raise HypergraphError(f"bandwidth must be > 0, got {sigma}")
    return sigma


def gaussian_graph(X, bandwidth="median") -> Hypergraph:
    """Complete graph as a hypergraph of 2-member edges, weighted by a Gaussian kernel.

    Pairs whose kernel value underflows to zero are marked dropped.
    """
    X = check_sample_matrix(X)
    sigma = _bandwidth(X, bandwidth)
    n = X.shape[1]
    sq = pdist(X.T, "sqeuclidean")
    i, j = np.triu_indices(n, 1)
    H = np.zeros((n, i.size), dtype=np.int8)
    cols = np.arange(i.size)
    H[i, cols] = 1
    H[j, cols] = 1
    w = np.exp(-sq / (2.0 * sigma**2))
    return Hypergraph(H, w, w > 0, np.full(i.size, -1), None,
                      (f"gaussian bandwidth {sigma!r}",))


def knn_hypergraph(X, K=8, bandwidth="median") -> Hypergraph:
    """One hyperedge per sample: the sample plus its ``K`` nearest neighbours.

    The weight is the sum of Gaussian kernel values between the centroid and
    its neighbours. Distance ties go to the lower index.
    """
    X = check_sample_matrix(X)
    n = X.shape[1]
    if not 1 <= K < n:
        raise HypergraphError(f"K must be in [1, {n - 1}], got {K}")
    sigma = _bandwidth(X, bandwidth)
    sq = squareform(pdist(X.T, "sqeuclidean"))
    H = np.zeros((n, n), dtype=np.int8)
    w = np.zeros(n)
    for c in range(n):
        others = np.delete(np.arange(n), c)
        order = others[np.lexsort((others, sq[c, others]))][:K]
        H[c, c] = 1
        H[order, c] = 1
        w[c] = np.exp(-sq[c, order] / (2.0 * sigma**2)).sum()
    return Hypergraph(H, w, w > 0, np.arange(n), None, (f"knn K={K} bandwidth {sigma!r}",))
