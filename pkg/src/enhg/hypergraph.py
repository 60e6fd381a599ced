"""Elastic-net hypergraph construction and the normalized hypergraph Laplacian."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .datio import check_sample_matrix, normalize_columns
from .elasticnet import Decomposition, robust_matrix_elastic_net


class HypergraphError(ValueError):
    pass


@dataclass(frozen=True)
class ThresholdRule:
    """How the per-column membership threshold is chosen.

    ``mean_all`` averages ``|z_ij|`` over the ``n - 1`` off-diagonal entries
    of column ``j``; ``mean_nonzero`` averages only its nonzero entries;
    ``fixed`` uses ``value`` for every column.
    """

    kind: str = "mean_all"
    value: float = 0.0

    KINDS = ("mean_all", "mean_nonzero", "fixed")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise HypergraphError(f"unknown threshold rule {self.kind!r}")

    @classmethod
    def parse(cls, text) -> "ThresholdRule":
        """Parse ``mean_all``, ``mean_nonzero`` or ``fixed:<value>``."""
        if isinstance(text, cls):
            return text
        aliases = {"mean_abs_all": "mean_all", "mean_abs_nonzero": "mean_nonzero"}
        if text.startswith("fixed"):
            _, _, val = text.partition(":")
            try:
                return cls("fixed", float(val))
            except ValueError:
                raise HypergraphError(f"bad fixed threshold {text!r}; use fixed:<value>") from None
        return cls(aliases.get(text, text))

    def __str__(self):
        return f"fixed:{self.value!r}" if self.kind == "fixed" else self.kind

    def column_threshold(self, column: np.ndarray, centroid: int) -> float:
        off = np.abs(np.delete(column, centroid))
        if self.kind == "fixed":
            return self.value
        if self.kind == "mean_all":
            return float(off.mean())
        nz = off[off != 0]
        return float(nz.mean()) if nz.size else 0.0


@dataclass(frozen=True)
class Hypergraph:
    """Weighted hypergraph on ``n`` vertices.

    ``H`` is the ``(n, E)`` 0/1 incidence matrix (column ``e`` is hyperedge
    ``e``), ``weights`` the hyperedge weights and ``kept`` marks the
    hyperedges that take part in degrees, Theta and the Laplacian. For
    sample-centred constructions ``centroids[e]`` is the vertex the edge was
    grown from; pairwise graphs use ``-1``.
    """

    H: np.ndarray
    weights: np.ndarray
    kept: np.ndarray
    centroids: np.ndarray
    thresholds: np.ndarray = field(default=None)
    notes: tuple = ()

    def __post_init__(self):
        H = np.asarray(self.H, dtype=np.int8)
        w = np.asarray(self.weights, dtype=np.float64)
        kept = np.asarray(self.kept, dtype=bool)
        centroids = np.asarray(self.centroids, dtype=np.int64)
        n_edges = H.shape[1]
        thresholds = self.thresholds
        thresholds = (np.full(n_edges, np.nan) if thresholds is None
                      else np.asarray(thresholds, dtype=np.float64))
        for name, arr in (("weights", w), ("kept", kept), ("centroids", centroids),
                          ("thresholds", thresholds)):
            if arr.shape != (n_edges,):
                raise HypergraphError(f"{name} must have shape ({n_edges},), got {arr.shape}")
        for arr in (H, w, kept, centroids, thresholds):
            arr.flags.writeable = False
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "kept", kept)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def n_edges(self) -> int:
        return self.H.shape[1]

    @property
    def vertex_degrees(self) -> np.ndarray:
        return degrees(self.H, self.weights, self.kept)[0]

    @property
    def edge_degrees(self) -> np.ndarray:
        return degrees(self.H, self.weights, self.kept)[1]

    def edge_members(self, e) -> list[int]:
        return np.flatnonzero(self.H[:, e]).tolist()

    def with_weights(self, weights) -> "Hypergraph":
        return Hypergraph(self.H, weights, self.kept, self.centroids, self.thresholds, self.notes)

    def permuted(self, order) -> "Hypergraph":
        """Relabel vertices: new vertex ``i`` is old vertex ``order[i]``."""
        order = np.asarray(order)
        inverse = np.argsort(order)
        centroids = np.where(self.centroids >= 0, inverse[np.maximum(self.centroids, 0)], -1)
        return Hypergraph(self.H[order], self.weights, self.kept, centroids,
                          self.thresholds, self.notes)

    def to_json(self) -> dict:
        def edge(e):
            theta = self.thresholds[e]
            return {
                "centroid": int(self.centroids[e]) if self.centroids[e] >= 0 else None,
                "members": self.edge_members(e),
                "weight": float(self.weights[e]),
                "theta": None if np.isnan(theta) else float(theta),
            }

        return {
            "n": self.n,
            "edges": [edge(e) for e in np.flatnonzero(self.kept)],
            "dropped": [edge(e) for e in np.flatnonzero(~self.kept)],
            "notes": list(self.notes),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, doc) -> "Hypergraph":
        if isinstance(doc, str):
            doc = json.loads(doc)
        n = int(doc["n"])
        edges = [(e, True) for e in doc["edges"]] + [(e, False) for e in doc.get("dropped", [])]
        H = np.zeros((n, len(edges)), dtype=np.int8)
        w, kept, centroids, thetas = [], [], [], []
        for col, (e, is_kept) in enumerate(edges):
            H[e["members"], col] = 1
            w.append(e["weight"])
            kept.append(is_kept)
            centroids.append(-1 if e.get("centroid") is None else e["centroid"])
            thetas.append(np.nan if e.get("theta") is None else e["theta"])
        return cls(H, w, kept, centroids, thetas, tuple(doc.get("notes", ())))


# --------------------------------------------------------------------------
# construction steps

def incidence_from_coefficients(Z, rule="mean_all"):
    """Threshold each coefficient column into a hyperedge.

    Hyperedge ``e_j`` holds its centroid ``v_j`` and every ``v_i`` with
    ``|z_ij| > theta_j`` (strict). Returns ``(H, thresholds)``.
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
        raise HypergraphError(f"coefficient matrix must be square, got {Z.shape}")
    if np.any(np.diag(Z) != 0):
        raise HypergraphError("coefficient matrix must have a zero diagonal")
    rule = ThresholdRule.parse(rule)
    n = Z.shape[0]
    H = np.zeros((n, n), dtype=np.int8)
    thresholds = np.empty(n)
    for j in range(n):
        theta = rule.column_threshold(Z[:, j], j)
        thresholds[j] = theta
        H[:, j] = np.abs(Z[:, j]) > theta
        H[j, j] = 1
    return H, thresholds


def affinity(Z) -> np.ndarray:
    """``M = |Z^T Z|``: absolute inner products of coefficient columns."""
    Z = np.asarray(Z, dtype=np.float64)
    M = np.abs(Z.T @ Z)
    # symmetrize bitwise; the product is symmetric only up to rounding
    return np.triu(M) + np.triu(M, 1).T


def hyperedge_weights(H, M) -> np.ndarray:
    """``w(e_i) = sum of M(i, j)`` over members ``v_j`` of ``e_i`` other than ``v_i``.

    ``H`` must be square (edge ``i`` centred on vertex ``i``).
    """
    H = np.asarray(H)
    M = np.asarray(M, dtype=np.float64)
    if H.shape != M.shape or H.shape[0] != H.shape[1]:
        raise HypergraphError(f"shape mismatch: H {H.shape}, M {M.shape}")
    members = H.T.astype(bool).copy()
    np.fill_diagonal(members, False)
    return np.where(members, M, 0.0).sum(axis=1)


def degrees(H, w, kept=None):
    """Vertex degrees ``d(v) = sum_e w(e) h(v, e)`` and edge sizes ``delta(e)``.

    Dropped hyperedges contribute nothing to vertex degrees; their sizes are
    still reported.
    """
    H = np.asarray(H)
    w = np.asarray(w, dtype=np.float64)
    if H.shape[1] != w.shape[0]:
        raise HypergraphError(f"shape mismatch: H {H.shape}, w {w.shape}")
    if np.any(w < 0):
        raise HypergraphError("hyperedge weights must be nonnegative")
    live = w if kept is None else np.where(kept, w, 0.0)
    dv = H.astype(np.float64) @ live
    de = H.sum(axis=0).astype(np.int64)
    return dv, de


def theta_matrix(G: Hypergraph) -> np.ndarray:
    """``Dv^-1/2 H W De^-1 H^T Dv^-1/2`` over the kept hyperedges."""
    H = G.H[:, G.kept].astype(np.float64)
    w = G.weights[G.kept]
    de = H.sum(axis=0)
    if np.any(de < 2) or np.any(w <= 0):
        raise HypergraphError("kept hyperedges need at least 2 members and positive weight")
    dv = H @ w
    isolated = np.flatnonzero(dv <= 0)
    if isolated.size:
        raise HypergraphError(f"zero vertex degree at vertices {isolated.tolist()}")
    inv_sqrt = 1.0 / np.sqrt(dv)
    A = H * inv_sqrt[:, None]
    theta = (A * (w / de)) @ A.T
    return np.triu(theta) + np.triu(theta, 1).T


def laplacian(G: Hypergraph) -> np.ndarray:
    """Normalized hypergraph Laplacian ``I - Theta``."""
    theta = theta_matrix(G)
    return np.eye(G.n) - theta


def regularizer_double_sum(G: Hypergraph, F) -> float:
    """Smoothness of ``F`` written as the per-hyperedge pairwise sum.

    ``0.5 * sum_e sum_{u,v in e} w(e)/delta(e) * ||f(u)/sqrt(d(u)) - f(v)/sqrt(d(v))||^2``.
    Equals ``trace(F^T L F)``; kept as an explicit loop so it can check it.
    """
    F = np.asarray(F, dtype=np.float64)
    if F.ndim == 1:
        F = F[:, None]
    dv, de = degrees(G.H, G.weights, G.kept)
    scaled = F / np.sqrt(dv)[:, None]
    total = 0.0
    for e in np.flatnonzero(G.kept):
        members = np.flatnonzero(G.H[:, e])
        coeff = G.weights[e] / de[e]
        for u in members:
            for v in members:
                diff = scaled[u] - scaled[v]
                total += coeff * float(diff @ diff)
    return 0.5 * total


# --------------------------------------------------------------------------
# end to end

def hypergraph_from_coefficients(Z, rule="mean_all") -> Hypergraph:
    """Threshold, weight and repair a hypergraph from a coefficient matrix.

    Hyperedges with fewer than two members or zero weight are dropped. A
    vertex left with zero degree gets its own hyperedge back, shrunk to
    itself plus its largest-magnitude coefficient partner; if that edge
    still weighs nothing the build fails.
    """
    Z = np.asarray(Z, dtype=np.float64)
    H, thresholds = incidence_from_coefficients(Z, rule)
    M = affinity(Z)
    w = hyperedge_weights(H, M)
    sizes = H.sum(axis=0)
    kept = (sizes >= 2) & (w > 0)
    n = Z.shape[0]
    notes = []
    dropped = np.flatnonzero(~kept)
    if dropped.size:
        notes.append(f"dropped {dropped.size} hyperedge(s) with < 2 members or zero weight")

    dv, _ = degrees(H, w, kept)
    isolated = np.flatnonzero(dv <= 0)
    for i in isolated:
        column = np.abs(Z[:, i])
        partner = int(np.argmax(column))
        if column[partner] == 0:
            raise HypergraphError(
                f"vertex {i} is isolated and cannot be repaired: "
                "all of its representation coefficients are zero"
            )
        if M[i, partner] <= 0:
            raise HypergraphError(
                f"vertex {i} is isolated and its forced hyperedge with vertex "
                f"{partner} has zero weight"
            )
        H[:, i] = 0
        H[[i, partner], i] = 1
        w[i] = M[i, partner]
        kept[i] = True
        notes.append(f"vertex {i} repaired with forced hyperedge {{{i}, {partner}}}")
    return Hypergraph(H, w, kept, np.arange(n), thresholds, tuple(notes))


def build_enhg(X, lam=0.01, gamma=0.18, rule="mean_all", *, l1_weight=None, l2_weight=None,
               normalize=True, threads=None, return_decomposition=False):
    """Build the elastic-net hypergraph of the samples in ``X``.

    Normalizes the columns (a no-op for normalized data), solves the robust
    matrix elastic net, thresholds the coefficients into hyperedges, weighs
    them with the coefficient affinity and repairs degenerate edges.
    """
    X = check_sample_matrix(X)
    if normalize:
        X = normalize_columns(X)
    dec: Decomposition = robust_matrix_elastic_net(
        X, lam, gamma, l1_weight=l1_weight, l2_weight=l2_weight, threads=threads
    )
    G = hypergraph_from_coefficients(dec.Z, rule)
    return (G, dec) if return_decomposition else G
