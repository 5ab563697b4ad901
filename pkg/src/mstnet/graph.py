"""Per-class weighted graphs, theta*median pruning and minimum spanning
forest weights.

Edge weights are weighted Euclidean distances
``sqrt(sum_i (w_i * (x_i - y_i))**2)``.  A class network keeps every pair
whose distance is at most ``theta * median`` of all pairwise distances and
caches the weight of its minimum spanning forest (one tree per connected
component).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
from scipy.spatial.distance import pdist

NETWORK_FORMAT = "mstnet.network"
NETWORK_VERSION = 1
DEFAULT_THETA = 0.80


class GraphError(ValueError):
    pass


class Edge(NamedTuple):
    u: int
    v: int
    weight: float


@dataclass(frozen=True)
class FeatureWeights:
    """Non-negative per-feature multipliers applied inside the distance."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise GraphError("feature weights are empty")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise GraphError("feature weights must be finite and non-negative")
        if not np.any(v > 0):
            raise GraphError("at least one feature weight must be positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def uniform(cls, n: int) -> "FeatureWeights":
        return cls(np.ones(n))

    def __len__(self) -> int:
        return self.values.size

    def scaled(self, c: float) -> "FeatureWeights":
        return FeatureWeights(self.values * c)

    def tolist(self) -> list[float]:
        return self.values.tolist()


def _as_weights(w, n: int) -> FeatureWeights:
    if w is None:
        return FeatureWeights.uniform(n)
    if not isinstance(w, FeatureWeights):
        w = FeatureWeights(w)
    if len(w) != n:
        raise GraphError(f"{len(w)} feature weights for {n} features")
    return w


def weighted_distance(x, y, w) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise GraphError("vectors must be 1-D and of equal length")
    w = _as_weights(w, x.size)
    return float(np.sqrt(np.sum((w.values * (x - y)) ** 2)))


# ------------------------------------------------------------ union-find MSF


def _kruskal(n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Indices of the edges chosen by Kruskal's algorithm.

    Edges are scanned in (weight, u, v) order; a disjoint-set forest with
    path halving and union by size rejects cycle-closing edges.
    """
    if len(w) == 0:
        return np.empty(0, dtype=int)
    order = np.lexsort((v, u, w))
    parent = list(range(n))
    size = [1] * n
    chosen = []
    needed = n - 1
    uu = u.tolist()
    vv = v.tolist()
    for e in order.tolist():
        a, b = uu[e], vv[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
        chosen.append(e)
        if len(chosen) == needed:
            break
    return np.array(chosen, dtype=int)


def _edge_arrays(edges) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(edges, np.ndarray):
        arr = np.asarray(edges, dtype=float).reshape(-1, 3)
        return arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2]
    edges = list(edges)
    if not edges:
        return np.empty(0, int), np.empty(0, int), np.empty(0)
    u, v, w = zip(*edges)
    return np.array(u, dtype=int), np.array(v, dtype=int), np.array(w, dtype=float)


def forest_weight(points, edges: Iterable[Edge] | np.ndarray) -> float:
    """Total weight of a minimum spanning forest.

    ``points`` is the node matrix (or simply the node count). The sum is
    taken with :func:`math.fsum`, so it does not depend on edge order.
    """
    n = int(points) if np.isscalar(points) else len(points)
    u, v, w = _edge_arrays(edges)
    if len(w):
        if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
            raise GraphError("edge references a node outside the graph")
        if np.any(u == v):
            raise GraphError("self-loops are not allowed")
    chosen = _kruskal(n, u, v, w)
    return math.fsum(w[chosen].tolist())


# ------------------------------------------------------------ class networks


@dataclass(frozen=True, eq=False)
class ClassNetwork:
    """Pruned complete graph over one class's (scaled) samples.

    ``edge_index``/``edge_weight`` hold the retained edges with ``u < v``;
    ``tree`` lists the positions (into those arrays) of the minimum
    spanning forest edges, ``mst_weight`` their total.
    """

    points: np.ndarray
    edge_index: np.ndarray
    edge_weight: np.ndarray
    theta: float
    median_weight: float
    mst_weight: float
    tree: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.points)

    @property
    def edges(self) -> list[Edge]:
        return [
            Edge(int(a), int(b), float(c))
            for (a, b), c in zip(self.edge_index.tolist(), self.edge_weight.tolist())
        ]

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edge_index.tolist()}

    # -- serialization: floats are written with repr(), which round-trips
    # every IEEE double exactly.

    def to_dict(self) -> dict:
        return {
            "format": NETWORK_FORMAT,
            "version": NETWORK_VERSION,
            "theta": self.theta,
            "median_weight": self.median_weight,
            "mst_weight": self.mst_weight,
            "points": self.points.tolist(),
            "edges": [[int(a), int(b), float(c)] for (a, b), c in
                      zip(self.edge_index.tolist(), self.edge_weight.tolist())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassNetwork":
        if d.get("format") != NETWORK_FORMAT or d.get("version") != NETWORK_VERSION:
            raise GraphError("unsupported network format or version")
        points = np.array(d["points"], dtype=float).reshape(len(d["points"]), -1)
        u, v, w = _edge_arrays(d["edges"])
        net = _assemble(points, np.column_stack([u, v]), w, float(d["theta"]), float(d["median_weight"]))
        if abs(net.mst_weight - float(d["mst_weight"])) > 1e-9 * max(1.0, abs(net.mst_weight)):
            raise GraphError("stored mst_weight does not match the stored edges")
        return net


def _assemble(points, edge_index, edge_weight, theta, median) -> ClassNetwork:
    edge_index = np.asarray(edge_index, dtype=int).reshape(-1, 2)
    edge_weight = np.asarray(edge_weight, dtype=float)
    tree = _kruskal(len(points), edge_index[:, 0], edge_index[:, 1], edge_weight)
    mst = math.fsum(edge_weight[tree].tolist())
    for a in (points, edge_index, edge_weight, tree):
        a.setflags(write=False)
    return ClassNetwork(points, edge_index, edge_weight, float(theta), float(median), mst, tree)


def pairwise_distances(points: np.ndarray, w: FeatureWeights) -> np.ndarray:
    """Condensed weighted distances in ``np.triu_indices(n, 1)`` order."""
    return pdist(np.asarray(points, dtype=float) * w.values, "euclidean")


def build_network(points, w=None, theta: float = DEFAULT_THETA) -> ClassNetwork:
    """Complete graph over ``points``, pruned to edges ``<= theta * median``."""
    points = np.array(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if len(points) == 0:
        raise GraphError("cannot build a network from zero points")
    if not theta > 0:
        raise GraphError("theta must be positive")
    w = _as_weights(w, points.shape[1])
    n = len(points)
    if n == 1:
        return _assemble(points, np.empty((0, 2), int), np.empty(0), theta, 0.0)
    dist = pairwise_distances(points, w)
    median = float(np.median(dist))
    if math.isinf(theta):
        keep = np.ones(dist.size, dtype=bool)
    else:
        keep = dist <= theta * median
    iu, iv = np.triu_indices(n, 1)
    return _assemble(points, np.column_stack([iu[keep], iv[keep]]), dist[keep], theta, median)


def insertion_delta(net: ClassNetwork, x, w=None) -> float:
    """Change in minimum spanning forest weight when ``x`` joins ``net``.

    ``x`` is connected to every node (these edges are never pruned).  Only
    the network's forest edges need to enter the recomputation: a retained
    edge outside the forest is the heaviest edge on a cycle of forest edges,
    and that cycle survives the insertion.  The result may be negative.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size != net.points.shape[1]:
        raise GraphError(f"vector has {x.size} features, network has {net.points.shape[1]}")
    w = _as_weights(w, x.size)
    n = net.n_nodes
    star = np.sqrt(np.sum((w.values * (net.points - x)) ** 2, axis=1))
    tu = net.edge_index[net.tree, 0]
    tv = net.edge_index[net.tree, 1]
    tw = net.edge_weight[net.tree]
    u = np.concatenate([tu, np.arange(n)])
    v = np.concatenate([tv, np.full(n, n)])
    weights = np.concatenate([tw, star])
    chosen = _kruskal(n + 1, u, v, weights)
    return math.fsum(weights[chosen].tolist()) - net.mst_weight
