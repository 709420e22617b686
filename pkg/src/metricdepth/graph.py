"""Geodesic distances on k-nearest-neighbour graphs (ISOMAP style)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph; ``edges`` holds (i, j, weight) with i < j."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not w > 0:
                raise GraphError(f"edge ({i}, {j}) has non-positive weight {w!r}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)

    def adjacency(self) -> csr_matrix:
        if not self.edges:
            return csr_matrix((self.n, self.n))
        i, j, w = (np.array(col) for col in zip(*self.edges))
        rows = np.concatenate([i, j]).astype(int)
        cols = np.concatenate([j, i]).astype(int)
        return csr_matrix((np.concatenate([w, w]).astype(float), (rows, cols)), shape=(self.n, self.n))


def _nearest(row: np.ndarray, k: int, exclude: int | None = None) -> np.ndarray:
    # stable sort: ties in distance go to the lower index
    order = np.argsort(row, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return order[:k]


def build_knn_graph(d, k: int) -> WeightedGraph:
    """Keep, for every vertex, only the edges to its k nearest neighbours.

    The neighbour relation is symmetrised by union. Zero distances between
    distinct points are rejected; deduplicate the data first.
    """
    d = np.asarray(d, dtype=float)
    n = d.shape[0]
    if not 1 <= k <= n - 1:
        raise GraphError(f"k must lie in [1, {n - 1}], got {k}")
    edges = {}
    for i in range(n):
        for j in _nearest(d[i], k, exclude=i):
            j = int(j)
            if d[i, j] <= 0:
                raise GraphError(f"points {i} and {j} coincide (zero distance); deduplicate the sample")
            edges[(min(i, j), max(i, j))] = float(d[i, j])
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in sorted(edges.items())))


def graph_all_pairs(graph: WeightedGraph) -> np.ndarray:
    """All-pairs shortest path lengths; raises if the graph is disconnected."""
    adj = graph.adjacency()
    count, labels = connected_components(adj, directed=False)
    if count > 1:
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        raise GraphError(f"graph is disconnected: {count} components of sizes {sizes}; increase k")
    geo = dijkstra(adj, directed=False)
    geo = np.minimum(geo, geo.T)
    np.fill_diagonal(geo, 0.0)
    return geo


def graft_points(geo: np.ndarray, to_sample: np.ndarray, k: int) -> np.ndarray:
    """Graph distances from new points attached by their k nearest sample points.

    Args:
        geo: n x n shortest-path matrix of the sample graph.
        to_sample: m x n base distances from each new point to the sample.
        k: number of graft edges per new point.

    Returns:
        m x n matrix with entry (q, i) = min over grafted neighbours v of
        to_sample[q, v] + geo[v, i].
    """
    to_sample = np.atleast_2d(np.asarray(to_sample, dtype=float))
    n = geo.shape[0]
    if not 1 <= k <= n:
        raise GraphError(f"graft k must lie in [1, {n}], got {k}")
    out = np.empty_like(to_sample)
    for q, row in enumerate(to_sample):
        nbrs = _nearest(row, k)
        out[q] = np.min(row[nbrs, None] + geo[nbrs], axis=0)
    return out


def graft_point(graph: WeightedGraph, dist_to_sample, k: int, geo: np.ndarray | None = None) -> np.ndarray:
    """Distances from one new point to every sample vertex after grafting."""
    if geo is None:
        geo = graph_all_pairs(graph)
    return graft_points(geo, np.asarray(dist_to_sample, dtype=float)[None, :], k)[0]
