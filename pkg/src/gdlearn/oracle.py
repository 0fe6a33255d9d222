"""Graph shortest-path distances used as ground truth."""

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, ParameterError


@dataclass(frozen=True)
class ShortestPathField:
    """Dijkstra distances from ``query``; ``inf`` where unreachable."""

    values: np.ndarray
    query: int

    @property
    def reachable(self):
        return np.isfinite(self.values)


def shortest_path_distances(graph, q, allow_unreachable=False):
    """Single-source shortest paths over Euclidean edge lengths.

    Raises
    ------
    DisconnectedGraphError
        If some vertex cannot be reached and ``allow_unreachable`` is false.
    """
    n = graph.n
    if not 0 <= q < n:
        raise ParameterError(f"query {q} out of range for {n} vertices")
    if np.any(graph.lengths <= 0):
        raise ParameterError("edge lengths must be positive")
    src, dst, _, length = graph.directed()
    order = np.lexsort((dst, src))
    src, dst, length = src[order], dst[order], length[order]
    indptr = np.searchsorted(src, np.arange(n + 1))
    dst_l, len_l = dst.tolist(), length.tolist()

    dist = [np.inf] * n
    dist[q] = 0.0
    settled = [False] * n
    heap = [(0.0, q)]
    while heap:
        du, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        for e in range(indptr[u], indptr[u + 1]):
            v = dst_l[e]
            alt = du + len_l[e]
            if alt < dist[v]:
                dist[v] = alt
                heapq.heappush(heap, (alt, v))

    values = np.array(dist)
    unreachable = int(np.sum(~np.isfinite(values)))
    if unreachable and not allow_unreachable:
        raise DisconnectedGraphError(
            f"{unreachable} vertices are unreachable from vertex {q}", unreachable=unreachable)
    return ShortestPathField(values, q)
