"""Simple undirected graphs on a fixed vertex set {0, ..., n-1}.

Vertices are dense integers so invariant computations can index arrays
directly; label mapping happens at ingestion and never reaches this
module. Graphs are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "GraphSeries",
    "from_edge_list",
    "to_edge_list",
    "degrees",
    "bfs_distances",
    "kth_neighborhood",
    "induced_edge_count",
    "connected_components",
]


class Graph:
    """Immutable simple undirected graph.

    Adjacency is stored as one sorted tuple of neighbors per vertex:
    O(deg) iteration, O(log deg) membership, and merge-intersection for
    triangle counting. Self-loops are dropped and duplicate/reversed
    pairs collapse to a single undirected edge.
    """

    __slots__ = ("_n", "_edges", "_adj", "_deg")

    def __init__(self, n: int, pairs: Iterable[tuple[int, int]] = ()) -> None:
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        edge_set: set[tuple[int, int]] = set()
        for pair in pairs:
            u, v = int(pair[0]), int(pair[1])
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                continue
            edge_set.add((u, v) if u < v else (v, u))
        self._init_from_edges(n, sorted(edge_set))

    def _init_from_edges(self, n: int, edges: list[tuple[int, int]]) -> None:
        self._n = n
        self._edges = tuple(edges)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        self._adj = tuple(tuple(lst) for lst in adj)
        deg = np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=n)
        deg.flags.writeable = False
        self._deg = deg

    @classmethod
    def _from_clean_pairs(cls, n: int, us, vs) -> "Graph":
        """Trusted fast path: pairs already unique, in range, u < v, sorted."""
        g = object.__new__(cls)
        g._init_from_edges(n, list(zip(map(int, us), map(int, vs))))
        return g

    @property
    def n(self) -> int:
        return self._n

    @property
    def size(self) -> int:
        """Number of edges."""
        return len(self._edges)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def degree_array(self) -> np.ndarray:
        """Read-only per-vertex degree vector."""
        return self._deg

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self._adj[v]

    def degree_of(self, v: int) -> int:
        self._check_vertex(v)
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return False
        a = self._adj[u] if len(self._adj[u]) <= len(self._adj[v]) else self._adj[v]
        t = v if a is self._adj[u] else u
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < t:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == t

    def _check_vertex(self, v: int) -> None:
        if not (0 <= v < self._n):
            raise ValueError(f"vertex {v} out of range for n={self._n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, size={self.size})"


class GraphSeries:
    """Time-ordered sequence of graphs sharing one vertex set.

    Time indices are 1-based: ``at_time(1)`` is the first graph and
    ``at_time(t_max)`` the last, matching the windowed statistics that
    consume the series.
    """

    __slots__ = ("_graphs", "_n")

    def __init__(self, graphs: Sequence[Graph]) -> None:
        graphs = tuple(graphs)
        if not graphs:
            raise ValueError("a series needs at least one graph")
        n = graphs[0].n
        for i, g in enumerate(graphs):
            if g.n != n:
                raise ValueError(f"graph at index {i} has n={g.n}, expected {n}")
        self._graphs = graphs
        self._n = n

    @property
    def n(self) -> int:
        return self._n

    @property
    def t_max(self) -> int:
        return len(self._graphs)

    @property
    def graphs(self) -> tuple[Graph, ...]:
        return self._graphs

    def at_time(self, t: int) -> Graph:
        if not (1 <= t <= len(self._graphs)):
            raise ValueError(f"time {t} out of range [1, {len(self._graphs)}]")
        return self._graphs[t - 1]

    def __len__(self) -> int:
        return len(self._graphs)

    def __iter__(self) -> Iterator[Graph]:
        return iter(self._graphs)

    def __getitem__(self, i: int) -> Graph:
        return self._graphs[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSeries):
            return NotImplemented
        return self._n == other._n and self._graphs == other._graphs

    def __repr__(self) -> str:
        return f"GraphSeries(n={self._n}, t_max={len(self._graphs)})"


def from_edge_list(n: int, pairs: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from raw vertex pairs.

    Self-loops are dropped; duplicate and reversed pairs collapse to one
    undirected edge. Out-of-range endpoints raise ValueError naming the
    offending pair.
    """
    return Graph(n, pairs)


def to_edge_list(g: Graph) -> list[tuple[int, int]]:
    """Edges as (u, v) with u < v, sorted; inverse of from_edge_list."""
    return list(g.edges)


def degrees(g: Graph) -> np.ndarray:
    """Per-vertex degree vector; sums to twice the edge count."""
    return g.degree_array


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from source; unreachable vertices get +inf."""
    g._check_vertex(source)
    dist = np.full(g.n, np.inf)
    dist[source] = 0.0
    adj = g._adj
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1.0
        for w in adj[u]:
            if dist[w] == np.inf:
                dist[w] = du
                queue.append(w)
    return dist

def kth_neighborhood(g: Graph, v: int, k: int) -> set[int]:
    """Closed k-hop neighborhood of v (always contains v itself)."""
    g._check_vertex(v)
    if k < 0:
        raise ValueError(f"radius must be non-negative, got {k}")
    adj = g._adj
    seen = {v}
    frontier = [v]
    for _ in range(k):
        if not frontier:
            break
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def induced_edge_count(g: Graph, s: Iterable[int]) -> int:
    """Number of edges with both endpoints in the vertex set s."""
    members = set()
    for v in s:
        v = int(v)
        g._check_vertex(v)
        members.add(v)
    count = 0
    adj = g._adj
    for u in members:
        for w in adj[u]:
            if w > u and w in members:
                count += 1
    return count


def connected_components(g: Graph) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by least vertex."""
    seen = bytearray(g.n)
    adj = g._adj
    comps: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = 1
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = 1
                    comp.append(w)
                    queue.append(w)
        comp.sort()
        comps.append(comp)
    return comps
