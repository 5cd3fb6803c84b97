"""The nine per-graph features tracked by the detector.

Fixed order: size, max degree, largest adjacency eigenvalue (upper
bound on maximum average degree), scan statistics at radii 1-3, triangle
count, global clustering coefficient, negated average path length.
Feature ids used elsewhere (weight subsets, CLI flags) are 1-based
positions in this order.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphSeries, connected_components

__all__ = [
    "FEATURE_NAMES",
    "N_FEATURES",
    "FeatureVector",
    "ConvergenceError",
    "size",
    "max_degree",
    "mad_eig",
    "scan",
    "vertex_scan",
    "triangles",
    "clustering_coeff",
    "neg_apl",
    "all_features",
    "series_features",
]

FEATURE_NAMES = (
    "size",
    "max_degree",
    "mad_eig",
    "scan1",
    "scan2",
    "scan3",
    "triangles",
    "clustering",
    "neg_apl",
)
N_FEATURES = len(FEATURE_NAMES)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach the requested residual.

    Carries the last eigenvalue estimate, the last iterate, and the
    residual at the point of failure.
    """

    def __init__(self, estimate: float, residual: float, iterate: np.ndarray):
        super().__init__(
            f"power iteration did not converge: estimate={estimate!r}, "
            f"residual={residual:.3e}"
        )
        self.estimate = estimate
        self.residual = residual
        self.iterate = iterate


@dataclass(frozen=True)
class FeatureVector:
    """The nine feature values for one graph, in FEATURE_NAMES order."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} values, got shape {v.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_NAMES, map(float, self.values)))


def size(g: Graph) -> float:
    """Number of edges."""
    return float(g.size)


def max_degree(g: Graph) -> float:
    if g.n == 0:
        return 0.0
    return float(g.degree_array.max())


def mad_eig(g: Graph, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest eigenvalue of the adjacency matrix.

    Upper-bounds the maximum average degree over induced subgraphs and
    always lies in [2|E|/n, max degree]. Power iteration runs on A + I
    (shift keeps the dominant eigenvalue strictly dominant on bipartite
    components) with an all-ones start vector, one component at a time;
    convergence is the Rayleigh-quotient residual dropping below tol.
    Raises ConvergenceError after max_iter iterations.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    best = 0.0
    for comp in connected_components(g):
        if len(comp) < 2:
            continue
        lam = _component_lambda_max(g, comp, tol, max_iter)
        if lam > best:
            best = lam
    return best


def _component_lambda_max(g: Graph, comp: list[int], tol: float, max_iter: int) -> float:
    k = len(comp)
    index = {v: i for i, v in enumerate(comp)}
    b = np.eye(k)
    for u in comp:
        row = b[index[u]]
        for w in g.neighbors(u):
            row[index[w]] = 1.0
    x = np.full(k, 1.0 / np.sqrt(k))
    theta = 1.0
    tol_sq = tol * tol
    resid_sq = np.inf
    for _ in range(max_iter):
        y = b @ x
        theta = float(x @ y)
        r = y - theta * x
        resid_sq = float(r @ r)
        if resid_sq <= tol_sq:
            return theta - 1.0
        x = y / np.sqrt(y @ y)
    raise ConvergenceError(theta - 1.0, float(np.sqrt(resid_sq)), x)


def vertex_scan(g: Graph, k: int) -> np.ndarray:
    """Edge count induced by each vertex's closed k-hop neighborhood."""
    if k < 1:
        raise ValueError(f"scan radius must be >= 1, got {k}")
    counts = np.zeros(g.n, dtype=np.int64)
    adj = g._adj
    for v in range(g.n):
        if not adj[v]:
            continue
        dist = _bounded_bfs(adj, v, k)
        c = 0
        for u in dist:
            for w in adj[u]:
                if w > u and w in dist:
                    c += 1
        counts[v] = c
    return counts


def scan(g: Graph, k: int) -> float:
    """Maximum induced edge count over all closed k-hop neighborhoods."""
    if g.n == 0:
        return 0.0
    return float(vertex_scan(g, k).max())


def _bounded_bfs(adj, v: int, k: int) -> dict[int, int]:
    dist = {v: 0}
    frontier = [v]
    for d in range(1, k + 1):
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = d
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return dist


def _scan_trio(g: Graph) -> tuple[float, float, float]:
    # One depth-3 BFS per active vertex serves all three radii; an edge
    # {u, w} enters the radius-r count once max(d(u), d(w)) <= r.
    best1 = best2 = best3 = 0
    adj = g._adj
    for v in range(g.n):
        if not adj[v]:
            continue
        dist = _bounded_bfs(adj, v, 3)
        c1 = c2 = c3 = 0
        for u, du in dist.items():
            for w in adj[u]:
                if w > u:
                    dw = dist.get(w)
                    if dw is None:
                        continue
                    r = du if du > dw else dw
                    if r <= 1:
                        c1 += 1
                        c2 += 1
                        c3 += 1
                    elif r == 2:
                        c2 += 1
                        c3 += 1
                    else:
                        c3 += 1
        if c1 > best1:
            best1 = c1
        if c2 > best2:
            best2 = c2
        if c3 > best3:
            best3 = c3
    return float(best1), float(best2), float(best3)


def triangles(g: Graph) -> float:
    """Number of 3-cliques, via sorted neighbor-list intersection.

    Each triangle u < v < w is counted once, at edge (u, v) with common
    neighbor w > v. Equals trace(A^3)/6 but avoids dense matrix work.
    """
    total = 0
    adj = g._adj
    for u, v in g.edges:
        au = adj[u]
        av = adj[v]
        i = bisect_right(au, v)
        j = bisect_right(av, v)
        la, lb = len(au), len(av)
        while i < la and j < lb:
            a = au[i]
            b = av[j]
            if a == b:
                total += 1
                i += 1
                j += 1
            elif a < b:
                i += 1
            else:
                j += 1
    return float(total)


def clustering_coeff(g: Graph, literal: bool = False) -> float:
    """Global clustering coefficient.

    Default is transitivity: closed triples over connected triples,
    bounded in [0, 1] and 0 when no connected triple exists. With
    ``literal=True`` the ratio is closed over open triples instead,
    with the denominator floored at 1 so triangle-saturated graphs
    return the closed-triple count.
    """
    closed = 3.0 * triangles(g)
    deg = g.degree_array
    connected_triples = float(np.sum(deg * (deg - 1) // 2))
    if literal:
        open_triples = connected_triples - closed
        return closed / max(open_triples, 1.0)
    if connected_triples == 0.0:
        return 0.0
    return closed / connected_triples


def neg_apl(g: Graph) -> float:
    """Negated average path length over ordered vertex pairs.

    Pairs with no connecting path count as twice the largest finite
    distance. A graph with no edges has no finite distance at all and
    yields 0 by convention, so an empty stream stays featureless.
    """
    n = g.n
    if n < 2 or g.size == 0:
        return 0.0
    adj = g._adj
    finite_sum = 0
    finite_pairs = 0
    dmax = 0
    for src in range(n):
        if not adj[src]:
            continue
        dist = {src: 0}
        frontier = [src]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        reached = len(dist) - 1
        finite_pairs += reached
        finite_sum += sum(dist.values())
        if d - 1 > dmax:
            dmax = d - 1
    total_pairs = n * (n - 1)
    missing = total_pairs - finite_pairs
    total = finite_sum + missing * 2 * dmax
    return -total / total_pairs


def all_features(
    g: Graph,
    *,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    cc_literal: bool = False,
) -> FeatureVector:
    """All nine features in FEATURE_NAMES order.

    Identical to calling the individual operations; scan radii share one
    BFS internally. Propagates ConvergenceError from the eigenvalue
    computation.
    """
    s1, s2, s3 = _scan_trio(g)
    tri = triangles(g)
    deg = g.degree_array
    connected_triples = float(np.sum(deg * (deg - 1) // 2))
    if cc_literal:
        open_triples = connected_triples - 3.0 * tri
        cc = 3.0 * tri / max(open_triples, 1.0)
    else:
        cc = 3.0 * tri / connected_triples if connected_triples > 0 else 0.0
    values = np.array(
        [
            float(g.size),
            float(deg.max()) if g.n else 0.0,
            mad_eig(g, tol, max_iter),
            s1,
            s2,
            s3,
            tri,
            cc,
            neg_apl(g),
        ]
    )
    return FeatureVector(values)


def series_features(series: GraphSeries, **kwargs) -> np.ndarray:
    """Raw feature matrix for one series, shape (t_max, 9)."""
    out = np.empty((len(series), N_FEATURES))
    for i, g in enumerate(series):
        out[i] = all_features(g, **kwargs).values
    return out
