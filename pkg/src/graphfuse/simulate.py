"""Random graph time series: flat-rate nulls and planted chatter groups.

The change model is "kidney-egg": every vertex pair communicates with
probability p, except that from the change point onward the pairs inside
a small group of m vertices (the egg, fixed to vertex ids 0..m-1)
communicate with probability q >= p. The same distribution arises from a
random dot product construction in which each vertex carries a latent
sub-probability vector and an edge appears with probability equal to the
inner product of its endpoints' vectors; both samplers are provided.

Randomness comes from the counter-based Philox4x64 generator keyed by
(master_seed, stream_id), so replicate streams are independent and every
draw is reproducible across platforms and schedules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphSeries

__all__ = [
    "KappaParams",
    "LatentVectors",
    "SeededRng",
    "make_latent",
    "sample_kappa",
    "sample_series",
    "sample_rdpg_series",
    "sample_rdpg_from_vectors",
    "pair_indices",
]

_UINT64 = 2**64


@dataclass(frozen=True)
class KappaParams:
    """Kidney-egg model parameters for one series.

    The egg has m vertices with internal edge probability q; all other
    pairs use p. The change happens at t_star; a t_star beyond t_max
    means the series never leaves the null state.
    """

    n: int = 50
    p: float = 0.01
    m: int = 6
    q: float = 0.3
    t_star: int = 12
    t_max: int = 12

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if not (0.0 <= self.q <= 1.0):
            raise ValueError(f"q must be in [0, 1], got {self.q}")
        if self.q < self.p:
            raise ValueError(f"egg probability q={self.q} must be >= p={self.p}")
        if not (0 <= self.m <= self.n):
            raise ValueError(f"egg size m={self.m} must be in [0, n={self.n}]")
        if self.t_star < 1:
            raise ValueError(f"change point must be >= 1, got {self.t_star}")
        if self.t_max < 1:
            raise ValueError(f"series length must be >= 1, got {self.t_max}")


@dataclass(frozen=True)
class LatentVectors:
    """Latent sub-probability vectors for null and chattering vertices."""

    pi_bar_0: np.ndarray
    pi_bar_a: np.ndarray

    def __post_init__(self) -> None:
        p0 = np.asarray(self.pi_bar_0, dtype=float)
        pa = np.asarray(self.pi_bar_a, dtype=float)
        if p0.ndim != 1 or p0.shape != pa.shape:
            raise ValueError(
                f"latent vectors must be 1-d and same length, got {p0.shape} vs {pa.shape}"
            )
        for name, v in (("pi_bar_0", p0), ("pi_bar_a", pa)):
            if (v < 0).any():
                raise ValueError(f"{name} has negative entries")
            if v.sum() > 1.0 + 1e-12:
                raise ValueError(f"{name} entries sum to {v.sum()}, above 1")
        p0.flags.writeable = False
        pa.flags.writeable = False
        object.__setattr__(self, "pi_bar_0", p0)
        object.__setattr__(self, "pi_bar_a", pa)

    @property
    def K(self) -> int:
        return self.pi_bar_0.shape[0]


@dataclass(frozen=True)
class SeededRng:
    """Reproducible stream: Philox4x64 keyed by (master_seed, stream_id)."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.master_seed < _UINT64):
            raise ValueError(f"master seed must fit in 64 bits, got {self.master_seed}")
        if not (0 <= self.stream_id < _UINT64):
            raise ValueError(f"stream id must fit in 64 bits, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng)!r}")


def make_latent(p: float, q: float) -> LatentVectors:
    """Two-dimensional latent vectors matching edge rates p and q.

    Null vertices carry (sqrt(p), 0) and chattering vertices
    (sqrt(p), sqrt(q - p)), so null-null and null-chatter pairs connect
    at rate p while chatter-chatter pairs connect at rate q.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError(f"probabilities must be in [0, 1], got p={p}, q={q}")
    if q < p:
        raise ValueError(f"need q >= p, got p={p}, q={q}")
    rp = np.sqrt(p)
    rd = np.sqrt(q - p)
    if rp + rd > 1.0 + 1e-12:
        raise ValueError(
            f"sqrt(p) + sqrt(q - p) = {rp + rd:.6f} exceeds 1; "
            "not admissible as a sub-probability vector"
        )
    return LatentVectors(np.array([rp, 0.0]), np.array([rp, rd]))


def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangle pair enumeration (u < v), row-major; the fixed draw
    order for every sampler here."""
    return np.triu_indices(n, k=1)


def _graph_from_mask(n: int, iu: np.ndarray, ju: np.ndarray, mask: np.ndarray) -> Graph:
    return Graph._from_clean_pairs(n, iu[mask], ju[mask])


def _pair_probs(params: KappaParams, iu, ju, active: bool) -> np.ndarray:
    probs = np.full(iu.shape[0], params.p)
    if active and params.m > 1:
        probs[ju < params.m] = params.q
    return probs


def sample_kappa(params: KappaParams, rng) -> Graph:
    """One kidney-egg draw (the egg is active regardless of t_star)."""
    gen = _as_generator(rng)
    iu, ju = pair_indices(params.n)
    probs = _pair_probs(params, iu, ju, active=True)
    mask = gen.random(iu.shape[0]) < probs
    return _graph_from_mask(params.n, iu, ju, mask)


def sample_series(params: KappaParams, rng) -> GraphSeries:
    """Independent-edge series: flat rate p before t_star, egg active after."""
    gen = _as_generator(rng)
    iu, ju = pair_indices(params.n)
    graphs = []
    for t in range(1, params.t_max + 1):
        probs = _pair_probs(params, iu, ju, active=t >= params.t_star)
        mask = gen.random(iu.shape[0]) < probs
        graphs.append(_graph_from_mask(params.n, iu, ju, mask))
    return GraphSeries(graphs)


def sample_rdpg_from_vectors(vectors, rng) -> GraphSeries:
    """Series from explicit per-vertex latent vectors, shape (t_max, n, K).

    For each time step, every unordered pair {u, v} gets an independent
    edge with probability <vec_u, vec_v> (clipped into [0, 1]). This is
    the plug-in point for latent models beyond the fixed-vector one.
    """
    vp = np.asarray(vectors, dtype=float)
    if vp.ndim != 3:
        raise ValueError(f"expected (t_max, n, K) vectors, got shape {vp.shape}")
    gen = _as_generator(rng)
    t_max, n, _ = vp.shape
    iu, ju = pair_indices(n)
    graphs = []
    for t in range(t_max):
        probs = np.clip(np.einsum("ik,ik->i", vp[t, iu], vp[t, ju]), 0.0, 1.0)
        mask = gen.random(iu.shape[0]) < probs
        graphs.append(_graph_from_mask(n, iu, ju, mask))
    return GraphSeries(graphs)


def sample_rdpg_series(params: KappaParams, latent: LatentVectors, rng) -> GraphSeries:
    """Random dot product series: egg vertices switch latent vectors at t_star."""
    vp = np.empty((params.t_max, params.n, latent.K))
    vp[:] = latent.pi_bar_0
    if params.m > 0:
        for t in range(params.t_star - 1, params.t_max):
            vp[t, : params.m] = latent.pi_bar_a
    return sample_rdpg_from_vectors(vp, rng)
