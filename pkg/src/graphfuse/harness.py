"""Experiment orchestration: power studies, subset search, detection sweeps.

Power experiments follow a one-series-per-replicate protocol: each
replicate draws a series that is null up to the change point, the
standardized feature vector one step before the change is the null
sample, and the vector at the change point is the alternative. Across a
grid of egg rates the replicates share their null series and the
uniforms behind the changed slice (common random numbers), so power
curves over q are tightly coupled and the whole study is reproducible
from one master seed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .fusion import WeightScheme, power, test_at, DetectionResult
from .graph import Graph, GraphSeries
from .invariants import N_FEATURES, all_features, vertex_scan
from .simulate import KappaParams, SeededRng, pair_indices
from .temporal import InsufficientHistoryError, NormalizedFeatures, WindowParams, normalize, vertex_standardize

__all__ = [
    "ExperimentSpec",
    "PowerResult",
    "PowerBundle",
    "Table2Row",
    "simulate_normalized_slices",
    "run_power",
    "best_subset",
    "detect_series",
    "scheme_comparison_table",
    "normalized_series_features",
]

log = logging.getLogger(__name__)

# Per-vertex statistics behind the localized features: degree for the max
# degree, neighborhood edge counts for the three scan radii. The largest
# eigenvalue has no per-vertex analogue here and is normalized in time only.
_LOCALIZED = {1: ("degree", None), 3: ("scan", 1), 4: ("scan", 2), 5: ("scan", 3)}


def _local_stat(g: Graph, what_k: tuple) -> np.ndarray:
    what, k = what_k
    return g.degree_array if what == "degree" else vertex_scan(g, k)


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything a power experiment needs, seed included."""

    kappa: KappaParams = KappaParams()
    q_grid: tuple[float, ...] | None = None
    M: int = 10_000
    alpha: float = 0.05
    ell: int = 5
    schemes: tuple[WeightScheme, ...] = ()
    subset_mode: str = "fixed"
    seed: int = 0
    sigma_cap: float = 10.0
    include_individual: bool = True
    cc_literal: bool = False
    vertex_standardized: bool = False

    def __post_init__(self) -> None:
        if self.M < 100:
            raise ValueError(f"replicate count must be >= 100, got {self.M}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.subset_mode not in ("fixed", "best-of-d'"):
            raise ValueError(f"unknown subset mode {self.subset_mode!r}")
        if self.q_grid is not None:
            grid = tuple(float(q) for q in self.q_grid)
            for q in grid:
                if q < self.kappa.p or q > 1.0:
                    raise ValueError(
                        f"grid value q={q} outside [p={self.kappa.p}, 1]"
                    )
            object.__setattr__(self, "q_grid", grid)
        WindowParams(self.ell, self.sigma_cap)  # validates both

    @property
    def window(self) -> WindowParams:
        return WindowParams(self.ell, self.sigma_cap)

    @property
    def qs(self) -> tuple[float, ...]:
        return self.q_grid if self.q_grid is not None else (self.kappa.q,)


@dataclass(frozen=True)
class PowerResult:
    """Monte Carlo rejection rate for one (scheme, subset, q) cell."""

    scheme: str
    subset: tuple[int, ...]
    q: float
    power: float
    se: float
    M: int


@dataclass(frozen=True)
class Table2Row:
    """Detection agreement counts over all subsets of one size."""

    d_prime: int
    n_subsets: int
    both: int
    equal_only: int
    adaptive_only: int


@dataclass(frozen=True)
class PowerBundle:
    """Standardized slices shared by every evaluation of one experiment.

    ``null_prev`` holds the standardized vectors one step before the
    change point, ``null_cont`` the change-point step with no change
    planted, and ``alt[q]`` the change-point step with the egg running
    at rate q. All are (M, 9).
    """

    null_prev: np.ndarray
    null_cont: np.ndarray
    alt: dict[float, np.ndarray] = field(repr=False)
    spec: ExperimentSpec


def simulate_normalized_slices(spec: ExperimentSpec) -> PowerBundle:
    """Simulate M replicate series and standardize the decision slices.

    Replicate j draws its uniforms from the Philox stream
    (spec.seed, j). The null series is shared across all q values and
    the changed slice reuses the same uniforms with higher thresholds on
    egg pairs, so the alternative edge sets are nested in q.
    """
    kappa = spec.kappa
    ell = spec.ell
    t_star = kappa.t_star
    if kappa.t_max != t_star:
        raise ValueError(
            f"power protocol needs t_max == t_star, got {kappa.t_max} != {t_star}"
        )
    vs = spec.vertex_standardized
    min_t_star = 2 * ell + 2 if vs else ell + 2
    if t_star < min_t_star:
        raise ValueError(
            f"change point t_star={t_star} too early: the step before it needs "
            f"a full window, so t_star >= {min_t_star}"
        )
    n, p, m = kappa.n, kappa.p, kappa.m
    iu, ju = pair_indices(n)
    egg = ju < m if m > 1 else np.zeros(iu.shape[0], dtype=bool)
    qs = spec.qs
    feat_kwargs = {"cc_literal": spec.cc_literal}
    window = spec.window

    raw_null = np.empty((spec.M, t_star, N_FEATURES))
    raw_alt = {q: np.empty((spec.M, N_FEATURES)) for q in qs}
    psi_null = np.empty((len(_LOCALIZED), t_star, n)) if vs else None
    for j in range(spec.M):
        gen = SeededRng(spec.seed, j).generator()
        u = gen.random((t_star, iu.shape[0]))
        graphs = []
        for t in range(t_star):
            mask = u[t] < p
            g = Graph._from_clean_pairs(n, iu[mask], ju[mask])
            graphs.append(g)
            raw_null[j, t] = all_features(g, **feat_kwargs).values
        if vs:
            for s_idx, (col, spec_k) in enumerate(_LOCALIZED.items()):
                for t, g in enumerate(graphs):
                    psi_null[s_idx, t] = _local_stat(g, spec_k)
                raw_null[j, :, col] = vertex_standardize(psi_null[s_idx], window)
        last = u[t_star - 1]
        for q in qs:
            mask = np.where(egg, last < q, last < p)
            g = Graph._from_clean_pairs(n, iu[mask], ju[mask])
            raw_alt[q][j] = all_features(g, **feat_kwargs).values
            if vs:
                for s_idx, (col, spec_k) in enumerate(_LOCALIZED.items()):
                    psi = psi_null[s_idx].copy()
                    psi[t_star - 1] = _local_stat(g, spec_k)
                    raw_alt[q][j, col] = vertex_standardize(psi, window)[t_star - 1]
        if (j + 1) % 2000 == 0:
            log.info("simulated %d/%d replicates", j + 1, spec.M)

    first_valid = ell + 1 if vs else 1
    s_null = normalize(raw_null, window, first_valid_t=first_valid).s
    null_prev = np.ascontiguousarray(s_null[:, t_star - 2, :])
    null_cont = np.ascontiguousarray(s_null[:, t_star - 1, :])
    alt = {}
    for q in qs:
        spliced = raw_null.copy()
        spliced[:, t_star - 1, :] = raw_alt[q]
        alt[q] = np.ascontiguousarray(
            normalize(spliced, window, first_valid_t=first_valid).s[:, t_star - 1, :]
        )
    return PowerBundle(null_prev=null_prev, null_cont=null_cont, alt=alt, spec=spec)


def _se(p_hat: float, m: int) -> float:
    return math.sqrt(p_hat * (1.0 - p_hat) / m)


def run_power(spec: ExperimentSpec, progress=None, *, bundle: PowerBundle | None = None) -> list[PowerResult]:
    """Estimate power for every (q, scheme) cell of the experiment.

    Also reports the nine single-feature powers per scheme unless
    ``spec.include_individual`` is off. ``progress`` (if given) receives
    each PowerResult as soon as it exists, so partial results survive a
    failure downstream.
    """
    if bundle is None:
        bundle = simulate_normalized_slices(spec)
    results: list[PowerResult] = []

    def emit(scheme: WeightScheme, q: float, alt: np.ndarray) -> None:
        p_hat = power(bundle.null_prev, alt, scheme, spec.alpha)
        r = PowerResult(scheme.kind, scheme.subset, q, p_hat, _se(p_hat, spec.M), spec.M)
        results.append(r)
        if progress is not None:
            progress(r)

    kinds = []
    for scheme in spec.schemes:
        if scheme.kind not in kinds:
            kinds.append(scheme.kind)
    for q in spec.qs:
        alt = bundle.alt[q]
        for scheme in spec.schemes:
            emit(scheme, q, alt)
        if spec.include_individual:
            for kind in kinds:
                for i in range(1, N_FEATURES + 1):
                    emit(WeightScheme(kind, (i,)), q, alt)
    return results


def best_subset(
    spec: ExperimentSpec,
    d_prime: int,
    kind: str = "adaptive",
    *,
    bundle: PowerBundle | None = None,
) -> tuple[tuple[int, ...], PowerResult]:
    """Exhaustive search over all size-d' feature subsets.

    Every subset is scored on the same replicates (same seed, same
    slices), so differences between subsets carry no extra Monte Carlo
    noise. Ties resolve to the lexicographically first subset. Uses the
    single q from spec.kappa.
    """
    if not (1 <= d_prime <= N_FEATURES):
        raise ValueError(f"fusion dimension must be in 1..{N_FEATURES}, got {d_prime}")
    if bundle is None:
        bundle = simulate_normalized_slices(replace(spec, q_grid=None))
    q = spec.kappa.q
    if q not in bundle.alt:
        raise ValueError(f"bundle has no alternative slice for q={q}")
    alt = bundle.alt[q]
    best: tuple[int, ...] | None = None
    best_power = -1.0
    for subset in combinations(range(1, N_FEATURES + 1), d_prime):
        p_hat = power(bundle.null_prev, alt, WeightScheme(kind, subset), spec.alpha)
        if p_hat > best_power:
            best_power = p_hat
            best = subset
    assert best is not None
    return best, PowerResult(kind, best, q, best_power, _se(best_power, spec.M), spec.M)


def normalized_series_features(
    series: GraphSeries,
    window: WindowParams,
    *,
    vertex_standardized: bool = False,
    cc_literal: bool = False,
) -> NormalizedFeatures:
    """Standardized feature matrix for one observed series.

    With ``vertex_standardized`` on, the localized features (max degree
    and the scan statistics) are first rebuilt as the per-time max of
    per-vertex z-scores, so chronically busy vertices cannot dominate;
    those raw series only exist after one window of warm-up, which
    pushes the first valid standardized step to 2*ell + 1.
    """
    t_max = len(series)
    raw = np.empty((t_max, N_FEATURES))
    for t_idx, g in enumerate(series):
        raw[t_idx] = all_features(g, cc_literal=cc_literal).values
    first_valid = 1
    if vertex_standardized:
        for col, what_k in _LOCALIZED.items():
            psi = np.empty((t_max, series.n))
            for t_idx, g in enumerate(series):
                psi[t_idx] = _local_stat(g, what_k)
            raw[:, col] = vertex_standardize(psi, window)
        first_valid = window.ell + 1
    return normalize(raw, window, first_valid_t=first_valid)


def detect_series(
    series: GraphSeries,
    ell: int,
    alpha: float,
    schemes,
    subsets,
    *,
    sigma_cap: float = 10.0,
    vertex_standardized: bool = True,
    cc_literal: bool = False,
    t_labels=None,
) -> list[DetectionResult]:
    """Sweep a single observed series for anomalous time steps.

    At every testable t the null reference is the set of standardized
    vectors from all earlier valid steps (at least two are required),
    mirroring the no-replicates situation of real data. ``schemes`` is a
    list of weighting kinds, ``subsets`` a list of 1-based feature-id
    tuples; every combination is tested at every t. ``t_labels`` maps
    internal 1-based times to reported ones (for inputs whose first time
    bin is not 1).
    """
    window = WindowParams(ell, sigma_cap)
    norm = normalized_series_features(
        series, window, vertex_standardized=vertex_standardized, cc_literal=cc_literal
    )
    first, last = norm.valid_range
    first_testable = first + 2
    if last < first_testable:
        raise InsufficientHistoryError(
            required=first_testable, available=last, what="detection sweep"
        )
    results: list[DetectionResult] = []
    for t in range(first_testable, last + 1):
        null_s = norm.s[first - 1 : t - 1, :]
        s_test = norm.s[t - 1, :]
        label = int(t_labels[t - 1]) if t_labels is not None else t
        for kind in schemes:
            for subset in subsets:
                r = test_at(s_test, null_s, WeightScheme(kind, tuple(subset)), alpha, t=label)
                results.append(r)
    return results


def scheme_comparison_table(
    series: GraphSeries,
    t_star: int,
    alpha: float,
    ell: int,
    *,
    sigma_cap: float = 10.0,
    vertex_standardized: bool = True,
    cc_literal: bool = False,
) -> list[Table2Row]:
    """Classify detection at t_star for every feature subset of every size.

    Each subset is tested under both weighting kinds against the
    standardized history before t_star; rows count subsets detected by
    both, by equal weighting only, and by adaptive weighting only.
    """
    window = WindowParams(ell, sigma_cap)
    norm = normalized_series_features(
        series, window, vertex_standardized=vertex_standardized, cc_literal=cc_literal
    )
    first, last = norm.valid_range
    if not (first + 2 <= t_star <= last):
        raise ValueError(
            f"t_star={t_star} needs at least two valid steps before it and must "
            f"lie in the valid range [{first}, {last}]"
        )
    null_s = norm.s[first - 1 : t_star - 1, :]
    s_test = norm.s[t_star - 1, :]
    rows = []
    for d_prime in range(1, N_FEATURES + 1):
        both = equal_only = adaptive_only = 0
        for subset in combinations(range(1, N_FEATURES + 1), d_prime):
            eq = test_at(s_test, null_s, WeightScheme("equal", subset), alpha, t=t_star).reject
            ad = test_at(s_test, null_s, WeightScheme("adaptive", subset), alpha, t=t_star).reject
            if eq and ad:
                both += 1
            elif eq:
                equal_only += 1
            elif ad:
                adaptive_only += 1
        rows.append(
            Table2Row(
                d_prime=d_prime,
                n_subsets=math.comb(N_FEATURES, d_prime),
                both=both,
                equal_only=equal_only,
                adaptive_only=adaptive_only,
            )
        )
    return rows
