"""Fusing standardized features into one test statistic.

The fused statistic is a weighted sum of standardized features. Weights
are either uniform (1/d') or adaptive: each feature's absolute deviation
from the null mean in null standard-deviation units, recomputed for
every tested point. The critical value is an empirical order statistic
of the fused statistic over a null reference sample, and rejection is
strict: fused > cv.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SIGMA_FLOOR",
    "WeightScheme",
    "NullReference",
    "DetectionResult",
    "equal_weights",
    "adaptive_weights",
    "fuse",
    "critical_value",
    "test_at",
    "power",
]

# Simulation nulls can be degenerate for sparse features; never divide by
# anything smaller than this.
SIGMA_FLOOR = 1e-8

SCHEME_KINDS = ("equal", "adaptive")


@dataclass(frozen=True)
class WeightScheme:
    """Weighting kind plus the 1-based feature ids being fused."""

    kind: str
    subset: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise ValueError(f"unknown weighting kind {self.kind!r}")
        subset = tuple(int(i) for i in self.subset)
        if not subset:
            raise ValueError("feature subset must be non-empty")
        if len(set(subset)) != len(subset):
            raise ValueError(f"feature subset has duplicates: {subset}")
        for i in subset:
            if not (1 <= i <= 9):
                raise ValueError(f"feature id {i} outside 1..9")
        object.__setattr__(self, "subset", subset)

    @property
    def columns(self) -> np.ndarray:
        """0-based column indices into a full feature matrix."""
        return np.asarray(self.subset, dtype=np.intp) - 1


@dataclass(frozen=True)
class NullReference:
    """Null sample of standardized feature vectors with its mean/std."""

    samples: np.ndarray
    mu0: np.ndarray
    sigma0: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "NullReference":
        s = np.asarray(samples, dtype=float)
        if s.ndim != 2:
            raise ValueError(f"expected a 2-d null sample, got shape {s.shape}")
        if s.shape[0] < 2:
            raise ValueError(f"need at least 2 null samples, got {s.shape[0]}")
        return cls(samples=s, mu0=s.mean(axis=0), sigma0=s.std(axis=0, ddof=1))


@dataclass(frozen=True)
class DetectionResult:
    """Outcome of one fused test at one time point."""

    t: int | None
    scheme: str
    subset: tuple[int, ...]
    fused: float
    weights: tuple[float, ...] = field(repr=False)
    cv: float
    reject: bool
    alpha: float


def equal_weights(d_prime: int) -> np.ndarray:
    if d_prime < 1:
        raise ValueError(f"fusion dimension must be >= 1, got {d_prime}")
    return np.full(d_prime, 1.0 / d_prime)


def adaptive_weights(s_test, ref: NullReference) -> np.ndarray:
    """Per-feature |deviation from null mean| / null std, floored."""
    s = np.asarray(s_test, dtype=float)
    if s.shape != ref.mu0.shape:
        raise ValueError(f"shape mismatch: test {s.shape} vs null {ref.mu0.shape}")
    return np.abs(s - ref.mu0) / np.maximum(ref.sigma0, SIGMA_FLOOR)


def fuse(s, w) -> float:
    s = np.asarray(s, dtype=float)
    w = np.asarray(w, dtype=float)
    if s.shape != w.shape:
        raise ValueError(f"shape mismatch: values {s.shape} vs weights {w.shape}")
    return float(s @ w)


def critical_value(null_fused, alpha: float) -> float:
    """Empirical (1 - alpha) quantile as the ceil((1-alpha) N)-th order
    statistic, no interpolation, so thresholds are exactly reproducible."""
    a = np.asarray(null_fused, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("cannot take a quantile of an empty sample")
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    k = math.ceil((1.0 - alpha) * a.size)
    return float(np.partition(a, k - 1)[k - 1])


def _select(s_test, null_s, scheme: WeightScheme) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(s_test, dtype=float)
    nl = np.asarray(null_s, dtype=float)
    if s.ndim != 1 or nl.ndim != 2 or s.shape[0] != nl.shape[1]:
        raise ValueError(
            f"dimension mismatch: test {s.shape} vs null {nl.shape}"
        )
    cols = scheme.columns
    if cols.max() >= s.shape[0]:
        raise ValueError(
            f"subset {scheme.subset} does not fit a {s.shape[0]}-feature matrix"
        )
    return s[cols], nl[:, cols]


def test_at(s_test, null_s, scheme: WeightScheme, alpha: float, t: int | None = None) -> DetectionResult:
    """Run the fused hypothesis test for one standardized point.

    Adaptive weights come from the tested point against the null sample's
    mean/std, and the same weight vector is applied to every null row to
    build the fused null distribution; the decision boundary therefore
    depends on the tested point. Equal weighting uses the fixed 1/d'
    vector through the same pipeline.
    """
    sub_test, sub_null = _select(s_test, null_s, scheme)
    if scheme.kind == "adaptive":
        ref = NullReference.from_samples(sub_null)
        w = adaptive_weights(sub_test, ref)
    else:
        w = equal_weights(len(scheme.subset))
    fused_null = sub_null @ w
    cv = critical_value(fused_null, alpha)
    fused = fuse(sub_test, w)
    return DetectionResult(
        t=t,
        scheme=scheme.kind,
        subset=scheme.subset,
        fused=fused,
        weights=tuple(float(x) for x in w),
        cv=cv,
        reject=bool(fused > cv),
        alpha=alpha,
    )


def power(null_s, alt_s, scheme: WeightScheme, alpha: float, *, chunk: int = 1024) -> float:
    """Fraction of alternative rows rejected against the null sample.

    Vectorized equivalent of running test_at on every alternative row;
    adaptive weighting recomputes weights (and hence the critical value)
    per row, chunked to bound memory.
    """
    nl = np.asarray(null_s, dtype=float)
    al = np.asarray(alt_s, dtype=float)
    if nl.ndim != 2 or al.ndim != 2 or nl.shape[1] != al.shape[1]:
        raise ValueError(f"dimension mismatch: null {nl.shape} vs alt {al.shape}")
    if nl.shape[0] == 0 or al.shape[0] == 0:
        raise ValueError("null and alternative samples must be non-empty")
    cols = scheme.columns
    if cols.max() >= nl.shape[1]:
        raise ValueError(
            f"subset {scheme.subset} does not fit a {nl.shape[1]}-feature matrix"
        )
    nl = nl[:, cols]
    al = al[:, cols]
    n_null = nl.shape[0]
    k = math.ceil((1.0 - alpha) * n_null)

    if scheme.kind == "equal":
        w = equal_weights(len(scheme.subset))
        cv = float(np.partition(nl @ w, k - 1)[k - 1])
        return float(np.mean(al @ w > cv))

    mu0 = nl.mean(axis=0)
    sigma0 = np.maximum(nl.std(axis=0, ddof=1), SIGMA_FLOOR)
    weights = np.abs(al - mu0) / sigma0
    fused_test = np.einsum("ij,ij->i", al, weights)
    rejects = 0
    for lo in range(0, al.shape[0], chunk):
        w_chunk = weights[lo : lo + chunk]
        fused_null = nl @ w_chunk.T
        cvs = np.partition(fused_null, k - 1, axis=0)[k - 1]
        rejects += int(np.count_nonzero(fused_test[lo : lo + chunk] > cvs))
    return rejects / al.shape[0]
