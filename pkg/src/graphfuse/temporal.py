"""Windowed standardization of feature series against their recent past.

A feature value at time t is z-scored against the mean and sample
standard deviation of the preceding ell values (the value at t itself
is excluded from the window). Time indices are 1-based throughout, so
the first standardized value sits at t = ell + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "WindowParams",
    "NormalizedFeatures",
    "InsufficientHistoryError",
    "running_stats",
    "normalize",
    "vertex_standardize",
]


@dataclass(frozen=True)
class WindowParams:
    """Window length and the cap applied when the window variance is zero."""

    ell: int = 5
    sigma_cap: float = 10.0

    def __post_init__(self) -> None:
        if self.ell < 2:
            raise ValueError(f"window length must be >= 2, got {self.ell}")
        if self.sigma_cap <= 0:
            raise ValueError(f"sigma cap must be positive, got {self.sigma_cap}")


class InsufficientHistoryError(ValueError):
    """Raised when a window reaches past the start of the series."""

    def __init__(self, required: int, available: int, what: str = "window"):
        super().__init__(
            f"insufficient history for {what}: need {required} past values, "
            f"have {available}"
        )
        self.required = required
        self.available = available


@dataclass(frozen=True)
class NormalizedFeatures:
    """Standardized feature values plus the window that produced them.

    ``s`` has the same shape as the raw input; entries before the first
    valid time are NaN. ``valid_range`` is the inclusive 1-based span of
    defined time steps.
    """

    s: np.ndarray
    window: WindowParams
    valid_range: tuple[int, int]

    def at_time(self, t: int) -> np.ndarray:
        first, last = self.valid_range
        if not (first <= t <= last):
            raise ValueError(f"time {t} outside valid range [{first}, {last}]")
        return self.s[..., t - 1, :]


def running_stats(series, t: int, ell: int) -> tuple[float, float]:
    """Mean and sample std of the ell values before time t (1-based).

    The window is series[t-ell .. t-1]; the value at t itself is not
    part of it. Sample std uses divisor ell - 1.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-d series, got shape {x.shape}")
    if ell < 2:
        raise ValueError(f"window length must be >= 2, got {ell}")
    if t - ell < 1:
        raise InsufficientHistoryError(required=ell, available=max(t - 1, 0))
    if t - 1 > len(x):
        raise InsufficientHistoryError(required=t - 1, available=len(x))
    w = x[t - 1 - ell : t - 1]
    return float(w.mean()), float(w.std(ddof=1))


def normalize(features, params: WindowParams, first_valid_t: int = 1) -> NormalizedFeatures:
    """Standardize every feature independently against its trailing window.

    ``features`` is (t_max, d) for one series or (M, t_max, d) for a
    batch of replicates; replicates normalize independently. Where the
    window std is zero the z-score degenerates: 0 if the value equals
    the window mean, otherwise +/- sigma_cap.

    ``first_valid_t`` marks the first time step at which the raw values
    themselves are defined (later than 1 when a feature needed its own
    warm-up); everything before first_valid_t + ell is masked NaN.
    """
    f = np.asarray(features, dtype=float)
    squeeze = f.ndim == 2
    if squeeze:
        f = f[np.newaxis]
    if f.ndim != 3:
        raise ValueError(f"expected (t_max, d) or (M, t_max, d), got shape {f.shape}")
    ell = params.ell
    t_max = f.shape[1]
    if t_max <= ell:
        raise InsufficientHistoryError(required=ell + 1, available=t_max, what="series")

    windows = sliding_window_view(f, ell, axis=1)[:, : t_max - ell]
    mu = windows.mean(axis=-1)
    sd = windows.std(axis=-1, ddof=1)
    cur = f[:, ell:, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        z = (cur - mu) / np.where(sd > 0, sd, 1.0)
        capped = np.sign(cur - mu) * params.sigma_cap
        body = np.where(sd > 0, z, capped)

    s = np.full_like(f, np.nan)
    s[:, ell:, :] = body
    first = first_valid_t + ell
    s[:, : first - 1, :] = np.nan
    if squeeze:
        s = s[0]
    return NormalizedFeatures(s=s, window=params, valid_range=(first, t_max))


def vertex_standardize(locality, params: WindowParams) -> np.ndarray:
    """Standardize a per-vertex statistic over time, then take the max.

    ``locality`` is (t_max, n): one statistic value per vertex per time
    step. Each vertex is z-scored against its own trailing window, with
    the std floored at 1 so silent vertices cannot blow up the ratio;
    the returned series is the per-time max over vertices. Entries
    before t = ell + 1 are NaN.
    """
    psi = np.asarray(locality, dtype=float)
    if psi.ndim != 2:
        raise ValueError(f"expected a (t_max, n) array, got shape {psi.shape}")
    ell = params.ell
    t_max = psi.shape[0]
    if t_max <= ell:
        raise InsufficientHistoryError(required=ell + 1, available=t_max, what="series")

    windows = sliding_window_view(psi, ell, axis=0)[: t_max - ell]
    mu = windows.mean(axis=-1)
    sd = np.maximum(windows.std(axis=-1, ddof=1), 1.0)
    z = (psi[ell:] - mu) / sd
    out = np.full(t_max, np.nan)
    out[ell:] = z.max(axis=1)
    return out
