"""Detrended fluctuation analysis with a two-sided box split.

The profile is cut into floor(T / s) non-overlapping boxes of length s from
the start and another floor(T / s) boxes counted backwards from the end, so
every scale uses 2 * floor(T / s) boxes in total. Each box is detrended by
an ordinary least squares line and the fluctuation function is the root mean
square of the residuals pooled over all boxes. The Hurst exponent is the
log-log slope of the fluctuation function over a grid of scales spaced a
tenth of a decade apart.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateScaleError, InvalidInputError
from .series import as_values

__all__ = [
    "DEFAULT_MIN_SCALE",
    "DEFAULT_MAX_SCALE",
    "FluctuationFunction",
    "HurstEstimate",
    "decade_scale_grid",
    "dfa_fluctuation",
    "fluctuation_function",
    "dfa_hurst",
]

DEFAULT_MIN_SCALE = 10
DEFAULT_MAX_SCALE = 500


@dataclass(frozen=True, eq=False)
class FluctuationFunction:
    """Fluctuation values over a grid of scales.

    ``boxes_per_scale[i]`` counts the boxes pooled at ``scales[i]``, which
    is twice the number of complete boxes that fit into the series.
    """

    scales: np.ndarray
    values: np.ndarray
    boxes_per_scale: np.ndarray


@dataclass(frozen=True, eq=False)
class HurstEstimate:
    """Result of the log-log fit of the fluctuation function.

    ``fluctuation`` keeps the scales and values that entered the fit, ready
    for plotting or CSV export.
    """

    h: float
    intercept: float
    r_squared: float
    fluctuation: FluctuationFunction


def decade_scale_grid(min_scale: int, max_scale: int, step: float = 0.1) -> np.ndarray:
    """Integer scales spaced ``step`` decades apart, duplicates removed.

    Walks exponents from log10(min_scale) upward while they do not exceed
    log10(max_scale) and floors 10**e at each step. Consecutive collisions
    collapse, so the result is strictly increasing.
    """
    if min_scale < 4:
        raise InvalidInputError(f"minimum scale must be at least 4, got {min_scale}")
    if max_scale < min_scale:
        raise InvalidInputError(
            f"maximum scale {max_scale} is below minimum scale {min_scale}"
        )
    if step <= 0:
        raise InvalidInputError("step must be positive")
    start = math.log10(min_scale)
    stop = math.log10(max_scale)
    scales: list[int] = []
    k = 0
    while True:
        exponent = start + k * step
        if exponent > stop + 1e-12:
            break
        raw = 10.0 ** exponent
        scale = int(math.floor(raw + 1e-9 * max(1.0, raw)))
        if not scales or scale != scales[-1]:
            scales.append(scale)
        k += 1
    return np.asarray(scales, dtype=int)


def _profile_values(values: np.ndarray) -> np.ndarray:
    return np.cumsum(values - values.mean())


def _box_residuals(profile: np.ndarray, scale: int) -> np.ndarray:
    """Residuals of per-box linear fits, one row per box.

    Stacks floor(n / scale) forward boxes and the same number of backward
    boxes, then removes each row's least squares line in closed form.
    """
    n = profile.size
    n_boxes = n // scale
    used = n_boxes * scale
    segments = np.concatenate(
        [profile[:used].reshape(n_boxes, scale),
         profile[n - used:].reshape(n_boxes, scale)],
        axis=0,
    )
    positions = np.arange(1.0, scale + 1.0)
    pos_centered = positions - positions.mean()
    denom = pos_centered @ pos_centered
    centered = segments - segments.mean(axis=1, keepdims=True)
    slopes = (centered @ pos_centered) / denom
    return centered - slopes[:, None] * pos_centered[None, :]


def _mean_square(residuals: np.ndarray) -> float:
    return float(np.mean(residuals * residuals))


def _check_scale(scale: int, n: int) -> None:
    if scale != int(scale) or not 4 <= int(scale) <= n // 2:
        raise InvalidInputError(
            f"scale must be an integer in [4, {n // 2}] for length {n}, got {scale}"
        )


def dfa_fluctuation(series, scale: int) -> float:
    """Root mean square detrended fluctuation at one scale.

    Zero only when the profile is exactly linear inside every box, which
    for real data means a constant series.
    """
    x = as_values(series, min_length=8)
    _check_scale(scale, x.size)
    residuals = _box_residuals(_profile_values(x), int(scale))
    return math.sqrt(_mean_square(residuals))


def fluctuation_function(series, scales=None) -> FluctuationFunction:
    """Fluctuation values over a scale grid.

    With ``scales=None`` a default tenth-of-a-decade grid from 10 to
    min(500, T // 5) is used. Explicit grids must be strictly increasing
    integers inside [4, T // 2].
    """
    x = as_values(series, min_length=8)
    n = x.size
    if scales is None:
        scales = decade_scale_grid(DEFAULT_MIN_SCALE, min(DEFAULT_MAX_SCALE, n // 5))
    scales = np.asarray(scales, dtype=int)
    if scales.size == 0:
        raise InvalidInputError("scale grid is empty")
    if np.any(np.diff(scales) <= 0):
        raise InvalidInputError("scale grid must be strictly increasing")
    for s in scales:
        _check_scale(int(s), n)
    profile = _profile_values(x)
    values = np.empty(scales.size)
    boxes = np.empty(scales.size, dtype=int)
    for i, s in enumerate(scales):
        values[i] = math.sqrt(_mean_square(_box_residuals(profile, int(s))))
        boxes[i] = 2 * (n // int(s))
    return FluctuationFunction(scales=scales, values=values, boxes_per_scale=boxes)


def dfa_hurst(series, min_scale: int = DEFAULT_MIN_SCALE, max_scale: int | None = None) -> HurstEstimate:
    """Estimate the Hurst exponent from the fluctuation function slope.

    Parameters
    ----------
    series : TimeSeries or array_like
        At least ``5 * min_scale`` observations.
    min_scale, max_scale : int
        Grid bounds. ``max_scale`` defaults to min(500, T // 5).

    Raises
    ------
    InvalidInputError
        If the series is too short or the grid holds fewer than 5 scales.
    DegenerateScaleError
        If zero-fluctuation scales leave fewer than 5 usable points.
    """
    x = as_values(series, min_length=8)
    n = x.size
    if n < 5 * min_scale:
        raise InvalidInputError(
            f"need at least {5 * min_scale} observations for min_scale {min_scale}, got {n}"
        )
    if max_scale is None:
        max_scale = min(DEFAULT_MAX_SCALE, n // 5)
    grid = decade_scale_grid(min_scale, max_scale)
    if grid.size < 5:
        raise InvalidInputError(
            f"scale grid from {min_scale} to {max_scale} holds only {grid.size} scales, need 5"
        )
    fluct = fluctuation_function(x, grid)
    usable = fluct.values > 0.0
    if not np.all(usable):
        dropped = ", ".join(str(int(s)) for s in fluct.scales[~usable])
        warnings.warn(f"dropping zero-fluctuation scales: {dropped}")
        if int(usable.sum()) < 5:
            raise DegenerateScaleError(
                f"only {int(usable.sum())} scales with positive fluctuation, need 5"
            )
        fluct = FluctuationFunction(
            scales=fluct.scales[usable],
            values=fluct.values[usable],
            boxes_per_scale=fluct.boxes_per_scale[usable],
        )
    log_s = np.log10(fluct.scales.astype(float))
    log_f = np.log10(fluct.values)
    ls_centered = log_s - log_s.mean()
    slope = float((ls_centered @ log_f) / (ls_centered @ ls_centered))
    intercept = float(log_f.mean() - slope * log_s.mean())
    residuals = log_f - (intercept + slope * log_s)
    ss_res = float(residuals @ residuals)
    lf_centered = log_f - log_f.mean()
    ss_tot = float(lf_centered @ lf_centered)
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res == 0.0 else 0.0
    else:
        r_squared = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return HurstEstimate(h=slope, intercept=intercept, r_squared=r_squared, fluctuation=fluct)
