"""Scale-wise cross-correlation coefficients.

Two detrending schemes share one interface. The DCCA coefficient divides
the detrended covariance of two profiles, computed with the same two-sided
box split as the fluctuation analysis, by the product of the two detrended
fluctuations (Zebende 2011). The DMCA variant replaces the per-box line fit
with residuals against a centered moving average of odd window length,
evaluated only where the window fits entirely inside the series.

The covariance numerator may be negative, so the coefficient lives in
[-1, 1] and is never obtained from a square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dfa import _box_residuals, _mean_square, _profile_values
from .errors import DegenerateScaleError, InvalidInputError
from .series import as_values

__all__ = [
    "DCCA_DEFAULT_SCALES",
    "DMCA_DEFAULT_WINDOWS",
    "METHODS",
    "ScaleCorrelogram",
    "dcca_covariance",
    "dcca_coefficient",
    "dmca_covariance",
    "dmca_coefficient",
    "scan_scales",
]

DCCA_DEFAULT_SCALES = np.arange(10, 251, 10)
DMCA_DEFAULT_WINDOWS = np.arange(11, 252, 10)
METHODS = ("dcca", "dmca")


@dataclass(frozen=True, eq=False)
class ScaleCorrelogram:
    """Coefficients over a scale grid, optionally with surrogate p-values.

    ``flagged`` marks grid points where a degenerate scale forced the
    p-value to one. ``surrogate_rho`` holds the surrogate ensemble behind
    the p-values, one row per surrogate pair, and stays ``None`` for plain
    scans.
    """

    method: str
    scales: np.ndarray
    rho: np.ndarray
    p_values: np.ndarray | None = None
    flagged: np.ndarray | None = None
    surrogate_rho: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}")
        finite = self.rho[np.isfinite(self.rho)]
        if finite.size and float(np.abs(finite).max()) > 1.0 + 1e-9:
            raise InvalidInputError("coefficients must lie in [-1, 1]")


def _validate_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xv = as_values(x, min_length=8)
    yv = as_values(y, min_length=8)
    if xv.size != yv.size:
        raise InvalidInputError(
            f"series lengths differ: {xv.size} vs {yv.size}"
        )
    return xv, yv


def _check_window(window: int, n: int) -> None:
    w = int(window)
    if w != window or not 3 <= w <= n // 2:
        raise InvalidInputError(
            f"window must be an integer in [3, {n // 2}] for length {n}, got {window}"
        )
    if w % 2 == 0:
        raise InvalidInputError(f"window must be odd, got {w}")


def _check_scale(scale: int, n: int) -> None:
    s = int(scale)
    if s != scale or not 4 <= s <= n // 2:
        raise InvalidInputError(
            f"scale must be an integer in [4, {n // 2}] for length {n}, got {scale}"
        )


def _cma_residuals(profile: np.ndarray, window: int) -> np.ndarray:
    """Residuals of the profile against its centered moving average.

    Only positions with a complete window contribute, trimming
    (window - 1) / 2 points at each end.
    """
    half = (window - 1) // 2
    csum = np.concatenate(([0.0], np.cumsum(profile)))
    window_means = (csum[window:] - csum[:-window]) / window
    return profile[half: profile.size - half] - window_means


def _residual_pair(xv, yv, method, scale):
    px = _profile_values(xv)
    py = _profile_values(yv)
    if method == "dcca":
        return _box_residuals(px, scale), _box_residuals(py, scale)
    return _cma_residuals(px, scale), _cma_residuals(py, scale)


def dcca_covariance(x, y, scale: int) -> float:
    """Detrended covariance of two profiles at one box scale.

    The mean product of the two residual series pooled over all boxes.
    May be negative.
    """
    xv, yv = _validate_pair(x, y)
    _check_scale(scale, xv.size)
    rx, ry = _residual_pair(xv, yv, "dcca", int(scale))
    return float(np.mean(rx * ry))


def dmca_covariance(x, y, window: int) -> float:
    """Moving-average detrended covariance at one odd window length."""
    xv, yv = _validate_pair(x, y)
    _check_window(window, xv.size)
    rx, ry = _residual_pair(xv, yv, "dmca", int(window))
    return float(np.mean(rx * ry))


def _coefficient_from_residuals(rx: np.ndarray, ry: np.ndarray) -> float:
    ms_x = _mean_square(rx)
    ms_y = _mean_square(ry)
    if ms_x == 0.0 or ms_y == 0.0:
        return math.nan
    return float(np.mean(rx * ry)) / (math.sqrt(ms_x) * math.sqrt(ms_y))


def dcca_coefficient(x, y, scale: int) -> float:
    """DCCA cross-correlation coefficient at one scale.

    Detrended covariance divided by the product of the two detrended
    fluctuations. Raises :class:`DegenerateScaleError` when either
    fluctuation vanishes.
    """
    xv, yv = _validate_pair(x, y)
    _check_scale(scale, xv.size)
    value = _coefficient_from_residuals(*_residual_pair(xv, yv, "dcca", int(scale)))
    if math.isnan(value):
        raise DegenerateScaleError(f"zero fluctuation at scale {int(scale)}")
    return value


def dmca_coefficient(x, y, window: int) -> float:
    """DMCA cross-correlation coefficient at one odd window length."""
    xv, yv = _validate_pair(x, y)
    _check_window(window, xv.size)
    value = _coefficient_from_residuals(*_residual_pair(xv, yv, "dmca", int(window)))
    if math.isnan(value):
        raise DegenerateScaleError(f"zero fluctuation at window {int(window)}")
    return value


def _validate_grid(scales, method: str, n: int) -> np.ndarray:
    if scales is None:
        scales = DCCA_DEFAULT_SCALES if method == "dcca" else DMCA_DEFAULT_WINDOWS
    grid = np.asarray(scales, dtype=int)
    if grid.size == 0:
        raise InvalidInputError("scale grid is empty")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("scale grid must be strictly increasing")
    check = _check_scale if method == "dcca" else _check_window
    for s in grid:
        check(int(s), n)
    return grid


def _coefficient_curve(xv: np.ndarray, yv: np.ndarray, method: str, grid: np.ndarray) -> np.ndarray:
    """Coefficients over a validated grid, NaN at degenerate points."""
    px = _profile_values(xv)
    py = _profile_values(yv)
    residuals = _box_residuals if method == "dcca" else _cma_residuals
    out = np.empty(grid.size)
    for i, s in enumerate(grid):
        out[i] = _coefficient_from_residuals(
            residuals(px, int(s)), residuals(py, int(s))
        )
    return out


def scan_scales(x, y, method: str, scales=None) -> ScaleCorrelogram:
    """Coefficient curve over a grid of scales.

    Parameters
    ----------
    x, y : TimeSeries or array_like
        Equal-length series.
    method : {"dcca", "dmca"}
        Detrending scheme. DMCA grids must contain odd windows only.
    scales : array_like of int, optional
        Strictly increasing grid. Defaults to 10..250 step 10 for DCCA and
        11..251 step 10 for DMCA.

    Degenerate grid points propagate as :class:`DegenerateScaleError`.
    """
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    xv, yv = _validate_pair(x, y)
    grid = _validate_grid(scales, method, xv.size)
    rho = _coefficient_curve(xv, yv, method, grid)
    bad = np.isnan(rho)
    if bad.any():
        where = ", ".join(str(int(s)) for s in grid[bad])
        raise DegenerateScaleError(f"zero fluctuation at scales: {where}")
    return ScaleCorrelogram(method=method, scales=grid, rho=rho)
