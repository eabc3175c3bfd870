"""Amplitude-adjusted Fourier transform surrogates and significance tests.

A surrogate keeps the exact value multiset and approximately the power
spectrum of its source while destroying any cross-dependence with other
series (Theiler et al. 1992). Construction runs in three steps: reorder a
sorted Gaussian sample by the ranks of the data, randomize the phases of
its Fourier transform under Hermitian symmetry, then reorder the original
values by the ranks of the phase-randomized intermediate.

Significance of a coefficient curve is judged two-sided against an
ensemble of independent surrogate pairs, with an add-one p-value. Each
surrogate pair draws from a per-index substream of the seed, so the
ensemble is reproducible no matter how the loop is scheduled.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .series import TimeSeries, as_values
from .xcorr import METHODS, ScaleCorrelogram, _coefficient_curve, _validate_grid, _validate_pair

__all__ = [
    "SurrogateConfig",
    "AverageCoefficient",
    "aaft_surrogate",
    "xcorr_significance",
    "average_coefficient",
]


@dataclass(frozen=True)
class SurrogateConfig:
    """Ensemble parameters for surrogate-based p-values.

    Fewer than 100 surrogates would make the reported p-values too coarse
    and are rejected.
    """

    n_surrogates: int = 1000
    seed: int = 0
    significance_level: float = 0.10
    n_jobs: int = 1

    def __post_init__(self) -> None:
        if self.n_surrogates < 100:
            raise InvalidInputError(
                f"need at least 100 surrogates for p-values, got {self.n_surrogates}"
            )
        if not 0.0 < self.significance_level < 1.0:
            raise InvalidInputError(
                f"significance level must lie in (0, 1), got {self.significance_level}"
            )
        if self.n_jobs < 1:
            raise InvalidInputError("n_jobs must be positive")


class AverageCoefficient(NamedTuple):
    """Grid average of a coefficient curve with its surrogate p-value."""

    mean_rho: float
    std_rho: float
    p_value: float | None


def _phase_randomize(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Randomize Fourier phases, keeping the amplitude spectrum.

    The zero-frequency bin is untouched and, for even lengths, the Nyquist
    bin only flips sign so the inverse transform stays real.
    """
    n = values.size
    spectrum = np.fft.rfft(values)
    phases = rng.uniform(0.0, 2.0 * np.pi, spectrum.size)
    rotation = np.exp(1j * phases)
    rotation[0] = 1.0
    if n % 2 == 0:
        rotation[-1] = 1.0 if phases[-1] < np.pi else -1.0
    return np.fft.irfft(spectrum * rotation, n)


def _aaft_values(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    ranks = values.argsort().argsort()
    gaussian = np.sort(rng.standard_normal(values.size))
    randomized = _phase_randomize(gaussian[ranks], rng)
    return np.sort(values)[randomized.argsort().argsort()]


def aaft_surrogate(series, rng: np.random.Generator) -> TimeSeries:
    """One amplitude-adjusted Fourier transform surrogate.

    The output holds exactly the input's values in a new order, so its
    mean, variance, and every other marginal moment are preserved. Dates
    and label carry over unchanged.
    """
    values = as_values(series, min_length=8)
    surrogate = _aaft_values(values, rng)
    if isinstance(series, TimeSeries):
        return TimeSeries(surrogate, label=series.label, dates=series.dates)
    return TimeSeries(surrogate)


def xcorr_significance(
    x,
    y,
    method: str,
    scales=None,
    config: SurrogateConfig | None = None,
) -> ScaleCorrelogram:
    """Surrogate significance of a cross-correlation coefficient curve.

    Builds ``config.n_surrogates`` independent surrogate pairs, evaluates
    the coefficient curve on each, and attaches two-sided add-one p-values
    to the observed correlogram. A grid point where the observed
    coefficient is degenerate gets p = 1 and a flag instead of an error;
    degenerate surrogate values count as exceedances, which can only
    enlarge a p-value.
    """
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}, got {method!r}")
    if config is None:
        config = SurrogateConfig()
    xv, yv = _validate_pair(x, y)
    grid = _validate_grid(scales, method, xv.size)
    rho_observed = _coefficient_curve(xv, yv, method, grid)
    flagged = np.isnan(rho_observed)
    if flagged.any():
        where = ", ".join(str(int(s)) for s in grid[flagged])
        warnings.warn(f"degenerate scales forced p = 1 at: {where}")

    children = np.random.SeedSequence(config.seed).spawn(config.n_surrogates)

    def one_pair(index: int) -> np.ndarray:
        rng = np.random.default_rng(children[index])
        surrogate_x = _aaft_values(xv, rng)
        surrogate_y = _aaft_values(yv, rng)
        return _coefficient_curve(surrogate_x, surrogate_y, method, grid)

    if config.n_jobs == 1:
        rows = [one_pair(i) for i in range(config.n_surrogates)]
    else:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            chunk = max(1, config.n_surrogates // (4 * config.n_jobs))
            rows = list(pool.map(one_pair, range(config.n_surrogates), chunksize=chunk))
    surrogate_rho = np.vstack(rows)

    with np.errstate(invalid="ignore"):
        exceed = np.abs(surrogate_rho) >= np.abs(rho_observed)[None, :]
    exceed |= np.isnan(surrogate_rho)
    counts = exceed.sum(axis=0)
    p_values = (1.0 + counts) / (1.0 + config.n_surrogates)
    p_values[flagged] = 1.0
    return ScaleCorrelogram(
        method=method,
        scales=grid,
        rho=rho_observed,
        p_values=p_values,
        flagged=flagged,
        surrogate_rho=surrogate_rho,
    )


def average_coefficient(correlogram: ScaleCorrelogram) -> AverageCoefficient:
    """Mean and spread of a coefficient curve across its grid.

    The standard deviation is the population value over the grid points.
    When the correlogram carries a surrogate ensemble, the mean's two-sided
    p-value compares against the distribution of surrogate grid means;
    otherwise ``p_value`` is ``None``. Flagged grid points are excluded.
    """
    if correlogram.scales.size == 0:
        raise InvalidInputError("correlogram has an empty grid")
    if correlogram.flagged is not None:
        mask = ~correlogram.flagged
    else:
        mask = np.ones(correlogram.scales.size, dtype=bool)
    if not mask.any():
        raise InvalidInputError("every grid point is degenerate")
    observed = correlogram.rho[mask]
    mean_rho = float(observed.mean())
    std_rho = float(observed.std())
    if correlogram.surrogate_rho is None:
        return AverageCoefficient(mean_rho, std_rho, None)
    surrogate = correlogram.surrogate_rho[:, mask]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        surrogate_means = np.nanmean(surrogate, axis=1)
    with np.errstate(invalid="ignore"):
        exceed = np.abs(surrogate_means) >= abs(mean_rho)
    exceed |= np.isnan(surrogate_means)
    p_value = (1.0 + int(exceed.sum())) / (1.0 + surrogate.shape[0])
    return AverageCoefficient(mean_rho, std_rho, p_value)
