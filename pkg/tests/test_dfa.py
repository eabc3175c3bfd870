import math

import numpy as np
import pytest

import lrdkit as lk
from lrdkit.dfa import (
    DEFAULT_MIN_SCALE,
    decade_scale_grid,
    dfa_fluctuation,
    dfa_hurst,
    fluctuation_function,
)
from lrdkit.errors import DegenerateScaleError, InvalidInputError

from oracles import dfa_fluct_naive

SAWTOOTH_F4 = 0.4472135954999579


class TestScaleGrid:
    def test_default_grid_values(self):
        expected = [10, 12, 15, 19, 25, 31, 39, 50, 63, 79,
                    100, 125, 158, 199, 251, 316, 398]
        assert decade_scale_grid(10, 500).tolist() == expected

    def test_grid_stops_at_max_scale(self):
        grid = decade_scale_grid(10, 100)
        assert grid[-1] == 100
        assert grid[0] == 10

    def test_duplicates_collapse(self):
        grid = decade_scale_grid(4, 12, step=0.05)
        assert grid[0] == 4
        assert np.all(np.diff(grid) > 0)

    def test_minimum_scale_boundary(self):
        with pytest.raises(InvalidInputError):
            decade_scale_grid(3, 100)

    def test_decreasing_bounds_rejected(self):
        with pytest.raises(InvalidInputError):
            decade_scale_grid(20, 10)


class TestFluctuation:
    def test_sawtooth_hand_value(self):
        x = [1.0, -1.0] * 4
        assert dfa_fluctuation(x, 4) == pytest.approx(SAWTOOTH_F4, rel=1e-12)
        assert dfa_fluctuation(x, 4) == pytest.approx(
            dfa_fluct_naive(x, 4), rel=1e-12
        )

    def test_constant_series_is_zero(self):
        assert dfa_fluctuation([3.0] * 64, 8) == 0.0

    def test_matches_naive_on_random_data(self):
        rng = np.random.default_rng(10)
        for _ in range(5):
            n = int(rng.integers(100, 400))
            x = rng.standard_normal(n)
            scale = int(rng.integers(4, n // 2 + 1))
            assert dfa_fluctuation(x, scale) == pytest.approx(
                dfa_fluct_naive(x, scale), rel=1e-9
            )

    def test_scale_out_of_range(self):
        x = np.arange(40.0)
        with pytest.raises(InvalidInputError):
            dfa_fluctuation(x, 3)
        with pytest.raises(InvalidInputError):
            dfa_fluctuation(x, 21)

    def test_scaling_ratio_tracks_hurst(self):
        ratios = []
        for seed in range(20):
            series = lk.generate_fgn(lk.FgnSpec(h=0.8, length=8192, seed=seed))
            ratios.append(
                math.log10(dfa_fluctuation(series, 100) / dfa_fluctuation(series, 10))
            )
        assert np.mean(ratios) == pytest.approx(0.8, abs=0.1)


class TestFluctuationFunction:
    def test_boxes_per_scale(self):
        x = np.random.default_rng(11).standard_normal(100)
        result = fluctuation_function(x, [4, 10, 25])
        assert result.boxes_per_scale.tolist() == [50, 20, 8]

    def test_default_grid_respects_length(self):
        x = np.random.default_rng(12).standard_normal(200)
        result = fluctuation_function(x)
        assert result.scales[0] == DEFAULT_MIN_SCALE
        assert result.scales[-1] <= 40

    def test_non_increasing_grid_rejected(self):
        x = np.random.default_rng(13).standard_normal(100)
        with pytest.raises(InvalidInputError):
            fluctuation_function(x, [10, 10, 20])

    def test_empty_grid_rejected(self):
        x = np.random.default_rng(14).standard_normal(100)
        with pytest.raises(InvalidInputError):
            fluctuation_function(x, [])


class TestHurst:
    def test_recovers_white_noise_exponent(self):
        estimates = [
            dfa_hurst(np.random.default_rng(seed).standard_normal(4096)).h
            for seed in range(10)
        ]
        assert np.mean(estimates) == pytest.approx(0.5, abs=0.05)

    def test_cumulated_noise_gains_about_one(self):
        shifts = []
        for seed in range(5):
            x = np.random.default_rng(100 + seed).standard_normal(4096)
            shifts.append(dfa_hurst(np.cumsum(x)).h - dfa_hurst(x).h)
        assert 0.85 <= np.mean(shifts) <= 1.15

    def test_affine_invariance(self):
        x = np.random.default_rng(15).standard_normal(1024)
        base = dfa_hurst(x)
        shifted = dfa_hurst(5.0 * x - 7.0)
        assert shifted.h == pytest.approx(base.h, abs=1e-10)

    def test_doubling_shifts_intercept_by_log2(self):
        x = np.random.default_rng(16).standard_normal(1024)
        base = dfa_hurst(x)
        doubled = dfa_hurst(2.0 * x)
        assert doubled.h == pytest.approx(base.h, abs=1e-10)
        assert doubled.intercept - base.intercept == pytest.approx(
            math.log10(2.0), abs=1e-10
        )

    def test_r_squared_high_for_clean_scaling(self):
        series = lk.generate_fgn(lk.FgnSpec(h=0.7, length=8192, seed=0))
        estimate = dfa_hurst(series)
        assert 0.98 <= estimate.r_squared <= 1.0
        assert estimate.fluctuation.scales.size >= 5

    def test_too_short_series(self):
        with pytest.raises(InvalidInputError):
            dfa_hurst(np.random.default_rng(17).standard_normal(49))

    def test_narrow_grid_rejected(self):
        x = np.random.default_rng(18).standard_normal(200)
        with pytest.raises(InvalidInputError):
            dfa_hurst(x, min_scale=10, max_scale=15)

    def test_constant_series_degenerate(self):
        with pytest.warns(UserWarning):
            with pytest.raises(DegenerateScaleError):
                dfa_hurst([2.0] * 400)
