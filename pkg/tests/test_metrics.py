import numpy as np
import pytest

from thermrom import DataError, TimeSeries, peak_lag, rmse_percent, rmse_percent_range


def series(values, label="s", t=None):
    values = np.asarray(values, dtype=float)
    if t is None:
        t = np.arange(values.size, dtype=float)
    return TimeSeries(t, values, label)


class TestRmsePercent:
    def test_identical_is_zero(self):
        a = series([10.0, 12.0, 14.0])
        assert rmse_percent(a, a) == 0.0

    def test_constant_with_unit_error(self):
        a = series([10.0, 10.0, 10.0, 10.0])
        b = series([11.0, 9.0, 11.0, 9.0])
        assert rmse_percent(a, b) == 10.0

    def test_scale_invariance(self):
        a = series([10.0, 12.0, 14.0, 16.0])
        b = series([11.0, 11.5, 14.5, 15.0])
        base = rmse_percent(a, b)
        exact = rmse_percent(series(a.v * 4.0), series(b.v * 4.0))
        assert exact == base
        generic = rmse_percent(series(a.v * 3.7), series(b.v * 3.7))
        assert generic == pytest.approx(base, rel=1e-12)

    def test_zero_mean_rejected_with_pointer(self):
        a = series([-1.0, 1.0, -1.0, 1.0])
        b = series([0.0, 0.0, 0.0, 0.0])
        with pytest.raises(DataError, match="rmse_percent_range"):
            rmse_percent(a, b)

    def test_asymmetric_unless_means_match(self):
        a = series([10.0, 12.0, 14.0, 16.0])
        b = series([20.0, 22.0, 24.0, 26.0])
        assert rmse_percent(a, b) != rmse_percent(b, a)
        c = series(a.v[::-1].copy())  # same mean as a
        assert rmse_percent(a, c) == pytest.approx(rmse_percent(c, a), rel=1e-12)

    def test_unnormalized_triangle_bound(self, rng):
        t = np.arange(32, dtype=float)
        for _ in range(100):
            a, b, c = (rng.normal(10, 3, 32) for _ in range(3))
            d_ac = np.sqrt(np.mean((a - c) ** 2))
            d_ab = np.sqrt(np.mean((a - b) ** 2))
            d_bc = np.sqrt(np.mean((b - c) ** 2))
            assert d_ac <= d_ab + d_bc + 1e-12

    def test_misaligned_rejected(self):
        a = series([1.0, 2.0, 3.0])
        b = series([1.0, 2.0, 3.0], t=np.array([0.0, 1.0, 2.5]))
        with pytest.raises(DataError, match="aligned"):
            rmse_percent(a, b)


class TestRmsePercentRange:
    def test_identical_is_zero(self):
        a = series([10.0, 15.0, 20.0])
        assert rmse_percent_range(a, a) == 0.0

    def test_offset_model_over_range_ten(self):
        a = series([10.0, 12.0, 16.0, 20.0])
        b = series(a.v + 1.0)
        assert rmse_percent_range(a, b) == 10.0

    def test_shift_invariance(self):
        a = series([10.0, 12.0, 16.0, 20.0])
        b = series([11.0, 11.0, 17.0, 19.0])
        base = rmse_percent_range(a, b)
        shifted = rmse_percent_range(series(a.v + 100.0), series(b.v + 100.0))
        assert shifted == base

    def test_constant_actual_rejected(self):
        a = series([5.0, 5.0, 5.0])
        b = series([5.0, 6.0, 7.0])
        with pytest.raises(DataError, match="constant"):
            rmse_percent_range(a, b)


class TestPeakLag:
    def test_zero_for_identical(self):
        t = np.arange(100, dtype=float)
        a = series(np.sin(2 * np.pi * t / 24.0) + 10.0)
        assert peak_lag(a, a, 12) == 0

    def test_constructed_shift(self):
        t = np.arange(96, dtype=float)
        base = np.sin(2 * np.pi * t / 24.0)
        a = series(base)
        b = series(np.roll(base, 3))  # periodic: roll right == shift right
        assert peak_lag(a, b, 12) == 3

    def test_quarter_period_sinusoids(self):
        # 90 degrees at period 24 -> 6 samples; brute-force oracle agrees
        t = np.arange(120, dtype=float)
        a = series(np.sin(2 * np.pi * t / 24.0))
        b = series(np.sin(2 * np.pi * (t - 6.0) / 24.0))
        got = peak_lag(a, b, 12)
        assert got == 6

        def oracle(x, y, max_lag):
            n = len(x)
            xv = x.v - x.v.mean()
            yv = y.v - y.v.mean()
            best, best_r = None, -np.inf
            for k in sorted(range(-max_lag, max_lag + 1), key=lambda k: (abs(k), k)):
                xs = xv[: n - k] if k >= 0 else xv[-k:]
                ys = yv[k:] if k >= 0 else yv[: n + k]
                r = np.dot(xs, ys) / (np.linalg.norm(xs) * np.linalg.norm(ys))
                if r > best_r:
                    best, best_r = k, r
            return best

        assert oracle(a, b, 12) == got

    def test_antisymmetry(self, rng):
        t = np.arange(128, dtype=float)
        for _ in range(20):
            phases = rng.uniform(0, 2 * np.pi, 2)
            x = np.sin(2 * np.pi * t / 24.0 + phases[0]) + 0.05 * rng.standard_normal(t.size)
            y = np.sin(2 * np.pi * t / 24.0 + phases[1]) + 0.05 * rng.standard_normal(t.size)
            a, b = series(x), series(y)
            assert peak_lag(a, b, 10) == -peak_lag(b, a, 10)

    def test_constant_series_rejected(self):
        a = series(np.ones(50))
        b = series(np.sin(np.arange(50.0)))
        with pytest.raises(DataError, match="constant"):
            peak_lag(a, b, 5)

    def test_too_short_rejected(self):
        t = np.arange(20, dtype=float)
        a = series(np.sin(t))
        with pytest.raises(DataError, match="short"):
            peak_lag(a, a, 10)
