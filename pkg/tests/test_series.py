"""Core data model: alignment, transforms, and their invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from climattr import (
    CovariateRole,
    TimeSeries,
    align,
    anomalies,
    baseline_shift,
    climatological_mean,
    series_range,
    sum_series,
)
from climattr.exceptions import (
    DataError,
    EmptyOverlapError,
    WindowOutOfRangeError,
    YearNotFoundError,
)


def ts(name, start, values, unit="degC"):
    years = np.arange(start, start + len(values))
    return TimeSeries(name, unit, years, np.asarray(values, dtype=float))


class TestTimeSeries:
    def test_rejects_duplicate_years(self):
        with pytest.raises(DataError):
            TimeSeries("a", "degC", [1900, 1900, 1901], [1.0, 2.0, 3.0])

    def test_rejects_decreasing_years(self):
        with pytest.raises(DataError):
            TimeSeries("a", "degC", [1902, 1901], [1.0, 2.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(DataError):
            TimeSeries("a", "degC", [1900, 1901], [1.0])

    def test_value_at_missing_year(self):
        s = ts("a", 1900, [1, 2, 3])
        with pytest.raises(YearNotFoundError):
            s.value_at(1890)

    def test_immutable_arrays(self):
        s = ts("a", 1900, [1, 2, 3])
        with pytest.raises(ValueError):
            s.values[0] = 99.0


class TestAlign:
    def test_span_intersection(self):
        a = ts("A", 1900, np.zeros(116))  # 1900-2015
        b = ts("B", 1950, np.zeros(71))   # 1950-2020
        d = align([a, b])
        assert d.span == (1950, 2015)

    def test_identity_case(self):
        a = ts("A", 1900, np.arange(116.0))
        b = ts("B", 1900, np.arange(116.0) * 2)
        d = align([a, b])
        assert d.span == (1900, 2015)
        assert d.n_dropped == 0
        assert len(d.response) == 116

    def test_listwise_deletion_of_missing(self):
        # 1900-1910 is 11 years; B misses 1905 so 10 rows survive
        a = ts("A", 1900, np.arange(11.0))
        b_vals = np.arange(11.0)
        b_vals[5] = np.nan
        b = ts("B", 1900, b_vals)
        d = align([a, b])
        assert len(d.response) == 10
        assert d.n_dropped == 1
        assert 1905 not in d.times
        # remaining rows keep their original values, enumerated by hand
        assert list(d.times) == [1900, 1901, 1902, 1903, 1904,
                                 1906, 1907, 1908, 1909, 1910]
        assert list(d.response.values) == [0, 1, 2, 3, 4, 6, 7, 8, 9, 10]

    def test_empty_overlap(self):
        with pytest.raises(EmptyOverlapError):
            align([ts("A", 1900, [1, 2]), ts("B", 1990, [1, 2])])

    def test_roles_attached(self):
        d = align(
            [ts("Y", 1900, [1, 2, 3]), ts("F", 1900, [1, 2, 3]),
             ts("D", 1900, [4, 5, 6])],
            roles=[CovariateRole.FORCED, CovariateRole.DRIVER],
        )
        assert d.role("F") == CovariateRole.FORCED
        assert d.role("D") == CovariateRole.DRIVER

    def test_idempotent(self):
        a = ts("A", 1900, [1.0, 2.0, np.nan, 4.0, 5.0])
        b = ts("B", 1901, [1.0, 2.0, 3.0, 4.0, 5.0])
        d1 = align([a, b])
        aligned_series = [d1.response] + [s for s, _ in d1.covariates]
        d2 = align(aligned_series, roles=[r for _, r in d1.covariates])
        assert np.array_equal(d1.times, d2.times)
        assert np.array_equal(d1.response.values, d2.response.values)
        assert d2.n_dropped == 0


class TestAnomalies:
    def test_mean_centering(self):
        s = anomalies(ts("a", 2000, [1, 2, 3]), 2000, 2002)
        assert np.allclose(s.values, [-1, 0, 1])

    def test_constant_series_goes_to_zero(self):
        s = anomalies(ts("a", 2000, [7.5] * 5), 2000, 2004)
        assert np.all(s.values == 0.0)

    def test_partial_window_hand_arithmetic(self):
        # baseline over first two years: mean(2, 4) = 3
        s = anomalies(ts("a", 2000, [2, 4, 6, 8]), 2000, 2001)
        assert np.allclose(s.values, [-1, 1, 3, 5])

    def test_window_out_of_range(self):
        with pytest.raises(WindowOutOfRangeError):
            anomalies(ts("a", 2000, [1, 2, 3]), 1990, 1995)

    @given(
        values=st.lists(st.floats(-100, 100), min_size=3, max_size=40),
        data=st.data(),
    )
    @settings(max_examples=50, deadline=None)
    def test_anomalies_then_mean_is_zero(self, values, data):
        s = ts("a", 1900, values)
        start = data.draw(st.integers(1900, 1900 + len(values) - 1))
        end = data.draw(st.integers(start, 1900 + len(values) - 1))
        out = anomalies(s, start, end)
        assert abs(climatological_mean(out, start, end)) < 1e-12


class TestBaselineShift:
    def test_offset_removal(self):
        s = baseline_shift(ts("a", 1900, [5, 7, 9]), 1900)
        assert np.allclose(s.values, [0, 2, 4])

    def test_zero_at_reference_even_at_minimum(self):
        s = baseline_shift(ts("a", 1900, [3, 1, 2]), 1901)
        assert s.value_at(1901) == 0.0

    def test_year_not_found(self):
        with pytest.raises(YearNotFoundError):
            baseline_shift(ts("a", 1900, [1, 2]), 1890)


class TestClimatologicalMean:
    def test_constant(self):
        assert climatological_mean(ts("a", 1900, [4.2] * 10), 1903, 1907) == 4.2

    def test_simple(self):
        assert climatological_mean(ts("a", 1900, [1, 2, 3]), 1900, 1902) == 2.0


class TestSeriesRange:
    def test_simple(self):
        assert series_range(ts("a", 1900, [3, 1, 2])) == (1.0, 3.0)

    def test_constant(self):
        lo, hi = series_range(ts("a", 1900, [5, 5, 5]))
        assert lo == hi == 5.0

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50), st.randoms())
    @settings(max_examples=50, deadline=None)
    def test_permutation_invariant(self, values, rnd):
        shuffled = list(values)
        rnd.shuffle(shuffled)
        assert series_range(ts("a", 1900, values)) == series_range(
            ts("b", 1900, shuffled)
        )


class TestSumSeries:
    def test_pointwise(self):
        s = sum_series(ts("a", 1900, [1, 2]), ts("b", 1900, [10, 20]))
        assert np.allclose(s.values, [11, 22])

    def test_unit_mismatch(self):
        with pytest.raises(DataError):
            sum_series(ts("a", 1900, [1], unit="degC"),
                       ts("b", 1900, [1], unit="W m-2"))

    def test_time_mismatch(self):
        with pytest.raises(DataError):
            sum_series(ts("a", 1900, [1, 2]), ts("b", 1901, [1, 2]))
