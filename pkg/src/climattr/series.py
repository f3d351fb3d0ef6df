"""Annual time-series data model and covariate transformations.

Everything downstream (regression, causality tests, extreme-value fits)
operates on :class:`TimeSeries` objects aligned into a :class:`Dataset`. The
time index is integer calendar years; sub-annual data must be aggregated
before entering this package. Missing values are carried as NaN and removed
listwise at alignment, never imputed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import DataError, EmptyOverlapError, YearNotFoundError
from .validation import as_float_array, check_matching_length, check_window, check_years


class CovariateRole(enum.Enum):
    """Causal role of a covariate: externally forced or internal driver."""

    FORCED = "forced"
    DRIVER = "driver"


@dataclass(frozen=True)
class TimeSeries:
    """A named, unit-tagged sequence of annual values.

    Parameters
    ----------
    name : str
        Label used to address the series in fits, scenarios, and reports.
    unit : str
        Opaque unit text, e.g. ``"degC"`` or ``"W m-2"``; no unit algebra is
        performed.
    times : sequence of int
        Strictly increasing calendar years.
    values : sequence of float
        One value per year; NaN flags a missing observation.
    """

    name: str
    unit: str
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = check_years(self.times, name=f"{self.name}.times")
        values = as_float_array(self.values, name=f"{self.name}.values", allow_nan=True)
        check_matching_length(times, values, f"{self.name}.times", f"{self.name}.values")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        self.times.setflags(write=False)
        self.values.setflags(write=False)

    def __len__(self):
        return len(self.times)

    @property
    def span(self) -> tuple[int, int]:
        return int(self.times[0]), int(self.times[-1])

    def value_at(self, year: int) -> float:
        """Value in a given year; raises YearNotFoundError if absent."""
        idx = np.searchsorted(self.times, year)
        if idx >= len(self.times) or self.times[idx] != year:
            raise YearNotFoundError(f"year {year} not present in series {self.name!r}")
        return float(self.values[idx])

    def restrict(self, years: np.ndarray) -> "TimeSeries":
        """Subset to the given years (all of which must be present)."""
        idx = np.searchsorted(self.times, years)
        if np.any(idx >= len(self.times)) or np.any(self.times[idx] != years):
            raise YearNotFoundError(f"requested years missing from series {self.name!r}")
        return TimeSeries(self.name, self.unit, years, self.values[idx])

    def with_values(self, values, name=None) -> "TimeSeries":
        return TimeSeries(name or self.name, self.unit, self.times, values)


@dataclass(frozen=True)
class Dataset:
    """An aligned response series plus role-tagged covariate series.

    Invariant: every member series shares the identical time vector. Build
    datasets with :func:`align` rather than by hand.
    """

    response: TimeSeries
    covariates: tuple[tuple[TimeSeries, CovariateRole], ...]
    n_dropped: int = 0
    auxiliary: tuple[TimeSeries, ...] = field(default=())

    def __post_init__(self):
        for ts, _ in self.covariates:
            if not np.array_equal(ts.times, self.response.times):
                raise DataError(
                    f"covariate {ts.name!r} is not aligned with the response; "
                    "use align()"
                )
        names = [self.response.name] + [ts.name for ts, _ in self.covariates]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate series names in dataset: {names}")

    @property
    def times(self) -> np.ndarray:
        return self.response.times

    @property
    def span(self) -> tuple[int, int]:
        return self.response.span

    @property
    def covariate_names(self) -> tuple[str, ...]:
        return tuple(ts.name for ts, _ in self.covariates)

    def series(self, name: str) -> TimeSeries:
        """Look up the response or any covariate by name."""
        if name == self.response.name:
            return self.response
        for ts, _ in self.covariates:
            if ts.name == name:
                return ts
        raise DataError(f"no series named {name!r} in dataset")

    def role(self, name: str) -> CovariateRole:
        for ts, role in self.covariates:
            if ts.name == name:
                return role
        raise DataError(f"no covariate named {name!r} in dataset")

    def covariate_matrix(self) -> np.ndarray:
        """Covariate values as an (n, k) column-stacked array."""
        return np.column_stack([ts.values for ts, _ in self.covariates])


def align(
    series: Sequence[TimeSeries],
    roles: Sequence[CovariateRole] | None = None,
) -> Dataset:
    """Align series onto their common years, dropping any row with a missing value.

    The first series becomes the dataset response; the remainder become
    covariates. ``roles`` gives one role per covariate and defaults to
    ``DRIVER`` for each.

    Raises
    ------
    EmptyOverlapError
        If the year ranges do not intersect, or every overlapping row has a
        missing value.
    """
    if len(series) < 2:
        raise DataError("align requires at least two series (response + covariate)")
    if roles is None:
        roles = [CovariateRole.DRIVER] * (len(series) - 1)
    if len(roles) != len(series) - 1:
        raise DataError("one role required per covariate series")

    common = series[0].times
    for ts in series[1:]:
        common = np.intersect1d(common, ts.times)
    if common.size == 0:
        raise EmptyOverlapError(
            "series share no common years: "
            + ", ".join(f"{ts.name} {ts.span[0]}-{ts.span[1]}" for ts in series)
        )

    restricted = [ts.restrict(common) for ts in series]
    keep = np.ones(common.size, dtype=bool)
    for ts in restricted:
        keep &= np.isfinite(ts.values)
    n_dropped = int(common.size - keep.sum())
    if not np.any(keep):
        raise EmptyOverlapError("all overlapping rows contain missing values")

    years = common[keep]
    final = [
        TimeSeries(ts.name, ts.unit, years, ts.values[keep]) for ts in restricted
    ]
    return Dataset(
        response=final[0],
        covariates=tuple(zip(final[1:], roles)),
        n_dropped=n_dropped,
    )


def anomalies(s: TimeSeries, baseline_start: int, baseline_end: int) -> TimeSeries:
    """Subtract the mean over [baseline_start, baseline_end] from every value."""
    mask = check_window(baseline_start, baseline_end, s.times,
                        what=f"baseline for {s.name!r}")
    baseline = float(np.nanmean(s.values[mask]))
    if not np.isfinite(baseline):
        raise DataError(f"baseline window for {s.name!r} contains only missing values")
    return s.with_values(s.values - baseline)


def baseline_shift(s: TimeSeries, ref_year: int) -> TimeSeries:
    """Subtract the value in ``ref_year`` so the series is exactly 0 there."""
    ref = s.value_at(ref_year)
    if not np.isfinite(ref):
        raise DataError(f"reference year {ref_year} of {s.name!r} is missing")
    return s.with_values(s.values - ref)


def climatological_mean(s: TimeSeries, start: int, end: int) -> float:
    """Arithmetic mean of the series over [start, end] (missing values excluded)."""
    mask = check_window(start, end, s.times, what=f"window for {s.name!r}")
    vals = s.values[mask]
    vals = vals[np.isfinite(vals)]
    if vals.size == 0:
        raise DataError(f"window {start}-{end} of {s.name!r} has no observed values")
    return float(np.mean(vals))


def series_range(s: TimeSeries) -> tuple[float, float]:
    """(min, max) over the observed (non-missing) span."""
    vals = s.values[np.isfinite(s.values)]
    if vals.size == 0:
        raise DataError(f"series {s.name!r} has no observed values")
    return float(np.min(vals)), float(np.max(vals))


def sum_series(a: TimeSeries, b: TimeSeries, name: str | None = None) -> TimeSeries:
    """Pointwise sum of two series defined on identical years."""
    if not np.array_equal(a.times, b.times):
        raise DataError(
            f"cannot sum {a.name!r} and {b.name!r}: time vectors differ; align first"
        )
    if a.unit != b.unit:
        raise DataError(
            f"cannot sum {a.name!r} [{a.unit}] and {b.name!r} [{b.unit}]: units differ"
        )
    return TimeSeries(name or f"{a.name}+{b.name}", a.unit, a.times, a.values + b.values)
