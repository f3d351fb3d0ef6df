"""Granger causality tests on annual series.

A candidate cause X Granger-causes the target Y if lagged X improves
prediction of Y beyond Y's own lags and any conditioning series Z. The test
compares an unrestricted autoregression (lags of Y, X, and Z) against a
restricted one with the X lags removed, via a nested-model F-test. For
Gaussian processes the same residual-variance gap measured in nats is the
transfer entropy, reported alongside the F decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, InsufficientDataError, InvalidRssError
from .linear import DesignMatrix, f_test_nested, ols_fit
from .series import Dataset


@dataclass(frozen=True)
class VarSpec:
    """Specification of one directional Granger test.

    ``order`` lags of every series enter the unrestricted model; the
    restricted model drops the ``candidate_cause`` lags only.
    """

    order: int
    target: str
    candidate_cause: tuple[str, ...]
    conditioning: tuple[str, ...] = ()
    include_intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "candidate_cause", tuple(self.candidate_cause))
        object.__setattr__(self, "conditioning", tuple(self.conditioning))
        if self.order < 1:
            raise DataError(f"lag order must be >= 1, got {self.order}")
        if not self.candidate_cause:
            raise DataError("at least one candidate cause is required")
        overlap = set(self.candidate_cause) | set(self.conditioning)
        if self.target in overlap:
            raise DataError(f"target {self.target!r} cannot also be a predictor set member")
        if set(self.candidate_cause) & set(self.conditioning):
            raise DataError("candidate causes and conditioning sets must be disjoint")

    def with_order(self, order: int) -> "VarSpec":
        return VarSpec(order, self.target, self.candidate_cause,
                       self.conditioning, self.include_intercept)


@dataclass(frozen=True)
class GcResult:
    """Outcome of one Granger causality test."""

    f_statistic: float
    p_value: float
    rss_unrestricted: float
    rss_restricted: float
    dof: tuple[int, int]
    alpha: float
    rejected: bool
    gaussian_te: float
    order: int
    target: str
    candidate_cause: tuple[str, ...]
    conditioning: tuple[str, ...]


def _lagged_columns(series_values, name, order, start):
    """Columns [name.l1 ... name.lp] of values lagged 1..p, rows from ``start``."""
    return [
        (f"{name}.l{i}", series_values[start - i: len(series_values) - i])
        for i in range(1, order + 1)
    ]


def build_lagged_design(
    dataset: Dataset, spec: VarSpec, start: int | None = None
) -> tuple[DesignMatrix, DesignMatrix, np.ndarray]:
    """Construct the unrestricted and restricted designs and shared response.

    Rows cover t = start+1 .. T (``start`` defaults to the lag order); both
    designs share identical rows, and the restricted design equals the
    unrestricted one with the candidate-cause lag columns deleted.
    """
    p = spec.order
    start = p if start is None else start
    if start < p:
        raise DataError(f"start offset {start} smaller than lag order {p}")
    target = dataset.series(spec.target).values
    n_rows = len(target) - start

    y_lags = _lagged_columns(target, spec.target, p, start)
    cause_lags = []
    for name in spec.candidate_cause:
        cause_lags += _lagged_columns(dataset.series(name).values, name, p, start)
    z_lags = []
    for name in spec.conditioning:
        z_lags += _lagged_columns(dataset.series(name).values, name, p, start)
    unrestricted = y_lags + cause_lags + z_lags
    restricted = y_lags + z_lags

    n_series = len(spec.candidate_cause) + len(spec.conditioning)
    k_unrestricted = len(unrestricted) + (1 if spec.include_intercept else 0)
    floor = max(p + n_series + 5, k_unrestricted + 1)
    if n_rows < floor:
        raise InsufficientDataError(
            f"only {n_rows} usable rows after lagging; need at least "
            f"{floor} for order {p}"
        )
    y = target[start:]
    full = DesignMatrix.from_columns(unrestricted, intercept=spec.include_intercept)
    reduced = DesignMatrix.from_columns(restricted, intercept=spec.include_intercept)
    return full, reduced, y


def gc_test(dataset: Dataset, spec: VarSpec, alpha: float = 0.05) -> GcResult:
    """Fit both autoregressions and test the candidate-cause lags jointly."""
    full_design, reduced_design, y = build_lagged_design(dataset, spec)
    full = ols_fit(full_design, y)
    reduced = ols_fit(reduced_design, y)
    test = f_test_nested(full, reduced)
    diff = reduced.rss - full.rss
    te = 0.0 if (diff <= 0.0 or full.rss <= 0.0) else 0.5 * math.log(reduced.rss / full.rss)
    return GcResult(
        f_statistic=test.statistic,
        p_value=test.p_value,
        rss_unrestricted=full.rss,
        rss_restricted=reduced.rss,
        dof=(test.dof_numerator, test.dof_denominator),
        alpha=alpha,
        rejected=test.p_value < alpha,
        gaussian_te=te,
        order=spec.order,
        target=spec.target,
        candidate_cause=spec.candidate_cause,
        conditioning=spec.conditioning,
    )


def gaussian_transfer_entropy(rss_restricted: float, rss_unrestricted: float) -> float:
    """Transfer entropy (nats) of a Gaussian process from the two model RSS.

    Equals half the log residual-variance ratio, the form under which
    transfer entropy and the Granger log-likelihood-ratio statistic coincide.
    """
    if not (rss_restricted > 0.0 and rss_unrestricted > 0.0):
        raise InvalidRssError("residual sums of squares must be positive")
    if rss_restricted < rss_unrestricted:
        raise InvalidRssError(
            "restricted RSS below unrestricted RSS violates nesting "
            f"({rss_restricted} < {rss_unrestricted})"
        )
    return 0.5 * math.log(rss_restricted / rss_unrestricted)


def select_order(
    dataset: Dataset,
    spec: VarSpec,
    p_max: int,
    criterion: str = "bic",
) -> int:
    """Pick the lag order in 1..p_max minimizing AIC or BIC.

    All candidate orders are fit on the row set implied by ``p_max`` so the
    criteria are comparable.
    """
    if p_max < 1:
        raise DataError(f"p_max must be >= 1, got {p_max}")
    criterion = criterion.lower()
    if criterion not in ("aic", "bic"):
        raise DataError(f"criterion must be 'aic' or 'bic', got {criterion!r}")

    best_p, best_score = None, np.inf
    for p in range(1, p_max + 1):
        full_design, _, y = build_lagged_design(dataset, spec.with_order(p),
                                                start=p_max)
        fit = ols_fit(full_design, y)
        n = fit.n
        k = len(fit.column_names)
        if fit.rss <= 0.0:
            return p  # an exact fit cannot be improved by more lags
        penalty = 2.0 * k if criterion == "aic" else k * math.log(n)
        score = n * math.log(fit.rss / n) + penalty
        if score < best_score - 1e-12:
            best_p, best_score = p, score
    return best_p
