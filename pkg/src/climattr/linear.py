"""Ordinary least squares with small-sample inference.

This is the shared numerical core for the counterfactual, causality, and
fingerprint analyses. Fits go through a QR decomposition (never an explicit
inverse of X'X), report coefficient covariance and residual scale, and use
Student-t / F distributions for intervals and tests rather than normal
approximations.

Columns that are exactly zero carry no information; they are excluded from
the solve and reported with a zero coefficient and NaN variance, mirroring
R's handling of unidentified terms. Any other (near-)collinearity raises
:class:`IllConditionedError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from scipy import stats
from scipy.linalg import solve_triangular
from sklearn.base import BaseEstimator

from .exceptions import (
    DataError,
    IllConditionedError,
    InsufficientDataError,
    NotNestedError,
    UnknownCoefficientError,
)
from .validation import as_2d_array, as_float_array, check_probability

DEFAULT_COND_MAX = 1e8


@dataclass(frozen=True)
class DesignMatrix:
    """A named predictor matrix.

    ``cond_max`` is the condition-number threshold above which the matrix is
    flagged ill-conditioned (zero columns are ignored by the flag; they are
    handled separately by the solver).
    """

    values: np.ndarray
    column_names: tuple[str, ...]
    has_intercept: bool = False
    cond_max: float = DEFAULT_COND_MAX

    def __post_init__(self):
        values = as_2d_array(self.values, name="design matrix")
        if values.shape[1] != len(self.column_names):
            raise DataError(
                f"{values.shape[1]} columns but {len(self.column_names)} names"
            )
        if len(set(self.column_names)) != len(self.column_names):
            raise DataError(f"duplicate column names: {self.column_names}")
        if values.shape[0] <= values.shape[1]:
            raise InsufficientDataError(
                f"need more rows than columns: {values.shape[0]} rows, "
                f"{values.shape[1]} columns"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @cached_property
    def nonzero_columns(self) -> np.ndarray:
        return ~np.all(self.values == 0.0, axis=0)

    @cached_property
    def condition_number(self) -> float:
        active = self.values[:, self.nonzero_columns]
        if active.shape[1] == 0:
            return np.inf
        return float(np.linalg.cond(active))

    @property
    def is_ill_conditioned(self) -> bool:
        return self.condition_number > self.cond_max

    @classmethod
    def from_columns(
        cls,
        columns: Mapping[str, Sequence[float]] | Sequence[tuple[str, Sequence[float]]],
        intercept: bool = True,
        cond_max: float = DEFAULT_COND_MAX,
    ) -> "DesignMatrix":
        """Build from named columns, optionally prepending an intercept of ones."""
        items = list(columns.items()) if isinstance(columns, Mapping) else list(columns)
        if not items:
            raise DataError("design matrix needs at least one column")
        arrays = [as_float_array(v, name=f"column {name!r}") for name, v in items]
        names = [name for name, _ in items]
        n = len(arrays[0])
        for name, arr in zip(names, arrays):
            if len(arr) != n:
                raise DataError(f"column {name!r} length {len(arr)} != {n}")
        if intercept:
            arrays.insert(0, np.ones(n))
            names.insert(0, "intercept")
        return cls(np.column_stack(arrays), tuple(names), has_intercept=intercept,
                   cond_max=cond_max)

    @classmethod
    def intercept_only(cls, n: int, cond_max: float = DEFAULT_COND_MAX) -> "DesignMatrix":
        return cls(np.ones((n, 1)), ("intercept",), has_intercept=True,
                   cond_max=cond_max)


@dataclass(frozen=True)
class FitResult:
    """Least-squares estimates with the pieces needed for inference.

    ``coef_covariance`` rows/columns of dropped (all-zero) predictors are NaN;
    their coefficients are reported as 0. ``dof`` is n minus the number of
    identified columns.
    """

    column_names: tuple[str, ...]
    coefficients: np.ndarray
    coef_covariance: np.ndarray
    residual_sd: float
    rss: float
    r_squared: float
    dof: int
    residuals: np.ndarray
    n: int
    tss: float
    fitted: np.ndarray

    def index(self, name: str) -> int:
        try:
            return self.column_names.index(name)
        except ValueError:
            raise UnknownCoefficientError(
                f"no coefficient named {name!r}; have {self.column_names}"
            ) from None

    def coef(self, name: str) -> float:
        return float(self.coefficients[self.index(name)])

    def se(self, name: str) -> float:
        var = self.coef_covariance[self.index(name), self.index(name)]
        return float(np.sqrt(var))

    def named_coefficients(self) -> dict[str, float]:
        return {n: float(c) for n, c in zip(self.column_names, self.coefficients)}


@dataclass(frozen=True)
class TestResult:
    """A test statistic, its p-value, and the null it addresses."""

    statistic: float
    p_value: float
    null_description: str
    dof_numerator: int | None = None
    dof_denominator: int | None = None

    @property
    def rejected_at_05(self) -> bool:
        return self.p_value < 0.05


def ols_fit(design: DesignMatrix, y) -> FitResult:
    """Least-squares fit of ``y`` on the design columns.

    Coefficient covariance is ``sigma^2 (X'X)^{-1}`` computed from the QR
    factor. R-squared is centred when the design has an intercept and
    uncentred otherwise.

    Raises
    ------
    IllConditionedError
        If the condition number of the identified columns exceeds the
        design's threshold.
    InsufficientDataError
        If residual degrees of freedom would drop below 1.
    """
    y = as_float_array(y, name="response")
    if len(y) != design.n:
        raise DataError(f"response length {len(y)} != design rows {design.n}")
    if design.is_ill_conditioned:
        raise IllConditionedError(
            f"design condition number {design.condition_number:.3g} exceeds "
            f"{design.cond_max:.3g}; covariates are effectively collinear"
        )

    active = design.nonzero_columns
    X = design.values[:, active]
    k_eff = X.shape[1]
    if k_eff == 0:
        raise DataError("all design columns are identically zero")
    dof = design.n - k_eff
    if dof < 1:
        raise InsufficientDataError(
            f"residual degrees of freedom {dof} < 1 (n={design.n}, k={k_eff})"
        )

    Q, R = np.linalg.qr(X)
    beta_eff = solve_triangular(R, Q.T @ y, lower=False)
    fitted = X @ beta_eff
    residuals = y - fitted
    rss = float(residuals @ residuals)
    sigma2 = rss / dof

    r_inv = solve_triangular(R, np.eye(k_eff), lower=False)
    xtx_inv = r_inv @ r_inv.T
    cov_eff = sigma2 * xtx_inv

    k = design.k
    coefficients = np.zeros(k)
    coefficients[active] = beta_eff
    cov = np.full((k, k), np.nan)
    cov[np.ix_(active, active)] = cov_eff

    if design.has_intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
    else:
        tss = float(y @ y)
    r_squared = 1.0 - rss / tss if tss > 0 else (1.0 if rss == 0.0 else 0.0)
    r_squared = float(min(max(r_squared, 0.0), 1.0))

    return FitResult(
        column_names=design.column_names,
        coefficients=coefficients,
        coef_covariance=cov,
        residual_sd=float(np.sqrt(sigma2)),
        rss=rss,
        r_squared=r_squared,
        dof=dof,
        residuals=residuals,
        n=design.n,
        tss=tss,
        fitted=fitted,
    )


def coef_ci(fit: FitResult, name: str, level: float = 0.95) -> tuple[float, float]:
    """Student-t confidence interval for one coefficient at the fit's dof."""
    check_probability(level, "level")
    beta = fit.coef(name)
    se = fit.se(name)
    if not np.isfinite(se):
        raise UnknownCoefficientError(
            f"coefficient {name!r} is unidentified (zero predictor column)"
        )
    half = stats.t.ppf(0.5 + level / 2.0, fit.dof) * se
    return beta - half, beta + half


def t_test_value(fit: FitResult, name: str, value: float) -> TestResult:
    """Two-sided Student-t test of H0: coefficient == value."""
    beta = fit.coef(name)
    se = fit.se(name)
    if not np.isfinite(se):
        raise UnknownCoefficientError(
            f"coefficient {name!r} is unidentified (zero predictor column)"
        )
    diff = beta - value
    if diff == 0.0:
        statistic, p = 0.0, 1.0
    elif se == 0.0:
        statistic, p = float(np.sign(diff) * np.inf), 0.0
    else:
        statistic = diff / se
        p = 2.0 * float(stats.t.sf(abs(statistic), fit.dof))
    return TestResult(
        statistic=float(statistic),
        p_value=min(p, 1.0),
        null_description=f"{name} == {value:g}",
        dof_denominator=fit.dof,
    )


def t_test_zero(fit: FitResult, name: str) -> TestResult:
    """Two-sided Student-t test of H0: coefficient == 0."""
    return t_test_value(fit, name, 0.0)


def f_test_nested(full: FitResult, reduced: FitResult) -> TestResult:
    """F-test of a full model against a nested reduction of it.

    The reduced model's predictors must be a strict subset of the full
    model's, fit on the identical response rows. The statistic is
    ``((RSS_r - RSS_u)/q) / (RSS_u/dof_u)`` with q the number of dropped
    predictors.
    """
    full_cols = set(full.column_names)
    reduced_cols = set(reduced.column_names)
    if not reduced_cols < full_cols:
        raise NotNestedError(
            "reduced model predictors must be a strict subset of the full model's"
        )
    if full.n != reduced.n:
        raise NotNestedError(f"row counts differ: full {full.n}, reduced {reduced.n}")
    if not np.isclose(full.tss, reduced.tss, rtol=1e-8, atol=1e-12):
        raise NotNestedError("models appear to be fit to different responses")

    q = len(full_cols) - len(reduced_cols)
    diff = reduced.rss - full.rss
    if diff <= 0.0 or full.rss == 0.0:
        # nested least squares cannot lose fit; tiny negatives are roundoff
        statistic, p = 0.0, 1.0
        if full.rss == 0.0 and diff > 0.0:
            statistic, p = float(np.inf), 0.0
    else:
        statistic = (diff / q) / (full.rss / full.dof)
        p = float(stats.f.sf(statistic, q, full.dof))
    return TestResult(
        statistic=float(statistic),
        p_value=p,
        null_description=(
            "dropped predictors have zero coefficients: "
            + ", ".join(sorted(full_cols - reduced_cols))
        ),
        dof_numerator=q,
        dof_denominator=full.dof,
    )


class OLSInference(BaseEstimator):
    """Scikit-learn style wrapper around :func:`ols_fit`.

    Parameters
    ----------
    fit_intercept : bool
        Whether to prepend a column of ones. Intercept inclusion is always
        explicit; nothing is centred implicitly.
    cond_max : float
        Condition-number threshold beyond which fitting raises
        :class:`IllConditionedError`.
    """

    def __init__(self, fit_intercept: bool = True, cond_max: float = DEFAULT_COND_MAX):
        self.fit_intercept = fit_intercept
        self.cond_max = cond_max

    def fit(self, X, y, column_names: Sequence[str] | None = None):
        X = as_2d_array(X)
        if column_names is None:
            column_names = [f"x{i}" for i in range(X.shape[1])]
        design = DesignMatrix.from_columns(
            list(zip(column_names, X.T)),
            intercept=self.fit_intercept,
            cond_max=self.cond_max,
        )
        self.result_ = ols_fit(design, y)
        self.feature_names_in_ = np.asarray(column_names, dtype=object)
        self.n_features_in_ = X.shape[1]
        offset = 1 if self.fit_intercept else 0
        self.coef_ = self.result_.coefficients[offset:]
        self.intercept_ = (
            float(self.result_.coefficients[0]) if self.fit_intercept else 0.0
        )
        return self

    def predict(self, X):
        X = as_2d_array(X)
        return X @ self.coef_ + self.intercept_

    def conf_int(self, level: float = 0.95) -> dict[str, tuple[float, float]]:
        return {
            name: coef_ci(self.result_, name, level)
            for name in self.result_.column_names
        }
