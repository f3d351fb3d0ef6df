"""Counterfactual scenario regression for trend attribution.

The response is regressed on reconstructed forcing and climate-driver
covariates. A fitted model can then be evaluated at covariate combinations
that never occurred (scenarios), isolating the contribution of one covariate
while holding the others fixed. Changes between scenarios reduce to linear
contrasts of the regression coefficients, so analytic intervals follow from
the coefficient covariance; a parametric residual bootstrap is available as a
resampling alternative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator

from . import series as ts
from .exceptions import (
    DataError,
    IncompleteScenarioError,
    MissingAuxiliarySeriesError,
    TooFewReplicatesError,
)
from .linear import DesignMatrix, FitResult, ols_fit, t_test_zero
from .series import Dataset, TimeSeries
from .validation import check_probability, check_positive_int


@dataclass(frozen=True)
class Scenario:
    """A complete covariate assignment describing one (possibly hypothetical)
    climate state."""

    name: str
    assignment: Mapping[str, float]

    def value(self, covariate: str) -> float:
        try:
            return float(self.assignment[covariate])
        except KeyError:
            raise IncompleteScenarioError(
                f"scenario {self.name!r} does not assign covariate {covariate!r}"
            ) from None


@dataclass(frozen=True)
class ChangeEstimate:
    """A scenario contrast with its confidence interval and p-value."""

    name: str
    delta: float
    ci: tuple[float, float]
    p_value: float
    method: str
    level: float
    unit: str = ""

    def __post_init__(self):
        lo, hi = self.ci
        if np.isfinite(lo) and np.isfinite(hi) and not (lo <= self.delta <= hi):
            raise DataError(
                f"inconsistent change estimate {self.name!r}: "
                f"{self.delta} outside ({lo}, {hi})"
            )


class CounterfactualRegression(BaseEstimator):
    """Linear scenario-contrast model fit to an aligned dataset.

    Parameters
    ----------
    include_intercept : bool
        Estimate a background climatology term. Set False when the response
        is already an anomaly with the background removed; the choice is
        always explicit.
    error_family : {"gaussian", "gev"}
        Distribution of the residual term. The Gaussian family uses ordinary
        least squares; the GEV family delegates to
        :func:`climattr.extremes.gev_fit` for annual-extreme responses.
    """

    def __init__(self, include_intercept: bool = True, error_family: str = "gaussian"):
        self.include_intercept = include_intercept
        self.error_family = error_family

    # -- fitting -------------------------------------------------------------

    def fit(self, dataset: Dataset):
        if self.error_family not in ("gaussian", "gev"):
            raise DataError(f"unknown error family {self.error_family!r}")
        if len(dataset.covariates) < 1:
            raise DataError("counterfactual fit needs at least one covariate")
        self.dataset_ = dataset
        self.covariate_names_ = dataset.covariate_names
        if self.error_family == "gaussian":
            design = DesignMatrix.from_columns(
                [(ts_.name, ts_.values) for ts_, _ in dataset.covariates],
                intercept=self.include_intercept,
            )
            self.design_ = design
            self.result_ = ols_fit(design, dataset.response.values)
        else:
            from .extremes import gev_fit

            self.gev_result_ = gev_fit(dataset)
        return self

    def _check_fitted(self):
        if not hasattr(self, "dataset_"):
            raise DataError("model is not fitted; call fit(dataset) first")

    @property
    def fit_result(self) -> FitResult:
        self._check_fitted()
        if self.error_family != "gaussian":
            raise DataError("fit_result is only defined for the Gaussian family")
        return self.result_

    @property
    def r_squared(self) -> float:
        return self.fit_result.r_squared

    @property
    def residual_sd(self) -> float:
        return self.fit_result.residual_sd

    # -- scenario evaluation ---------------------------------------------------

    def _contrast(self, s1: Scenario, s2: Scenario) -> np.ndarray:
        for s in (s1, s2):
            extra = set(s.assignment) - set(self.covariate_names_)
            if extra:
                raise IncompleteScenarioError(
                    f"scenario {s.name!r} assigns unknown covariates {sorted(extra)}"
                )
        return np.array(
            [s2.value(name) - s1.value(name) for name in self.covariate_names_]
        )

    def scenario_mean(self, scenario: Scenario) -> float:
        """Expected response under the scenario's covariate assignment."""
        self._check_fitted()
        fit = self.fit_result
        total = fit.coef("intercept") if self.include_intercept else 0.0
        extra = set(scenario.assignment) - set(self.covariate_names_)
        if extra:
            raise IncompleteScenarioError(
                f"scenario {scenario.name!r} assigns unknown covariates {sorted(extra)}"
            )
        for name in self.covariate_names_:
            total += fit.coef(name) * scenario.value(name)
        return float(total)

    def delta(self, s1: Scenario, s2: Scenario, level: float = 0.95) -> ChangeEstimate:
        """Expected change from scenario ``s1`` to ``s2`` with analytic interval.

        The intercept cancels in the subtraction, so the change is the
        contrast ``c = s2 - s1`` applied to the covariate coefficients and its
        variance is ``c' Cov c``. For contrasts touching a single covariate
        the p-value coincides with that coefficient's t-test.
        """
        self._check_fitted()
        check_probability(level, "level")
        fit = self.fit_result
        c = self._contrast(s1, s2)
        idx = [fit.index(name) for name in self.covariate_names_]
        beta = fit.coefficients[idx]
        delta = float(c @ beta)

        nonzero = np.nonzero(c)[0]
        if nonzero.size == 0:
            se = 0.0
        else:
            sub = np.ix_([idx[i] for i in nonzero], [idx[i] for i in nonzero])
            se = float(np.sqrt(c[nonzero] @ fit.coef_covariance[sub] @ c[nonzero]))

        tq = stats.t.ppf(0.5 + level / 2.0, fit.dof)
        ci = (delta - tq * se, delta + tq * se)
        if delta == 0.0:
            p = 1.0
        elif se == 0.0:
            p = 0.0
        else:
            p = min(2.0 * float(stats.t.sf(abs(delta / se), fit.dof)), 1.0)
        return ChangeEstimate(
            name=f"{s2.name} - {s1.name}",
            delta=delta,
            ci=ci,
            p_value=p,
            method="analytic",
            level=level,
            unit=self.dataset_.response.unit,
        )

    def factor_deltas(
        self,
        covariate: str,
        baseline_window: tuple[int, int] = (1900, 1929),
        target_year: int = 2015,
        components: Sequence[TimeSeries] | None = None,
        level: float = 0.95,
    ) -> dict[str, ChangeEstimate]:
        """Per-forcing and per-driver contributions to the scenario contrast.

        Each component series (e.g. the greenhouse-gas and aerosol parts of a
        combined anthropogenic covariate) is scaled by the parent covariate's
        coefficient over ``[baseline window] -> target year``; every other
        covariate contributes its coefficient times its full observed range.
        Confidence limits rescale the underlying coefficient interval, so each
        entry shares the p-value of its coefficient.
        """
        self._check_fitted()
        check_probability(level, "level")
        fit = self.fit_result
        if covariate not in self.covariate_names_:
            raise DataError(f"no covariate named {covariate!r} in the fitted model")
        if components is None:
            components = self.dataset_.auxiliary
        if not components:
            raise MissingAuxiliarySeriesError(
                "component series for the forcing decomposition are required; "
                "attach them to the dataset or pass components="
            )

        out: dict[str, ChangeEstimate] = {}
        unit = self.dataset_.response.unit
        start, end = baseline_window
        for comp in components:
            factor = comp.value_at(target_year) - ts.climatological_mean(comp, start, end)
            out[comp.name] = self._scaled_beta_estimate(
                comp.name, covariate, factor, level, unit
            )
        for name in self.covariate_names_:
            if name == covariate:
                continue
            lo, hi = ts.series_range(self.dataset_.series(name))
            out[name] = self._scaled_beta_estimate(name, name, hi - lo, level, unit)
        return out

    def _scaled_beta_estimate(self, label, covariate, factor, level, unit):
        fit = self.fit_result
        beta = fit.coef(covariate)
        se = fit.se(covariate)
        delta = beta * factor
        tq = stats.t.ppf(0.5 + level / 2.0, fit.dof)
        half = abs(factor) * tq * se
        p = t_test_zero(fit, covariate).p_value
        return ChangeEstimate(
            name=label,
            delta=float(delta),
            ci=(delta - half, delta + half),
            p_value=p,
            method="analytic",
            level=level,
            unit=unit,
        )

    # -- resampling ------------------------------------------------------------

    def bootstrap_delta(
        self,
        s1: Scenario,
        s2: Scenario,
        replicates: int = 2000,
        seed: int = 0,
        level: float = 0.95,
    ) -> ChangeEstimate:
        """Parametric residual bootstrap for the scenario contrast.

        Each replicate redraws ``y* = fitted + sigma * N(0, 1)``, refits, and
        recomputes the contrast. Replicate noise streams are spawned from
        ``(seed, replicate index)`` so results do not depend on execution
        order. The interval is percentile-based and the p-value is the
        two-sided bootstrap tail proportion against zero change.
        """
        self._check_fitted()
        check_probability(level, "level")
        check_positive_int(replicates, 1, "replicates")
        if replicates < 200:
            raise TooFewReplicatesError(
                f"parametric bootstrap needs >= 200 replicates, got {replicates}"
            )
        if self.error_family != "gaussian":
            raise DataError("bootstrap_delta requires the Gaussian error family")

        fit = self.fit_result
        c_cov = self._contrast(s1, s2)
        delta_hat = float(
            c_cov @ fit.coefficients[[fit.index(n) for n in self.covariate_names_]]
        )

        X = self.design_.values[:, self.design_.nonzero_columns]
        Q, R = np.linalg.qr(X)
        # contrast in the coordinates of the solved (nonzero) columns
        names_eff = [
            n for n, keep in zip(self.design_.column_names, self.design_.nonzero_columns)
            if keep
        ]
        c_eff = np.zeros(len(names_eff))
        for name, ci_val in zip(self.covariate_names_, c_cov):
            if name in names_eff:
                c_eff[names_eff.index(name)] = ci_val
            elif ci_val != 0.0:
                raise DataError(
                    f"contrast touches unidentified covariate {name!r}"
                )
        # w' y* gives the replicate delta directly: w = Q R^{-T} c
        w = Q @ np.linalg.solve(R.T, c_eff)

        n = fit.n
        sigma = fit.residual_sd
        master = np.random.SeedSequence(seed)
        children = master.spawn(replicates)
        noise = np.empty((replicates, n))
        for i, child in enumerate(children):
            noise[i] = np.random.default_rng(child).standard_normal(n)
        deltas = noise @ w * sigma + float(w @ fit.fitted)

        alpha = 1.0 - level
        lo, hi = np.percentile(deltas, [100 * alpha / 2.0, 100 * (1 - alpha / 2.0)])
        p = 2.0 * min(float(np.mean(deltas <= 0.0)), float(np.mean(deltas >= 0.0)))
        return ChangeEstimate(
            name=f"{s2.name} - {s1.name}",
            delta=delta_hat,
            ci=(float(lo), float(hi)),
            p_value=min(p, 1.0),
            method="bootstrap",
            level=level,
            unit=self.dataset_.response.unit,
        )


def make_era_scenarios(
    dataset: Dataset,
    covariate: str,
    baseline_window: tuple[int, int] = (1900, 1929),
    target_year: int = 2015,
) -> tuple[Scenario, Scenario]:
    """Build the standard scenario pair contrasting one covariate across eras.

    The baseline scenario sets ``covariate`` to its mean over
    ``baseline_window`` and every other covariate to its full-span
    climatological mean; the target scenario moves ``covariate`` to its value
    in ``target_year`` with the others unchanged.
    """
    if covariate not in dataset.covariate_names:
        raise DataError(f"no covariate named {covariate!r} in dataset")
    start, end = baseline_window
    base: dict[str, float] = {}
    for name in dataset.covariate_names:
        s = dataset.series(name)
        base[name] = ts.climatological_mean(s, s.times[0], s.times[-1])

    contrast_series = dataset.series(covariate)
    early = dict(base)
    early[covariate] = ts.climatological_mean(contrast_series, start, end)
    late = dict(base)
    late[covariate] = contrast_series.value_at(target_year)
    return (
        Scenario(name="pre-industrial", assignment=early),
        Scenario(name="present-day", assignment=late),
    )
