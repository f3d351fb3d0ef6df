"""Fingerprint scaling-factor regression.

Observations are regressed, without intercept, on one or more simulated
response patterns ("fingerprints"). A fingerprint is detected when the
confidence interval on its scaling factor excludes zero, and attributed when
it is detected and the interval is also consistent with one. An optional
caller-supplied invertible matrix prewhitens both sides before fitting;
estimating that matrix (e.g. from control simulations) is out of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .counterfactual import ChangeEstimate
from .exceptions import DataError
from .linear import DesignMatrix, FitResult, coef_ci, ols_fit
from .validation import as_float_array, check_probability


@dataclass(frozen=True)
class FingerprintSet:
    """Named fingerprint vectors, the observation vector, and an optional
    prewhitening transform applied to both sides before fitting."""

    fingerprints: tuple[tuple[str, np.ndarray], ...]
    observation: np.ndarray
    prewhitening: np.ndarray | None = None
    max_fingerprints: int = 2

    def __post_init__(self):
        obs = as_float_array(self.observation, name="observation")
        object.__setattr__(self, "observation", obs)
        fps = []
        for name, vec in self.fingerprints:
            arr = as_float_array(vec, name=f"fingerprint {name!r}")
            if len(arr) != len(obs):
                raise DataError(
                    f"fingerprint {name!r} length {len(arr)} != observation "
                    f"length {len(obs)}"
                )
            fps.append((name, arr))
        if not 1 <= len(fps) <= self.max_fingerprints:
            raise DataError(
                f"expected between 1 and {self.max_fingerprints} fingerprints, "
                f"got {len(fps)}; raise max_fingerprints to allow more"
            )
        object.__setattr__(self, "fingerprints", tuple(fps))
        if self.prewhitening is not None:
            mat = np.asarray(self.prewhitening, dtype=float)
            n = len(obs)
            if mat.shape != (n, n):
                raise DataError(f"prewhitening matrix must be {n}x{n}, got {mat.shape}")
            if abs(np.linalg.det(mat)) < 1e-300:
                raise DataError("prewhitening matrix must be invertible")
            object.__setattr__(self, "prewhitening", mat)

    @classmethod
    def from_mapping(cls, fingerprints: Mapping[str, Sequence[float]], observation,
                     prewhitening=None, max_fingerprints: int = 2):
        return cls(tuple(fingerprints.items()), np.asarray(observation, dtype=float),
                   prewhitening, max_fingerprints)


@dataclass(frozen=True)
class ScalingFactor:
    """One fingerprint's scaling factor and its detection/attribution flags."""

    name: str
    estimate: float
    ci: tuple[float, float]
    detected: bool
    attributed: bool


@dataclass(frozen=True)
class ScalingFactors:
    """Scaling factors for every fingerprint at a common confidence level."""

    factors: tuple[ScalingFactor, ...]
    level: float
    fit: FitResult

    def __getitem__(self, name: str) -> ScalingFactor:
        for f in self.factors:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def any_detected(self) -> bool:
        return any(f.detected for f in self.factors)


def of_fit(fingerprint_set: FingerprintSet, level: float = 0.95) -> ScalingFactors:
    """Estimate scaling factors by least squares without an intercept.

    Detection and attribution flags follow from the Student-t interval at the
    requested level: detected if it excludes zero, attributed if detected and
    the interval contains one.
    """
    check_probability(level, "level")
    X = np.column_stack([vec for _, vec in fingerprint_set.fingerprints])
    y = fingerprint_set.observation
    if fingerprint_set.prewhitening is not None:
        X = fingerprint_set.prewhitening @ X
        y = fingerprint_set.prewhitening @ y
    names = [name for name, _ in fingerprint_set.fingerprints]
    design = DesignMatrix.from_columns(list(zip(names, X.T)), intercept=False)
    fit = ols_fit(design, y)

    factors = []
    for name in names:
        lo, hi = coef_ci(fit, name, level)
        detected = not (lo <= 0.0 <= hi)
        attributed = detected and (lo <= 1.0 <= hi)
        factors.append(
            ScalingFactor(
                name=name,
                estimate=fit.coef(name),
                ci=(lo, hi),
                detected=detected,
                attributed=attributed,
            )
        )
    return ScalingFactors(factors=tuple(factors), level=level, fit=fit)


class FingerprintRegression(BaseEstimator):
    """Estimator wrapper for scaling-factor fits.

    Parameters mirror :func:`of_fit`; ``fit`` accepts the fingerprint matrix
    (one column per fingerprint) and the observation vector.
    """

    def __init__(self, level: float = 0.95, prewhitening=None,
                 max_fingerprints: int = 2):
        self.level = level
        self.prewhitening = prewhitening
        self.max_fingerprints = max_fingerprints

    def fit(self, X, y, fingerprint_names: Sequence[str] | None = None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[0] == 1 and len(np.asarray(y)) != 1:
            X = X.T
        if fingerprint_names is None:
            fingerprint_names = [f"fingerprint{i}" for i in range(X.shape[1])]
        fset = FingerprintSet(
            tuple(zip(fingerprint_names, X.T)),
            np.asarray(y, dtype=float),
            self.prewhitening,
            self.max_fingerprints,
        )
        self.result_ = of_fit(fset, self.level)
        self.coef_ = np.array([f.estimate for f in self.result_.factors])
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X @ self.coef_


def compare_with_counterfactual(
    scaling: ScalingFactors, change: ChangeEstimate
) -> str:
    """Side-by-side summary of the two attribution framings.

    The fingerprint route tests two hypotheses per pattern (zero for
    detection, one for attribution, with unitless factors); the scenario
    route tests a single no-change hypothesis in response units. No numerical
    reconciliation between the two is attempted.
    """
    lines = [
        "Attribution comparison",
        "======================",
        "",
        "Fingerprint regression (two hypothesis tests per pattern;",
        "scaling factors are unitless):",
    ]
    for f in scaling.factors:
        flag = "attributed" if f.attributed else (
            "detected" if f.detected else "not detected")
        lines.append(
            f"  {f.name}: estimate {f.estimate:.4g} "
            f"[{f.ci[0]:.4g}, {f.ci[1]:.4g}] at level {scaling.level:g} -> {flag}"
        )
    sig = change.p_value < (1.0 - change.level)
    lines += [
        "",
        "Scenario contrast (a single no-change hypothesis test;",
        f"units of the response [{change.unit or 'unknown'}]):",
        f"  {change.name}: {change.delta:.4g} "
        f"[{change.ci[0]:.4g}, {change.ci[1]:.4g}], p = {change.p_value:.3g} -> "
        f"{'significant change' if sig else 'no significant change'}",
        "",
    ]
    if scaling.any_detected and sig:
        verdict = "Concordant: both frameworks find an influence."
    elif not scaling.any_detected and not sig:
        verdict = "Concordant: neither framework finds an influence."
    else:
        verdict = "Discordant: the frameworks disagree; inspect inputs and units."
    lines.append(verdict)
    return "\n".join(lines)
