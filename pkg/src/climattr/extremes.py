"""Event attribution with a generalized extreme value error family.

The response is modelled as GEV with a location parameter linear in the
covariates and constant scale and shape. Fitting is maximum likelihood with
an analytic gradient; starting values come from probability-weighted moments
of the detrended response. Scenario comparisons are expressed as return
levels, exceedance probabilities, and risk ratios, with a parametric
bootstrap for the no-change null on the risk ratio.

Numerics: likelihood and quantile formulas are written in terms of
``t = log1p(shape*s)/shape`` (with a series expansion for small arguments),
which stays accurate through the Gumbel limit shape -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import gamma as gamma_fn
from sklearn.base import BaseEstimator

from .counterfactual import Scenario
from .exceptions import (
    DataError,
    InsufficientDataError,
    InvalidPeriodError,
    NonConvergenceError,
    SupportViolationError,
    TooFewReplicatesError,
    ZeroDenominatorError,
)
from .series import Dataset
from .validation import as_2d_array, as_float_array, check_probability

_EULER_GAMMA = 0.5772156649015329
_SHAPE_MIN = -0.499
_SHAPE_MAX = 5.0
_PENALTY = 1e10


# -- stable transforms ---------------------------------------------------------

def _t_and_dtdshape(s, shape):
    """Return t = log1p(shape*s)/shape and dt/dshape, stable near shape = 0.

    Entries with 1 + shape*s <= 0 give NaN; callers treat those as support
    violations.
    """
    s = np.asarray(s, dtype=float)
    w = shape * s
    z = 1.0 + w
    with np.errstate(divide="ignore", invalid="ignore"):
        if abs(shape) < 1e-9:
            t = s * (1.0 - w / 2.0 + w * w / 3.0)
            dt = -s * s * (0.5 - 2.0 * w / 3.0 + 0.75 * w * w)
        else:
            t = np.where(z > 0, np.log1p(w) / shape, np.nan)
            small = np.abs(w) < 1e-4
            dt_generic = np.where(z > 0, (s / z - t) / shape, np.nan)
            dt_series = -s * s * (0.5 - 2.0 * w / 3.0 + 0.75 * w * w - 0.8 * w**3)
            dt = np.where(small, dt_series, dt_generic)
        t = np.where(z > 0, t, np.nan)
        dt = np.where(z > 0, dt, np.nan)
    return t, dt, z


def _negloglik_and_grad(theta, X, y):
    """Negative GEV log-likelihood and gradient.

    ``theta`` is (location coefficients..., log scale, shape); X carries an
    explicit leading intercept column. Support violations return a smooth
    penalty that pushes back toward the feasible region.
    """
    k = X.shape[1]
    b = theta[:k]
    log_scale = theta[k]
    shape = theta[k + 1]
    scale = math.exp(log_scale)
    n = len(y)

    s = (y - X @ b) / scale
    w = shape * s
    z = 1.0 + w
    bad = z <= 1e-12
    if np.any(bad):
        # quadratic penalty in the violation, differentiable in theta
        viol = np.where(bad, 1e-12 - z, 0.0)
        value = _PENALTY * (1.0 + float(viol @ viol))
        dv_dz = -2.0 * _PENALTY * viol
        # z = 1 + shape*(y - Xb)/scale
        grad_b = -(X.T @ (dv_dz * shape)) / scale
        grad_phi = float(dv_dz @ (-w))
        grad_shape = float(dv_dz @ s)
        return value, np.concatenate([grad_b, [grad_phi, grad_shape]])

    t, dt, z = _t_and_dtdshape(s, shape)
    emt = np.exp(-t)
    value = n * log_scale + float((1.0 + shape) * np.sum(t) + np.sum(emt))

    dnll_ds = ((1.0 + shape) - emt) / z
    grad_b = -(X.T @ dnll_ds) / scale
    grad_phi = n - float(s @ dnll_ds)
    grad_shape = float(np.sum(t) + dt @ ((1.0 + shape) - emt))
    return value, np.concatenate([grad_b, [grad_phi, grad_shape]])


def _pwm_start(y):
    """Probability-weighted-moment estimates (location, scale, shape)."""
    x = np.sort(np.asarray(y, dtype=float))
    n = len(x)
    j = np.arange(1, n + 1, dtype=float)
    b0 = x.mean()
    b1 = float(np.sum((j - 1) / (n - 1) * x)) / n
    b2 = float(np.sum((j - 1) * (j - 2) / ((n - 1) * (n - 2)) * x)) / n
    l1, l2, l3 = b0, 2 * b1 - b0, 6 * b2 - 6 * b1 + b0
    tau3 = l3 / l2 if l2 > 0 else 0.0
    c = 2.0 / (3.0 + tau3) - math.log(2) / math.log(3)
    k_h = 7.8590 * c + 2.9554 * c * c  # Hosking's k = -shape
    if abs(k_h) < 1e-6:
        scale = l2 / math.log(2)
        loc = l1 - _EULER_GAMMA * scale
        shape = 0.0
    else:
        g = gamma_fn(1.0 + k_h)
        scale = l2 * k_h / ((1.0 - 2.0 ** (-k_h)) * g)
        loc = l1 - scale * (1.0 - g) / k_h
        shape = -k_h
    if not (np.isfinite(scale) and scale > 0):
        scale = max(np.std(x), 1e-8)
        loc = float(np.mean(x))
        shape = 0.0
    return loc, scale, float(np.clip(shape, -0.45, 0.7))


def _numerical_hessian(theta, Xfull, y):
    """Central differences of the analytic gradient, symmetrized."""
    p = len(theta)
    hess = np.empty((p, p))
    steps = 1e-5 * (1.0 + np.abs(theta))
    for i in range(p):
        up = theta.copy()
        dn = theta.copy()
        up[i] += steps[i]
        dn[i] -= steps[i]
        _, g_up = _negloglik_and_grad(up, Xfull, y)
        _, g_dn = _negloglik_and_grad(dn, Xfull, y)
        hess[i] = (g_up - g_dn) / (2.0 * steps[i])
    return 0.5 * (hess + hess.T)


# -- batched bootstrap refitting ------------------------------------------------
#
# The risk-ratio bootstrap refits the same design against hundreds of
# resampled responses. Doing that one scipy call at a time is dominated by
# call overhead, so the refits run as one damped-Newton iteration vectorized
# across replicates. Each replicate's likelihood is identical to
# _negloglik_and_grad; replicates that fail to converge are reported so the
# caller can drop and count them.

def _batch_negloglik_and_grad(theta, X, Y):
    """Vectorized NLL and gradient for a (B, p) parameter batch.

    ``X`` is (n, k) with intercept column, ``Y`` is (B, n). Support-violating
    rows get the same smooth penalty as the scalar path.
    """
    B, p = theta.shape
    n, k = X.shape
    b = theta[:, :k]
    phi = theta[:, k]
    xi = theta[:, k + 1]
    sigma = np.exp(phi)

    s = (Y - b @ X.T) / sigma[:, None]
    w = xi[:, None] * s
    z = 1.0 + w

    def regular(s, w, z, xi, phi, sigma):
        rows = s.shape[0]
        small = np.abs(xi) < 1e-9
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.log1p(w) / xi[:, None]
            dt = (s / z - t) / xi[:, None]
        small_w = np.abs(w) < 1e-4
        if np.any(small) or np.any(small_w):
            t_series = s * (1.0 - w / 2.0 + w * w / 3.0)
            dt_series = -s * s * (0.5 - 2.0 * w / 3.0 + 0.75 * w**2 - 0.8 * w**3)
            t[small] = t_series[small]
            dt = np.where(small_w, dt_series, dt)
            dt[small] = dt_series[small]
        emt = np.exp(-t)
        one_xi = 1.0 + xi
        value = n * phi + one_xi * np.sum(t, axis=1) + np.sum(emt, axis=1)
        dnll_ds = (one_xi[:, None] - emt) / z
        grad = np.empty((rows, p))
        grad[:, :k] = -(dnll_ds @ X) / sigma[:, None]
        grad[:, k] = n - np.sum(s * dnll_ds, axis=1)
        grad[:, k + 1] = np.sum(t, axis=1) + np.sum(dt * (one_xi[:, None] - emt), axis=1)
        return value, grad

    bad = np.any(z <= 1e-12, axis=1)
    if not np.any(bad):
        return regular(s, w, z, xi, phi, sigma)

    value = np.empty(B)
    grad = np.empty((B, p))
    viol = np.where(z[bad] <= 1e-12, 1e-12 - z[bad], 0.0)
    value[bad] = _PENALTY * (1.0 + np.sum(viol * viol, axis=1))
    dv_dz = -2.0 * _PENALTY * viol
    grad[bad, :k] = -(dv_dz * xi[bad, None]) @ X / sigma[bad, None]
    grad[bad, k] = np.sum(dv_dz * (-w[bad]), axis=1)
    grad[bad, k + 1] = np.sum(dv_dz * s[bad], axis=1)
    ok = ~bad
    if np.any(ok):
        value[ok], grad[ok] = regular(s[ok], w[ok], z[ok], xi[ok], phi[ok], sigma[ok])
    return value, grad


def _batch_hessian(theta, X, Y):
    B, p = theta.shape
    hess = np.empty((B, p, p))
    steps = 1e-5 * (1.0 + np.abs(theta))
    for j in range(p):
        up = theta.copy()
        dn = theta.copy()
        up[:, j] += steps[:, j]
        dn[:, j] -= steps[:, j]
        _, g_up = _batch_negloglik_and_grad(up, X, Y)
        _, g_dn = _batch_negloglik_and_grad(dn, X, Y)
        hess[:, j, :] = (g_up - g_dn) / (2.0 * steps[:, j])[:, None]
    return 0.5 * (hess + np.transpose(hess, (0, 2, 1)))


def _batch_gev_mle(X, Y, theta0, tol=1e-6, max_iter=40):
    """Damped-Newton MLE for every row of ``Y``, warm-started at ``theta0``.

    Returns (theta (B, p), converged mask). Rows whose gradient never reaches
    ``tol * (1 + |nll|)`` are flagged unconverged.
    """
    B = Y.shape[0]
    p = len(theta0)
    theta = np.tile(np.asarray(theta0, dtype=float), (B, 1))
    value, grad = _batch_negloglik_and_grad(theta, X, Y)

    def is_converged(value, grad):
        return np.max(np.abs(grad), axis=1) <= tol * (1.0 + np.abs(value))

    converged = is_converged(value, grad)
    for _ in range(max_iter):
        active = ~converged
        if not np.any(active):
            break
        hess = _batch_hessian(theta[active], X, Y[active])
        g_act = grad[active]
        try:
            step = np.linalg.solve(hess, -g_act[..., None])[..., 0]
        except np.linalg.LinAlgError:
            ridge = 1e-8 * np.eye(p)
            step = np.linalg.solve(hess + ridge, -g_act[..., None])[..., 0]

        idx = np.flatnonzero(active)
        accepted = np.zeros(len(idx), dtype=bool)
        best_theta = theta[idx].copy()
        best_value = value[idx].copy()
        best_grad = grad[idx].copy()
        damp = 1.0
        for _ in range(8):
            trial = theta[idx] + damp * step
            trial[:, -1] = np.clip(trial[:, -1], _SHAPE_MIN, _SHAPE_MAX)
            trial[:, -2] = np.clip(trial[:, -2], -20.0, 20.0)
            v_t, g_t = _batch_negloglik_and_grad(trial, X, Y[idx])
            better = ~accepted & np.isfinite(v_t) & (v_t < best_value)
            best_theta[better] = trial[better]
            best_value[better] = v_t[better]
            best_grad[better] = g_t[better]
            accepted |= better
            if np.all(accepted):
                break
            damp *= 0.25
        theta[idx] = best_theta
        value[idx] = best_value
        grad[idx] = best_grad
        newly = is_converged(value, grad)
        # rows that cannot improve and are still above tolerance stay active
        # until max_iter, then count as failures
        converged = converged | newly
        if not np.any(accepted) and not np.any(newly[idx]):
            break
    return theta, converged


@dataclass(frozen=True)
class GevFit:
    """Maximum-likelihood GEV fit with covariate-dependent location.

    ``coef_covariance`` is based on the observed information (numerical
    Hessian of the negative log-likelihood at the optimum) in the
    ``(location coefficients, scale, shape)`` parametrization.
    """

    column_names: tuple[str, ...]
    location_coefficients: np.ndarray
    scale: float
    shape: float
    log_likelihood: float
    coef_covariance: np.ndarray | None
    n: int
    gradient_norm: float

    def location(self, scenario: Scenario) -> float:
        total = float(self.location_coefficients[0])
        for name, coef in zip(self.column_names[1:], self.location_coefficients[1:]):
            total += float(coef) * scenario.value(name)
        return total

    def location_series(self, X: np.ndarray) -> np.ndarray:
        return self.location_coefficients[0] + X @ self.location_coefficients[1:]

    def named_coefficients(self) -> dict[str, float]:
        return {
            n: float(c) for n, c in zip(self.column_names, self.location_coefficients)
        }


@dataclass(frozen=True)
class RiskRatio:
    """Ratio of exceedance probabilities between two scenarios."""

    value: float
    p_factual: float
    p_counterfactual: float
    ci: tuple[float, float] | None = None
    p_value_rr1: float | None = None
    replicates_used: int = 0
    replicates_failed: int = 0


class GEVRegression(BaseEstimator):
    """GEV maximum-likelihood engine over a plain covariate matrix.

    The location parameter is ``intercept + X @ coef``; scale and shape are
    constant. ``fit`` accepts an (n, k) covariate array (k may be 0 for a
    stationary fit).
    """

    def __init__(self, min_samples: int = 20, tol: float = 1e-8,
                 max_iter: int = 500, compute_covariance: bool = True):
        self.min_samples = min_samples
        self.tol = tol
        self.max_iter = max_iter
        self.compute_covariance = compute_covariance

    def fit(self, X, y, column_names=None, start=None):
        y = as_float_array(y, name="response")
        if X is None or (hasattr(X, "shape") and 0 in np.shape(X)) or np.size(X) == 0:
            X = np.empty((len(y), 0))
        X = as_2d_array(X, name="covariates")
        if X.shape[0] != len(y):
            raise DataError(f"X rows {X.shape[0]} != response length {len(y)}")
        if len(y) < self.min_samples:
            raise InsufficientDataError(
                f"GEV fit needs at least {self.min_samples} observations, got {len(y)}"
            )
        if column_names is None:
            column_names = [f"x{i}" for i in range(X.shape[1])]
        if len(column_names) != X.shape[1]:
            raise DataError("one column name per covariate required")

        Xfull = np.column_stack([np.ones(len(y)), X])
        k = Xfull.shape[1]

        if start is None:
            starts = self._starting_points(Xfull, y)
        else:
            starts = [np.asarray(start, dtype=float)]

        best = None
        for theta0 in starts:
            res = minimize(
                _negloglik_and_grad,
                theta0,
                args=(Xfull, y),
                jac=True,
                method="L-BFGS-B",
                bounds=[(None, None)] * k + [(-20.0, 20.0), (_SHAPE_MIN, _SHAPE_MAX)],
                options={"maxiter": self.max_iter, "ftol": 1e-14, "gtol": self.tol},
            )
            if best is None or res.fun < best.fun:
                best = res
            if self._converged(res.fun, res.jac, res.x):
                best = res
                break

        theta, fun, jac = best.x.copy(), float(best.fun), np.asarray(best.jac)
        if not self._converged(fun, jac, theta):
            theta, fun, jac = self._newton_polish(theta, fun, jac, Xfull, y)
        if not self._converged(fun, jac, theta):
            raise NonConvergenceError(
                "GEV likelihood optimisation did not reach the gradient tolerance "
                f"{self.tol:g} (final gradient norm {np.max(np.abs(jac)):.3g})"
            )
        scale = math.exp(theta[k])
        shape = float(theta[k + 1])
        s = (y - Xfull @ theta[:k]) / scale
        if np.any(1.0 + shape * s <= 0.0):
            raise SupportViolationError(
                "fitted GEV places training observations outside its support"
            )

        cov = self._covariance(theta, Xfull, y, scale) if self.compute_covariance else None
        self.result_ = GevFit(
            column_names=("intercept", *column_names),
            location_coefficients=theta[:k].copy(),
            scale=float(scale),
            shape=shape,
            log_likelihood=-float(best.fun),
            coef_covariance=cov,
            n=len(y),
            gradient_norm=float(np.max(np.abs(best.jac))),
        )
        self.theta_ = theta.copy()
        self.n_features_in_ = X.shape[1]
        return self

    def _converged(self, fun, jac, theta):
        """Gradient tolerance scaled by the objective, ignoring active bounds."""
        jac = np.asarray(jac, dtype=float).copy()
        if theta[-1] <= _SHAPE_MIN + 1e-12 and jac[-1] > 0:
            jac[-1] = 0.0  # shape pinned at the regularity bound
        return float(np.max(np.abs(jac))) <= self.tol * (1.0 + abs(fun))

    def _newton_polish(self, theta, fun, jac, Xfull, y):
        """Drive the gradient below tolerance with damped Newton steps."""
        for _ in range(8):
            if self._converged(fun, jac, theta):
                break
            hess = _numerical_hessian(theta, Xfull, y)
            try:
                step = np.linalg.solve(hess, -jac)
            except np.linalg.LinAlgError:
                break
            improved = False
            for damp in (1.0, 0.5, 0.25, 0.1, 0.01):
                cand = theta + damp * step
                cand[-1] = np.clip(cand[-1], _SHAPE_MIN, _SHAPE_MAX)
                f_c, g_c = _negloglik_and_grad(cand, Xfull, y)
                if f_c <= fun and f_c < _PENALTY:
                    theta, fun, jac = cand, float(f_c), g_c
                    improved = True
                    break
            if not improved:
                break
        return theta, fun, jac

    def _starting_points(self, Xfull, y):
        # detrend with least squares, then PWM on the residual distribution
        beta, *_ = np.linalg.lstsq(Xfull, y, rcond=None)
        resid = y - Xfull @ beta
        loc_r, scale, shape = _pwm_start(resid)
        b = beta.copy()
        b[0] += loc_r

        def assemble(b, scale, shape):
            s = (y - Xfull @ b) / scale
            # inflate scale until every point is inside the support
            for _ in range(60):
                if np.all(1.0 + shape * s > 1e-6):
                    break
                scale *= 1.5
                s = (y - Xfull @ b) / scale
            return np.concatenate([b, [math.log(scale), shape]])

        return [
            assemble(b.copy(), scale, shape),
            assemble(b.copy(), scale, 0.0),
            assemble(b.copy(), scale * 2.0, 0.1),
        ]

    def _covariance(self, theta, Xfull, y, scale):
        p = len(theta)
        hess = _numerical_hessian(theta, Xfull, y)
        try:
            cov_theta = np.linalg.inv(hess)
        except np.linalg.LinAlgError:
            return None
        # delta method from log-scale to scale
        jac = np.eye(p)
        jac[p - 2, p - 2] = scale
        return jac @ cov_theta @ jac.T


def gev_fit(dataset: Dataset, min_samples: int = 20, tol: float = 1e-8) -> GevFit:
    """Fit the GEV counterfactual model to an aligned dataset."""
    est = GEVRegression(min_samples=min_samples, tol=tol)
    est.fit(
        dataset.covariate_matrix() if dataset.covariates else None,
        dataset.response.values,
        column_names=list(dataset.covariate_names),
    )
    return est.result_


def return_level(fit: GevFit, scenario: Scenario, period: float) -> float:
    """The (1 - 1/period)-quantile of the GEV under the scenario's location."""
    if not (period > 1.0):
        raise InvalidPeriodError(f"return period must exceed 1, got {period}")
    mu = fit.location(scenario)
    y_p = -math.log1p(-1.0 / period)
    if fit.shape == 0.0:
        return mu - fit.scale * math.log(y_p)
    return mu + fit.scale * math.expm1(-fit.shape * math.log(y_p)) / fit.shape


def exceedance_prob(fit: GevFit, scenario: Scenario, threshold: float) -> float:
    """P(Y > threshold) under the scenario's location."""
    mu = fit.location(scenario)
    s = (threshold - mu) / fit.scale
    if fit.shape == 0.0:
        t = s
    else:
        z = 1.0 + fit.shape * s
        if z <= 0.0:
            # outside the support: certain exceedance below a lower bound,
            # impossible above an upper bound
            return 1.0 if fit.shape > 0.0 else 0.0
        t = math.log1p(fit.shape * s) / fit.shape
    return -math.expm1(-math.exp(-t))


def risk_ratio(
    fit: GevFit, factual: Scenario, counterfactual: Scenario, threshold: float
) -> RiskRatio:
    """Ratio of exceedance probabilities, factual over counterfactual."""
    p_f = exceedance_prob(fit, factual, threshold)
    p_c = exceedance_prob(fit, counterfactual, threshold)
    if p_c < 1e-300:
        raise ZeroDenominatorError(
            "counterfactual exceedance probability is numerically zero"
        )
    return RiskRatio(value=p_f / p_c, p_factual=p_f, p_counterfactual=p_c)


def _standard_gev_sample(rng, n, shape):
    """Draws from the standard GEV(0, 1, shape) by inverting the CDF."""
    u = rng.uniform(size=n)
    x = -np.log(-np.log(u))
    if shape == 0.0:
        return x
    return np.expm1(shape * x) / shape


def _vector_exceedance(threshold, mu, sigma, xi):
    """Exceedance probability for per-replicate (mu, sigma, xi) arrays."""
    s = (threshold - mu) / sigma
    w = xi * s
    z = 1.0 + w
    small = np.abs(xi) < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.log1p(w) / xi
    t = np.where(small, s, t)
    out = -np.expm1(-np.exp(-t))
    out = np.where((z <= 0.0) & (xi > 0.0), 1.0, out)
    out = np.where((z <= 0.0) & (xi < 0.0), 0.0, out)
    return out


def test_rr_one(
    dataset: Dataset,
    factual: Scenario,
    counterfactual: Scenario,
    threshold: float,
    replicates: int = 500,
    seed: int = 0,
    level: float = 0.95,
    min_samples: int = 20,
    tol: float = 1e-8,
) -> RiskRatio:
    """Parametric-bootstrap test of the no-change null (risk ratio of one).

    Data are resampled from the fitted GEV along the factual covariate
    history, refit, and the risk ratio recomputed. The interval is a
    percentile interval on the log risk ratio and the p-value is the
    two-sided tail proportion of the replicate log ratios against zero.
    Replicates whose refit fails to converge are dropped and counted; more
    than 10% failures aborts.
    """
    check_probability(level, "level")
    if replicates < 500:
        raise TooFewReplicatesError(
            f"risk-ratio bootstrap needs >= 500 replicates, got {replicates}"
        )

    est = GEVRegression(min_samples=min_samples, tol=tol, compute_covariance=False)
    X = dataset.covariate_matrix() if dataset.covariates else None
    est.fit(X, dataset.response.values, column_names=list(dataset.covariate_names))
    fit = est.result_
    base = risk_ratio(fit, factual, counterfactual, threshold)

    n = fit.n
    Xfull = np.ones((n, 1)) if X is None else np.column_stack([np.ones(n), X])
    mu_t = Xfull @ fit.location_coefficients

    master = np.random.SeedSequence(seed)
    children = master.spawn(replicates)
    Y = np.empty((replicates, n))
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        Y[i] = mu_t + fit.scale * _standard_gev_sample(rng, n, fit.shape)

    theta_b, converged = _batch_gev_mle(Xfull, Y, est.theta_, tol=1e-6)
    k = Xfull.shape[1]
    x_f = np.concatenate(
        [[1.0], [factual.value(c) for c in dataset.covariate_names]])
    x_c = np.concatenate(
        [[1.0], [counterfactual.value(c) for c in dataset.covariate_names]])
    sigma_b = np.exp(theta_b[:, k])
    xi_b = theta_b[:, k + 1]
    p_f = _vector_exceedance(threshold, theta_b[:, :k] @ x_f, sigma_b, xi_b)
    p_c = _vector_exceedance(threshold, theta_b[:, :k] @ x_c, sigma_b, xi_b)
    valid = converged & (p_c > 1e-300) & (p_f > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rrs = np.log(p_f[valid] / p_c[valid])
    failed = int(replicates - valid.sum())

    if failed > 0.10 * replicates:
        raise NonConvergenceError(
            f"{failed}/{replicates} bootstrap refits failed; data too unstable "
            "for the risk-ratio test"
        )
    alpha = 1.0 - level
    lo, hi = np.percentile(log_rrs, [100 * alpha / 2.0, 100 * (1 - alpha / 2.0)])
    p = 2.0 * min(float(np.mean(log_rrs <= 0.0)), float(np.mean(log_rrs >= 0.0)))
    return RiskRatio(
        value=base.value,
        p_factual=base.p_factual,
        p_counterfactual=base.p_counterfactual,
        ci=(math.exp(lo), math.exp(hi)),
        p_value_rr1=min(p, 1.0),
        replicates_used=len(log_rrs),
        replicates_failed=failed,
    )
