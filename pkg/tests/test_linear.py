"""Least-squares engine: estimates, inference, and algebraic identities.

Independent oracles: explicit normal equations solved with numpy, and
distribution constants precomputed with mpmath (30 significant digits):

    t quantile (0.975, dof 10)          2.2281388519862747
    two-sided p at |t| = 2, dof 20      0.05926553544657047
"""

import numpy as np
import pytest

from climattr import (
    DesignMatrix,
    OLSInference,
    coef_ci,
    f_test_nested,
    ols_fit,
    t_test_value,
    t_test_zero,
)
from climattr.exceptions import (
    IllConditionedError,
    InsufficientDataError,
    NotNestedError,
    UnknownCoefficientError,
)

T_10_975 = 2.2281388519862747
P_T2_DOF20 = 0.05926553544657047


def normal_equations(X, y):
    """Brute-force reference solution."""
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    resid = y - X @ beta
    return beta, float(resid @ resid)


class TestOlsFit:
    def test_exact_line(self):
        d = DesignMatrix.from_columns([("x", [0, 1, 2])], intercept=True)
        fit = ols_fit(d, [1, 2, 3])
        assert fit.coef("intercept") == pytest.approx(1.0, abs=1e-12)
        assert fit.coef("x") == pytest.approx(1.0, abs=1e-12)
        assert fit.rss == pytest.approx(0.0, abs=1e-24)
        assert fit.r_squared == pytest.approx(1.0)

    def test_intercept_only_constant_response(self):
        d = DesignMatrix.intercept_only(5)
        fit = ols_fit(d, [3.5] * 5)
        assert fit.coef("intercept") == pytest.approx(3.5)
        assert fit.residual_sd == pytest.approx(0.0, abs=1e-12)

    def test_hand_solved_normal_equations(self):
        # X'X = [[4, 6], [6, 14]], X'y = [9, 18] -> beta = (0.9, 0.9)
        d = DesignMatrix.from_columns([("x", [0, 1, 2, 3])], intercept=True)
        fit = ols_fit(d, [1, 2, 2, 4])
        assert fit.coef("intercept") == pytest.approx(0.9, abs=1e-12)
        assert fit.coef("x") == pytest.approx(0.9, abs=1e-12)

    def test_matches_brute_force_on_random_designs(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = rng.integers(5, 11)
            k = rng.integers(1, min(n - 1, 4))
            X = rng.normal(size=(n, k))
            y = rng.normal(size=n)
            d = DesignMatrix.from_columns(
                [(f"x{i}", X[:, i]) for i in range(k)], intercept=True
            )
            fit = ols_fit(d, y)
            Xf = np.column_stack([np.ones(n), X])
            beta, rss = normal_equations(Xf, y)
            assert np.allclose(fit.coefficients, beta, rtol=1e-12, atol=1e-12)
            assert fit.rss == pytest.approx(rss, rel=1e-10, abs=1e-12)

    def test_residuals_orthogonal_to_design(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(60, 3))
        d = DesignMatrix.from_columns([(f"x{i}", X[:, i]) for i in range(3)])
        fit = ols_fit(d, rng.normal(size=60))
        for j in range(d.k):
            assert abs(d.values[:, j] @ fit.residuals) < 1e-8 * d.n

    def test_rss_and_sd_consistency(self):
        rng = np.random.default_rng(3)
        d = DesignMatrix.from_columns([("x", rng.normal(size=30))], intercept=True)
        fit = ols_fit(d, rng.normal(size=30))
        assert fit.rss == pytest.approx(float(fit.residuals @ fit.residuals), rel=1e-10)
        assert fit.residual_sd == pytest.approx(np.sqrt(fit.rss / fit.dof), rel=1e-12)
        assert 0.0 <= fit.r_squared <= 1.0

    def test_collinear_raises(self):
        x = np.arange(10.0)
        d = DesignMatrix.from_columns([("a", x), ("b", 2 * x)], intercept=False)
        assert d.is_ill_conditioned
        with pytest.raises(IllConditionedError):
            ols_fit(d, np.arange(10.0))

    def test_insufficient_data(self):
        with pytest.raises(InsufficientDataError):
            DesignMatrix.from_columns([("x", [1.0, 2.0])], intercept=True)

    def test_zero_column_dropped_with_zero_coefficient(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=20)
        d = DesignMatrix.from_columns([("x", x), ("z", np.zeros(20))], intercept=True)
        fit = ols_fit(d, 2 * x + 1)
        assert fit.coef("z") == 0.0
        assert np.isnan(fit.se("z"))
        assert fit.coef("x") == pytest.approx(2.0, abs=1e-10)

    def test_scaling_a_predictor(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=50)
        w = rng.normal(size=50)
        y = 1 + 2 * x - w + rng.normal(size=50)
        c = 3.7
        d1 = DesignMatrix.from_columns([("x", x), ("w", w)], intercept=True)
        d2 = DesignMatrix.from_columns([("x", c * x), ("w", w)], intercept=True)
        f1, f2 = ols_fit(d1, y), ols_fit(d2, y)
        assert f2.coef("x") == pytest.approx(f1.coef("x") / c, rel=1e-10)
        assert f2.rss == pytest.approx(f1.rss, rel=1e-10)
        assert f2.r_squared == pytest.approx(f1.r_squared, rel=1e-10)
        assert t_test_zero(f2, "x").p_value == pytest.approx(
            t_test_zero(f1, "x").p_value, rel=1e-10
        )
        assert np.allclose(f1.fitted, f2.fitted, rtol=1e-10)


class TestCoefCi:
    def test_perfect_fit_collapses(self):
        d = DesignMatrix.from_columns([("x", [0, 1, 2])], intercept=True)
        fit = ols_fit(d, [1, 2, 3])
        lo, hi = coef_ci(fit, "x", 0.95)
        assert lo == pytest.approx(1.0, abs=1e-10)
        assert hi == pytest.approx(1.0, abs=1e-10)

    def test_t_quantile_dof10(self):
        # beta 1, se 0.5, dof 10 -> 1 +/- 2.2281... * 0.5
        rng = np.random.default_rng(5)
        X = rng.normal(size=(12, 1))
        d = DesignMatrix.from_columns([("x", X[:, 0])], intercept=True)
        fit = ols_fit(d, rng.normal(size=12))
        assert fit.dof == 10
        lo, hi = coef_ci(fit, "x", 0.95)
        se = fit.se("x")
        assert hi - lo == pytest.approx(2 * T_10_975 * se, rel=1e-9)

    def test_unknown_coefficient(self):
        d = DesignMatrix.from_columns([("x", [0, 1, 2])], intercept=True)
        fit = ols_fit(d, [1, 2, 3])
        with pytest.raises(UnknownCoefficientError):
            coef_ci(fit, "nope", 0.95)


class TestTTests:
    def test_zero_estimate_gives_p_one(self):
        x = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
        y = np.array([1.0, 1.0, -1.0, -1.0, 1.0, 1.0])  # orthogonal to x
        d = DesignMatrix.from_columns([("x", x)], intercept=False)
        fit = ols_fit(d, y)
        assert fit.coef("x") == pytest.approx(0.0, abs=1e-15)
        assert t_test_zero(fit, "x").p_value == 1.0

    def test_p_value_from_t2_dof20(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(22, 1))
        d = DesignMatrix.from_columns([("x", X[:, 0])], intercept=True)
        fit = ols_fit(d, rng.normal(size=22))
        assert fit.dof == 20
        # shift the null so the statistic is exactly 2
        value = fit.coef("x") - 2.0 * fit.se("x")
        res = t_test_value(fit, "x", value)
        assert res.statistic == pytest.approx(2.0, rel=1e-12)
        assert res.p_value == pytest.approx(P_T2_DOF20, rel=1e-9)

    def test_value_equal_estimate(self):
        d = DesignMatrix.from_columns([("x", [0, 1, 2])], intercept=True)
        fit = ols_fit(d, [1, 2, 3])
        assert t_test_value(fit, "x", fit.coef("x")).p_value == 1.0

    def test_noiseless_recovery_vs_one(self):
        x = np.arange(8.0)
        d = DesignMatrix.from_columns([("x", x)], intercept=False)
        fit = ols_fit(d, x.copy())
        assert t_test_value(fit, "x", 1.0).p_value == 1.0


class TestFTestNested:
    def _fits(self, seed=2, n=40, extra_zero=False):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n)
        w = rng.normal(size=n)
        y = 1 + 0.5 * x + rng.normal(size=n)
        cols_full = [("x", x), ("w", np.zeros(n) if extra_zero else w)]
        full = ols_fit(DesignMatrix.from_columns(cols_full, intercept=True), y)
        reduced = ols_fit(DesignMatrix.from_columns([("x", x)], intercept=True), y)
        return full, reduced

    def test_zero_column_adds_nothing(self):
        full, reduced = self._fits(extra_zero=True)
        res = f_test_nested(full, reduced)
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_single_drop_equals_t_squared(self):
        full, reduced = self._fits()
        res = f_test_nested(full, reduced)
        t = t_test_zero(full, "w")
        assert res.statistic == pytest.approx(t.statistic**2, rel=1e-10)
        assert res.p_value == pytest.approx(t.p_value, rel=1e-10)

    def test_lagged_signal_is_detected(self):
        rng = np.random.default_rng(99)
        n = 201
        x = rng.normal(size=n)
        y = np.zeros(n)
        for t in range(1, n):
            y[t] = 0.8 * x[t - 1] + rng.normal()
        full = ols_fit(
            DesignMatrix.from_columns([("xlag", x[:-1])], intercept=True), y[1:]
        )
        reduced = ols_fit(DesignMatrix.intercept_only(n - 1), y[1:])
        res = f_test_nested(full, reduced)
        assert res.p_value < 0.05
        assert res.statistic > 10

    def test_not_nested(self):
        rng = np.random.default_rng(4)
        x, w, y = rng.normal(size=(3, 30))
        fx = ols_fit(DesignMatrix.from_columns([("x", x)], intercept=True), y)
        fw = ols_fit(DesignMatrix.from_columns([("w", w)], intercept=True), y)
        with pytest.raises(NotNestedError):
            f_test_nested(fx, fw)

    def test_different_response_rejected(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=30)
        w = rng.normal(size=30)
        full = ols_fit(
            DesignMatrix.from_columns([("x", x), ("w", w)], intercept=True),
            rng.normal(size=30),
        )
        reduced = ols_fit(
            DesignMatrix.from_columns([("x", x)], intercept=True),
            rng.normal(size=30) + 50,
        )
        with pytest.raises(NotNestedError):
            f_test_nested(full, reduced)


class TestOLSInferenceEstimator:
    def test_fit_predict(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(50, 2))
        y = 2.0 + X @ np.array([1.5, -0.5]) + 0.01 * rng.normal(size=50)
        est = OLSInference().fit(X, y, column_names=["a", "b"])
        assert est.intercept_ == pytest.approx(2.0, abs=0.02)
        assert np.allclose(est.coef_, [1.5, -0.5], atol=0.02)
        pred = est.predict(X)
        assert np.allclose(pred, y, atol=0.05)

    def test_get_params_round_trip(self):
        est = OLSInference(fit_intercept=False, cond_max=1e6)
        params = est.get_params()
        assert params == {"fit_intercept": False, "cond_max": 1e6}
        clone = OLSInference(**params)
        assert clone.get_params() == params

    def test_conf_int_keys(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(30, 1))
        est = OLSInference().fit(X, rng.normal(size=30))
        ci = est.conf_int(0.9)
        assert set(ci) == {"intercept", "x0"}
