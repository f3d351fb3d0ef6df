"""Scenario-contrast regression: fits, scenario algebra, and the bootstrap.

Frozen reference values for the bundled snapshot were computed with an
independent normal-equations solver (scripts/make_snapshot.py); the
spreadsheet-style oracles below recompute scenario ingredients from the raw
CSVs with the stdlib only.
"""

import csv
import statistics

import numpy as np
import pytest

from climattr import (
    CounterfactualRegression,
    CovariateRole,
    Dataset,
    Scenario,
    TimeSeries,
    bundled_data_dir,
    make_era_scenarios,
    t_test_zero,
)
from climattr.exceptions import (
    DataError,
    IncompleteScenarioError,
    MissingAuxiliarySeriesError,
    TooFewReplicatesError,
)
from conftest import make_series


def simple_dataset(seed=0, n=80, beta=(2.0, 3.0), intercept=5.0, noise=0.0):
    rng = np.random.default_rng(seed)
    xf = rng.normal(size=n)
    xd = rng.normal(size=n)
    y = intercept + beta[0] * xf + beta[1] * xd + noise * rng.normal(size=n)
    years = np.arange(1900, 1900 + n)
    return Dataset(
        response=TimeSeries("Y", "degC", years, y),
        covariates=(
            (TimeSeries("F", "W m-2", years, xf), CovariateRole.FORCED),
            (TimeSeries("D", "degC", years, xd), CovariateRole.DRIVER),
        ),
    )


class TestFit:
    def test_response_equal_to_covariate(self):
        years = np.arange(1900, 1950)
        rng = np.random.default_rng(1)
        x = rng.normal(size=50)
        w = rng.normal(size=50)
        ds = Dataset(
            response=TimeSeries("Y", "degC", years, x.copy()),
            covariates=(
                (TimeSeries("x", "degC", years, x), CovariateRole.FORCED),
                (TimeSeries("w", "degC", years, w), CovariateRole.DRIVER),
            ),
        )
        model = CounterfactualRegression().fit(ds)
        fit = model.fit_result
        assert fit.coef("x") == pytest.approx(1.0, abs=1e-10)
        assert fit.coef("w") == pytest.approx(0.0, abs=1e-10)
        assert fit.residual_sd == pytest.approx(0.0, abs=1e-10)

    def test_exact_synthetic_coefficients(self):
        model = CounterfactualRegression().fit(simple_dataset())
        fit = model.fit_result
        assert fit.coef("intercept") == pytest.approx(5.0, abs=1e-10)
        assert fit.coef("F") == pytest.approx(2.0, abs=1e-10)
        assert fit.coef("D") == pytest.approx(3.0, abs=1e-10)

    def test_no_covariates_rejected(self):
        years = np.arange(1900, 1950)
        ds_resp = TimeSeries("Y", "degC", years, np.zeros(50))
        with pytest.raises(DataError):
            CounterfactualRegression().fit(
                Dataset(response=ds_resp, covariates=())
            )

    def test_bundled_fit_diagnostics(self, bundled_dataset):
        model = CounterfactualRegression().fit(bundled_dataset)
        assert model.r_squared == pytest.approx(0.8570924482008067, abs=1e-9)
        assert model.residual_sd == pytest.approx(0.1299348674930638, abs=1e-9)
        fit = model.fit_result
        assert fit.coef("ANT") == pytest.approx(0.4897682886, abs=1e-7)
        assert fit.coef("vSAOD") == pytest.approx(-1.4001019370, abs=1e-7)
        assert fit.coef("Nino34") == pytest.approx(0.0809959930, abs=1e-7)


class TestScenarioMean:
    def test_all_zero_assignment_gives_intercept(self):
        model = CounterfactualRegression().fit(simple_dataset())
        m0 = model.fit_result.coef("intercept")
        s = Scenario("zeros", {"F": 0.0, "D": 0.0})
        assert model.scenario_mean(s) == pytest.approx(m0, rel=1e-12)

    def test_linearity_in_one_covariate(self):
        model = CounterfactualRegression().fit(simple_dataset())
        s1 = Scenario("a", {"F": 1.0, "D": 2.0})
        s2 = Scenario("b", {"F": 1.7, "D": 2.0})
        dm = model.scenario_mean(s2) - model.scenario_mean(s1)
        assert dm == pytest.approx(model.fit_result.coef("F") * 0.7, rel=1e-10)

    def test_incomplete_scenario(self):
        model = CounterfactualRegression().fit(simple_dataset())
        with pytest.raises(IncompleteScenarioError):
            model.scenario_mean(Scenario("bad", {"F": 0.0}))
        with pytest.raises(IncompleteScenarioError):
            model.scenario_mean(Scenario("bad", {"F": 0.0, "D": 0.0, "Q": 1.0}))


class TestDelta:
    def setup_method(self):
        self.model = CounterfactualRegression().fit(simple_dataset(noise=0.5))
        self.s = lambda name, f, d: Scenario(name, {"F": f, "D": d})

    def test_identical_scenarios(self):
        ce = self.model.delta(self.s("a", 1, 2), self.s("b", 1, 2))
        assert ce.delta == 0.0
        assert ce.p_value == 1.0
        assert ce.ci == (0.0, 0.0)

    def test_additive(self):
        s1, s2, s3 = self.s("1", 0, 0), self.s("2", 1, -1), self.s("3", 2, 3)
        total = self.model.delta(s1, s3).delta
        parts = self.model.delta(s1, s2).delta + self.model.delta(s2, s3).delta
        assert total == pytest.approx(parts, rel=1e-12, abs=1e-12)

    def test_antisymmetric(self):
        s1, s2 = self.s("1", 0, 1), self.s("2", 2, -1)
        assert self.model.delta(s1, s2).delta == pytest.approx(
            -self.model.delta(s2, s1).delta, rel=1e-12
        )

    def test_intercept_cancels(self):
        # shifting the response moves only the intercept; contrasts are unchanged
        ds = simple_dataset(noise=0.5)
        shifted = Dataset(
            response=ds.response.with_values(ds.response.values + 42.0),
            covariates=ds.covariates,
        )
        m1 = CounterfactualRegression().fit(ds)
        m2 = CounterfactualRegression().fit(shifted)
        s1, s2 = self.s("1", 0, 1), self.s("2", 2, -1)
        d1, d2 = m1.delta(s1, s2), m2.delta(s1, s2)
        assert d1.delta == pytest.approx(d2.delta, rel=1e-10)
        assert d1.ci == pytest.approx(d2.ci, rel=1e-9)
        assert d1.p_value == pytest.approx(d2.p_value, rel=1e-9)

    def test_single_covariate_contrast_matches_t_test(self):
        s1, s2 = self.s("1", 0.0, 1.5), self.s("2", 2.5, 1.5)
        ce = self.model.delta(s1, s2)
        t = t_test_zero(self.model.fit_result, "F")
        assert ce.p_value == pytest.approx(t.p_value, abs=1e-10)

    def test_level_is_validated(self):
        with pytest.raises(DataError):
            self.model.delta(self.s("1", 0, 0), self.s("2", 1, 1), level=1.5)


class TestEraScenarios:
    def test_constant_covariates_collapse(self):
        years = np.arange(1900, 1960)
        rng = np.random.default_rng(2)
        ds = Dataset(
            response=TimeSeries("Y", "degC", years, rng.normal(size=60)),
            covariates=(
                (TimeSeries("F", "W m-2", years, np.full(60, 2.0)),
                 CovariateRole.FORCED),
            ),
        )
        pi, pd = make_era_scenarios(ds, "F", (1900, 1929), 1955)
        assert pi.assignment == pd.assignment

    def test_bundled_assignments_match_spreadsheet_oracle(self, bundled_dataset):
        pi, pd = make_era_scenarios(bundled_dataset, "ANT", (1900, 1929), 2015)

        # independent recomputation from the raw CSVs with the stdlib
        def read(fname):
            with open(bundled_data_dir() / fname, newline="") as fh:
                rows = list(csv.reader(fh))[1:]
            return {int(r[0]): float(r[1]) for r in rows}

        ghg, aer = read("ghg_forcing.csv"), read("aerosol_forcing.csv")
        ant = {y: ghg[y] + aer[y] - (ghg[1900] + aer[1900]) for y in ghg}
        pi_mean = statistics.fmean(ant[y] for y in range(1900, 1930))
        assert pi.assignment["ANT"] == pytest.approx(pi_mean, rel=1e-12)
        assert pd.assignment["ANT"] == pytest.approx(ant[2015], rel=1e-12)

        nino = read("nino34.csv")
        full_mean = statistics.fmean(nino.values())
        assert pi.assignment["Nino34"] == pytest.approx(full_mean, rel=1e-12)
        assert pd.assignment["Nino34"] == pytest.approx(full_mean, rel=1e-12)

    def test_constant_forcing_midpoint_contrast_is_zero(self):
        years = np.arange(1900, 1960)
        rng = np.random.default_rng(3)
        ds = Dataset(
            response=TimeSeries("Y", "degC", years, rng.normal(size=60)),
            covariates=(
                (TimeSeries("F", "W m-2", years, np.full(60, 1.0)),
                 CovariateRole.FORCED),
                (TimeSeries("D", "degC", years, rng.normal(size=60)),
                 CovariateRole.DRIVER),
            ),
        )
        pi, pd = make_era_scenarios(ds, "F", (1900, 1929), 1915)
        model = CounterfactualRegression(include_intercept=False).fit(ds)
        assert model.delta(pi, pd).delta == 0.0


class TestFactorDeltas:
    def test_scaled_by_range(self):
        # coefficient 1 on D, range 2 -> delta exactly 2
        years = np.arange(1900, 1960)
        rng = np.random.default_rng(4)
        f = rng.normal(size=60)
        d = np.linspace(-1.0, 1.0, 60)
        y = 0.5 * f + 1.0 * d
        ds = Dataset(
            response=TimeSeries("Y", "degC", years, y),
            covariates=(
                (TimeSeries("F", "W m-2", years, f), CovariateRole.FORCED),
                (TimeSeries("D", "degC", years, d), CovariateRole.DRIVER),
            ),
            auxiliary=(TimeSeries("Fpart", "W m-2", years, f),),
        )
        model = CounterfactualRegression(include_intercept=False).fit(ds)
        out = model.factor_deltas("F", (1900, 1929), 1959)
        assert out["D"].delta == pytest.approx(2.0, abs=1e-9)

    def test_zero_range_driver(self):
        years = np.arange(1900, 1960)
        rng = np.random.default_rng(5)
        f = rng.normal(size=60)
        ds = Dataset(
            response=TimeSeries("Y", "degC", years, 2 * f),
            covariates=(
                (TimeSeries("F", "W m-2", years, f), CovariateRole.FORCED),
                (TimeSeries("D", "degC", years, np.full(60, 3.0)),
                 CovariateRole.DRIVER),
            ),
            auxiliary=(TimeSeries("Fpart", "W m-2", years, f),),
        )
        model = CounterfactualRegression(include_intercept=False).fit(ds)
        out = model.factor_deltas("F", (1900, 1929), 1959)
        assert out["D"].delta == 0.0
        assert out["D"].p_value == pytest.approx(
            t_test_zero(model.fit_result, "D").p_value
        )

    def test_missing_auxiliary(self, bundled_dataset):
        ds = Dataset(
            response=bundled_dataset.response,
            covariates=bundled_dataset.covariates,
        )
        model = CounterfactualRegression().fit(ds)
        with pytest.raises(MissingAuxiliarySeriesError):
            model.factor_deltas("ANT")

    def test_bundled_decomposition(self, bundled_dataset):
        model = CounterfactualRegression().fit(bundled_dataset)
        out = model.factor_deltas("ANT", (1900, 1929), 2015)
        assert out["GHG"].delta == pytest.approx(1.2993879210, abs=1e-6)
        assert out["AER"].delta == pytest.approx(-0.2698786526, abs=1e-6)
        assert out["vSAOD"].delta == pytest.approx(-0.1611657340, abs=1e-6)
        assert out["Nino34"].delta == pytest.approx(0.2126144815, abs=1e-6)


class TestBootstrap:
    def setup_method(self):
        self.model = CounterfactualRegression().fit(simple_dataset(noise=0.5))

    def test_identical_scenarios(self):
        s = Scenario("s", {"F": 1.0, "D": 2.0})
        ce = self.model.bootstrap_delta(s, s, replicates=300, seed=1)
        assert ce.delta == 0.0
        assert ce.ci == (0.0, 0.0)
        assert ce.p_value == 1.0

    def test_seed_reproducibility_bit_identical(self):
        s1 = Scenario("a", {"F": 0.0, "D": 0.0})
        s2 = Scenario("b", {"F": 1.0, "D": 0.0})
        ce1 = self.model.bootstrap_delta(s1, s2, replicates=400, seed=77)
        ce2 = self.model.bootstrap_delta(s1, s2, replicates=400, seed=77)
        assert ce1 == ce2

    def test_replicate_floor(self):
        s1 = Scenario("a", {"F": 0.0, "D": 0.0})
        s2 = Scenario("b", {"F": 1.0, "D": 0.0})
        with pytest.raises(TooFewReplicatesError):
            self.model.bootstrap_delta(s1, s2, replicates=100, seed=0)

    def test_bundled_bootstrap_brackets_analytic(self, bundled_dataset):
        model = CounterfactualRegression().fit(bundled_dataset)
        pi, pd = make_era_scenarios(bundled_dataset, "ANT", (1900, 1929), 2015)
        analytic = model.delta(pi, pd)
        boot = model.bootstrap_delta(pi, pd, replicates=2000, seed=11)
        assert boot.delta == pytest.approx(analytic.delta, rel=1e-12)
        assert boot.ci[0] == pytest.approx(analytic.ci[0], abs=0.03)
        assert boot.ci[1] == pytest.approx(analytic.ci[1], abs=0.03)
        assert boot.p_value < 0.01
