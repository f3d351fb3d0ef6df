"""Observation-driven climate change detection and attribution.

The package provides four complementary analysis routes on annual time
series: scenario-contrast regression on reconstructed forcings and climate
drivers, classical Granger causality tests, fingerprint scaling-factor
regression, and GEV-based event attribution, plus a synthetic causal-graph
generator for validating the tests and a CLI that runs a full analysis from
one YAML config.
"""

__version__ = "0.1.0"

from .counterfactual import (
    ChangeEstimate,
    CounterfactualRegression,
    Scenario,
    make_era_scenarios,
)
from .exceptions import ClimattrError, DataError, NumericalError
from .extremes import (
    GevFit,
    GEVRegression,
    RiskRatio,
    exceedance_prob,
    gev_fit,
    return_level,
    risk_ratio,
    test_rr_one,
)
from .fingerprint import (
    FingerprintRegression,
    FingerprintSet,
    ScalingFactors,
    compare_with_counterfactual,
    of_fit,
)
from .granger import (
    GcResult,
    VarSpec,
    build_lagged_design,
    gaussian_transfer_entropy,
    gc_test,
    select_order,
)
from .io import load_csv, write_csv
from .linear import (
    DesignMatrix,
    FitResult,
    OLSInference,
    TestResult,
    coef_ci,
    f_test_nested,
    ols_fit,
    t_test_value,
    t_test_zero,
)
from .series import (
    CovariateRole,
    Dataset,
    TimeSeries,
    align,
    anomalies,
    baseline_shift,
    climatological_mean,
    series_range,
    sum_series,
)
from .simulate import (
    CausalGraphSpec,
    Edge,
    ExperimentReport,
    confounder_graph,
    confounder_plus_independent_graph,
    direct_edge_graph,
    mediator_graph,
    null_graph,
    run_size_power,
    simulate,
)

__all__ = [
    "__version__",
    "ChangeEstimate", "CounterfactualRegression", "Scenario", "make_era_scenarios",
    "ClimattrError", "DataError", "NumericalError",
    "GevFit", "GEVRegression", "RiskRatio", "exceedance_prob", "gev_fit",
    "return_level", "risk_ratio", "test_rr_one",
    "FingerprintRegression", "FingerprintSet", "ScalingFactors",
    "compare_with_counterfactual", "of_fit",
    "GcResult", "VarSpec", "build_lagged_design", "gaussian_transfer_entropy",
    "gc_test", "select_order",
    "load_csv", "write_csv",
    "DesignMatrix", "FitResult", "OLSInference", "TestResult", "coef_ci",
    "f_test_nested", "ols_fit", "t_test_value", "t_test_zero",
    "CovariateRole", "Dataset", "TimeSeries", "align", "anomalies",
    "baseline_shift", "climatological_mean", "series_range", "sum_series",
    "CausalGraphSpec", "Edge", "ExperimentReport", "confounder_graph",
    "confounder_plus_independent_graph", "direct_edge_graph", "mediator_graph",
    "null_graph", "run_size_power", "simulate",
]


def bundled_data_dir():
    """Path to the packaged data snapshot (CSV series + example config)."""
    from pathlib import Path

    return Path(__file__).parent / "data"


def bundled_config_path():
    """Path to the packaged end-to-end example configuration."""
    return bundled_data_dir() / "gmst_analysis.yaml"
