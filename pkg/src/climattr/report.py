"""Analysis orchestration and machine-readable reporting.

``run_analysis`` executes the ingestion -> transforms -> fit -> scenarios ->
tests chain described by a configuration and returns a plain, JSON-ready
dictionary. The quantities table mirrors the shape of a published attribution
summary: one row per coefficient and per scenario change, plus the residual
internal-variability scale. Reports carry provenance (config hash, data file
hashes, seed) and contain no timestamps, so identical inputs yield
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import AnalysisConfig, build_dataset, data_file_hashes, load_series
from .counterfactual import CounterfactualRegression, Scenario, make_era_scenarios
from .exceptions import ConfigError
from .extremes import gev_fit, risk_ratio, test_rr_one
from .fingerprint import FingerprintSet, of_fit
from .granger import VarSpec, gc_test
from .io import load_csv, write_csv
from .linear import t_test_zero
from .series import CovariateRole, Dataset


def _quantity(name, estimate, ci_lo, ci_hi, p_value, units):
    return {
        "name": name,
        "best_estimate": float(estimate),
        "ci_lo": None if ci_lo is None else float(ci_lo),
        "ci_hi": None if ci_hi is None else float(ci_hi),
        "p_value": None if p_value is None else float(p_value),
        "units": units,
    }


def _era_defaults(config: AnalysisConfig, dataset: Dataset):
    era = config.era_scenarios
    if era is None:
        return None
    covariate = era.covariate
    if covariate is None:
        forced = [ts.name for ts, role in dataset.covariates
                  if role == CovariateRole.FORCED]
        if not forced:
            raise ConfigError(
                "scenarios.covariate not given and no forced covariate to default to"
            )
        covariate = forced[0]
    return covariate, era.pi_window, era.pd_year


def run_analysis(config: AnalysisConfig, sections: set[str] | None = None) -> dict:
    """Execute the configured analysis and build the report document.

    ``sections`` restricts the work (``{"fit"}``, ``{"attribute"}``, ...);
    None runs everything requested by the config.
    """
    tests = config.tests
    want = lambda s: sections is None or s in sections

    dataset = build_dataset(config)
    level = config.inference.level
    report: dict = {
        "package": {"name": "climattr", "version": __version__},
        "config": {
            "error_family": config.error_family,
            "include_intercept": config.include_intercept,
            "inference": {
                "method": config.inference.method,
                "replicates": config.inference.replicates,
                "seed": config.inference.seed,
                "level": level,
            },
        },
        "data": {
            "span": list(dataset.span),
            "n": int(len(dataset.response)),
            "rows_dropped_at_alignment": dataset.n_dropped,
            "response": dataset.response.name,
            "covariates": [
                {"name": ts.name, "role": role.value, "unit": ts.unit}
                for ts, role in dataset.covariates
            ],
        },
        "provenance": {
            "config_hash": config.config_hash(),
            "data_hashes": data_file_hashes(config),
            "seed": config.inference.seed,
        },
    }

    if config.error_family == "gev":
        fit = gev_fit(dataset)
        report["diagnostics"] = {
            "log_likelihood": fit.log_likelihood,
            "scale": fit.scale,
            "shape": fit.shape,
            "n": fit.n,
        }
        report["quantities"] = [
            _quantity(f"location_{name}", coef, None, None, None,
                      f"{dataset.response.unit} per unit {name}")
            for name, coef in fit.named_coefficients().items()
        ]
        _run_risk_ratio(report, config, dataset, tests, want)
        return report

    model = CounterfactualRegression(
        include_intercept=config.include_intercept,
        error_family="gaussian",
    ).fit(dataset)
    fit = model.fit_result
    report["diagnostics"] = {
        "r_squared": fit.r_squared,
        "residual_sd": fit.residual_sd,
        "dof": fit.dof,
        "n": fit.n,
    }

    quantities = []
    unit = dataset.response.unit
    for ts_, _role in dataset.covariates:
        name = ts_.name
        from .linear import coef_ci

        lo, hi = coef_ci(fit, name, level)
        quantities.append(
            _quantity(
                f"beta_{name}", fit.coef(name), lo, hi,
                t_test_zero(fit, name).p_value,
                f"{unit} per {ts_.unit}",
            )
        )

    era = _era_defaults(config, dataset)
    scenario_pairs = {}
    if era is not None and (want("attribute") or want("report")):
        covariate, window, year = era
        pi, pd = make_era_scenarios(dataset, covariate, window, year)
        scenario_pairs["era"] = (pi, pd, covariate, window, year)

    if tests.get("deltas", True) and scenario_pairs and (want("attribute") or want("report")):
        pi, pd, covariate, window, year = scenario_pairs["era"]
        if config.inference.method == "bootstrap":
            change = model.bootstrap_delta(
                pi, pd,
                replicates=config.inference.replicates,
                seed=config.inference.seed,
                level=level,
            )
        else:
            change = model.delta(pi, pd, level)
        quantities.append(
            _quantity(f"delta_{covariate}", change.delta, change.ci[0],
                      change.ci[1], change.p_value, unit)
        )
        report["scenarios"] = {
            pi.name: {k: float(v) for k, v in pi.assignment.items()},
            pd.name: {k: float(v) for k, v in pd.assignment.items()},
        }

        if tests.get("factor_deltas", False):
            factors = model.factor_deltas(
                covariate, baseline_window=window, target_year=year, level=level
            )
            for fname, change in factors.items():
                quantities.append(
                    _quantity(f"delta_{fname}", change.delta, change.ci[0],
                              change.ci[1], change.p_value, unit)
                )

    quantities.append(
        _quantity("internal_variability", fit.residual_sd, None, None, None, unit)
    )
    report["quantities"] = quantities

    for key, assignment in config.named_scenarios.items():
        scenario = Scenario(name=key, assignment=assignment)
        report.setdefault("named_scenario_means", {})[key] = model.scenario_mean(scenario)

    if want("granger") or (sections is None and tests.get("granger")):
        report["granger"] = [
            _run_granger(dataset, entry, i)
            for i, entry in enumerate(tests.get("granger", []) or [])
        ]
    if want("fingerprint") or (sections is None and tests.get("fingerprint")):
        report["fingerprint"] = [
            _run_fingerprint(config, dataset, entry, i, level)
            for i, entry in enumerate(tests.get("fingerprint", []) or [])
        ]
    _run_risk_ratio(report, config, dataset, tests, want)
    return report


def _run_granger(dataset, entry, index):
    if not isinstance(entry, dict):
        raise ConfigError(f"tests.granger[{index}] must be a mapping")
    spec = VarSpec(
        order=int(entry.get("order", 1)),
        target=str(entry.get("target", dataset.response.name)),
        candidate_cause=tuple(entry.get("candidate_cause", ())),
        conditioning=tuple(entry.get("conditioning", ())),
        include_intercept=bool(entry.get("include_intercept", True)),
    )
    alpha = float(entry.get("alpha", 0.05))
    result = gc_test(dataset, spec, alpha=alpha)
    return {
        "target": result.target,
        "candidate_cause": list(result.candidate_cause),
        "conditioning": list(result.conditioning),
        "order": result.order,
        "f_statistic": result.f_statistic,
        "p_value": result.p_value,
        "alpha": result.alpha,
        "rejected": result.rejected,
        "gaussian_te_nats": result.gaussian_te,
        "rss_unrestricted": result.rss_unrestricted,
        "rss_restricted": result.rss_restricted,
        "dof": list(result.dof),
    }


def _run_fingerprint(config, dataset, entry, index, level):
    if not isinstance(entry, dict):
        raise ConfigError(f"tests.fingerprint[{index}] must be a mapping")
    fingerprints = []
    for fp in entry.get("fingerprints", []):
        path = config.base_dir / str(fp["path"])
        if not path.exists():
            raise ConfigError(f"tests.fingerprint[{index}]: file not found: {path}")
        series = load_csv(path, name=fp.get("name"))
        aligned = series.restrict(dataset.times)
        fingerprints.append((aligned.name, aligned.values))
    fset = FingerprintSet(
        tuple(fingerprints),
        dataset.response.values,
        max_fingerprints=int(entry.get("max_fingerprints", 2)),
    )
    result = of_fit(fset, level=float(entry.get("level", level)))
    return {
        "observation": dataset.response.name,
        "level": result.level,
        "factors": [
            {
                "name": f.name,
                "estimate": f.estimate,
                "ci_lo": f.ci[0],
                "ci_hi": f.ci[1],
                "detected": f.detected,
                "attributed": f.attributed,
            }
            for f in result.factors
        ],
    }


def _run_risk_ratio(report, config, dataset, tests, want):
    entries = tests.get("risk_ratio", []) or []
    if not entries or not (want("attribute") or want("report")):
        return
    if config.error_family != "gev":
        raise ConfigError("tests.risk_ratio requires error_family: gev")
    era = _era_defaults(config, dataset)
    results = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict) or "threshold" not in entry:
            raise ConfigError(f"tests.risk_ratio[{i}] needs a threshold")
        if era is None:
            raise ConfigError("risk_ratio tests need the era scenario shorthand")
        covariate, window, year = era
        pi, pd = make_era_scenarios(dataset, covariate, window, year)
        rr = test_rr_one(
            dataset, factual=pd, counterfactual=pi,
            threshold=float(entry["threshold"]),
            replicates=max(int(config.inference.replicates), 500),
            seed=config.inference.seed,
            level=config.inference.level,
        )
        results.append(
            {
                "threshold": float(entry["threshold"]),
                "risk_ratio": rr.value,
                "p_factual": rr.p_factual,
                "p_counterfactual": rr.p_counterfactual,
                "ci_lo": rr.ci[0],
                "ci_hi": rr.ci[1],
                "p_value_rr1": rr.p_value_rr1,
                "replicates_used": rr.replicates_used,
                "replicates_failed": rr.replicates_failed,
            }
        )
    report["risk_ratio"] = results


# -- output writing -------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_report(report: dict, out_dir) -> Path:
    """Write the JSON document plus a flat quantities CSV; returns the JSON path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if "quantities" in report:
        with open(out_dir / "quantities.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["name", "best_estimate", "ci_lo", "ci_hi", "p_value", "units"])
            for q in report["quantities"]:
                writer.writerow([
                    q["name"], _fmt(q["best_estimate"]), _fmt(q["ci_lo"]),
                    _fmt(q["ci_hi"]), _fmt(q["p_value"]), q["units"],
                ])
    return json_path


def emit_plot_data(config: AnalysisConfig, out_dir) -> list[Path]:
    """Write per-panel CSVs (response, each covariate) and fitted-vs-observed."""
    dataset = build_dataset(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    panel = out_dir / f"panel_{dataset.response.name}.csv"
    write_csv(dataset.response, panel)
    written.append(panel)
    for ts_, _role in dataset.covariates:
        panel = out_dir / f"panel_{ts_.name}.csv"
        write_csv(ts_, panel)
        written.append(panel)

    if config.error_family == "gaussian":
        model = CounterfactualRegression(
            include_intercept=config.include_intercept
        ).fit(dataset)
        fit = model.fit_result
        path = out_dir / "fitted_vs_observed.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["year", "observed", "fitted", "residual"])
            for year, obs, fitted, resid in zip(
                dataset.times, dataset.response.values, fit.fitted, fit.residuals
            ):
                writer.writerow([int(year), _fmt(float(obs)), _fmt(float(fitted)),
                                 _fmt(float(resid))])
        written.append(path)
    return written
