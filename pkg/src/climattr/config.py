"""Declarative analysis configuration.

One YAML document drives every subcommand. Paths are resolved relative to the
config file. See ``data/gmst_analysis.yaml`` for a complete worked example.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from . import series as ts
from .exceptions import ConfigError
from .io import load_csv
from .series import CovariateRole, Dataset, TimeSeries, align


@dataclass(frozen=True)
class SeriesSpec:
    name: str
    path: Path
    unit: str = "unknown"
    role: CovariateRole | None = None
    transforms: tuple[dict, ...] = ()


@dataclass(frozen=True)
class EraScenarioSpec:
    covariate: str | None = None  # default: first forced covariate
    pi_window: tuple[int, int] = (1900, 1929)
    pd_year: int = 2015


@dataclass(frozen=True)
class InferenceSpec:
    method: str = "analytic"
    replicates: int = 2000
    seed: int = 0
    level: float = 0.95


@dataclass(frozen=True)
class AnalysisConfig:
    response: SeriesSpec
    covariates: tuple[SeriesSpec, ...]
    auxiliary: tuple[SeriesSpec, ...]
    error_family: str
    include_intercept: bool
    era_scenarios: EraScenarioSpec | None
    named_scenarios: dict[str, dict[str, float]]
    tests: dict[str, Any]
    inference: InferenceSpec
    simulate: dict[str, Any] | None
    base_dir: Path
    raw: dict

    def config_hash(self) -> str:
        canonical = json.dumps(self.raw, sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode()).hexdigest()


def _require(mapping, key, context):
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r} in {context}")
    return mapping[key]


def _series_spec(entry, base_dir: Path, context: str, want_role: bool) -> SeriesSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"{context} must be a mapping, got {type(entry).__name__}")
    path = base_dir / str(_require(entry, "path", context))
    if not path.exists():
        raise ConfigError(f"{context}: file not found: {path}")
    role = None
    if want_role:
        role_text = str(_require(entry, "role", context)).lower()
        try:
            role = CovariateRole(role_text)
        except ValueError:
            raise ConfigError(
                f"{context}: role must be 'forced' or 'driver', got {role_text!r}"
            ) from None
    transforms = entry.get("transforms", [])
    if not isinstance(transforms, list):
        raise ConfigError(f"{context}: transforms must be a list")
    return SeriesSpec(
        name=str(entry.get("name", Path(path).stem)),
        path=path,
        unit=str(entry.get("unit", "unknown")),
        role=role,
        transforms=tuple(transforms),
    )


def load_config(path) -> AnalysisConfig:
    """Parse and validate a YAML analysis configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base_dir = path.parent

    response = _series_spec(_require(raw, "response", str(path)), base_dir,
                            "response", want_role=False)
    covariates = tuple(
        _series_spec(entry, base_dir, f"covariates[{i}]", want_role=True)
        for i, entry in enumerate(raw.get("covariates", []))
    )
    names = [response.name] + [c.name for c in covariates]
    if len(set(names)) != len(names):
        raise ConfigError(f"duplicate series names in config: {names}")
    auxiliary = tuple(
        _series_spec(entry, base_dir, f"auxiliary[{i}]", want_role=False)
        for i, entry in enumerate(raw.get("auxiliary", []))
    )

    error_family = str(raw.get("error_family", "gaussian")).lower()
    if error_family not in ("gaussian", "gev"):
        raise ConfigError(f"error_family must be 'gaussian' or 'gev', got {error_family!r}")

    era = None
    named: dict[str, dict[str, float]] = {}
    scenarios = raw.get("scenarios", {}) or {}
    if "pi_window" in scenarios or "pd_year" in scenarios or "covariate" in scenarios:
        window = scenarios.get("pi_window", [1900, 1929])
        if len(window) != 2:
            raise ConfigError("scenarios.pi_window must be [start, end]")
        era = EraScenarioSpec(
            covariate=scenarios.get("covariate"),
            pi_window=(int(window[0]), int(window[1])),
            pd_year=int(scenarios.get("pd_year", 2015)),
        )
    for key, assignment in (scenarios.get("named", {}) or {}).items():
        if not isinstance(assignment, dict):
            raise ConfigError(f"scenarios.named.{key} must map covariates to values")
        named[str(key)] = {str(k): float(v) for k, v in assignment.items()}

    inf = raw.get("inference", {}) or {}
    inference = InferenceSpec(
        method=str(inf.get("method", "analytic")).lower(),
        replicates=int(inf.get("replicates", 2000)),
        seed=int(inf.get("seed", 0)),
        level=float(inf.get("level", 0.95)),
    )
    if inference.method not in ("analytic", "bootstrap"):
        raise ConfigError(
            f"inference.method must be 'analytic' or 'bootstrap', got {inference.method!r}"
        )
    if not (0.0 < inference.level < 1.0):
        raise ConfigError(f"inference.level must be in (0, 1), got {inference.level}")

    return AnalysisConfig(
        response=response,
        covariates=covariates,
        auxiliary=auxiliary,
        error_family=error_family,
        include_intercept=bool(raw.get("include_intercept", True)),
        era_scenarios=era,
        named_scenarios=named,
        tests=raw.get("tests", {}) or {},
        inference=inference,
        simulate=raw.get("simulate"),
        base_dir=base_dir,
        raw=raw,
    )


def with_overrides(config: AnalysisConfig, seed: int | None = None,
                   level: float | None = None) -> AnalysisConfig:
    """Apply command-line overrides to the inference block."""
    inference = config.inference
    if seed is not None:
        inference = replace(inference, seed=int(seed))
    if level is not None:
        if not (0.0 < level < 1.0):
            raise ConfigError(f"level must be in (0, 1), got {level}")
        inference = replace(inference, level=float(level))
    return replace(config, inference=inference)


def _apply_transforms(series: TimeSeries, spec: SeriesSpec) -> TimeSeries:
    current = series
    for i, transform in enumerate(spec.transforms):
        if not isinstance(transform, dict) or len(transform) != 1:
            raise ConfigError(
                f"{spec.name}: transforms[{i}] must be a single-key mapping"
            )
        (kind, arg), = transform.items()
        if kind == "anomalies":
            if not isinstance(arg, (list, tuple)) or len(arg) != 2:
                raise ConfigError(f"{spec.name}: anomalies takes [start, end]")
            current = ts.anomalies(current, int(arg[0]), int(arg[1]))
        elif kind == "baseline_shift":
            current = ts.baseline_shift(current, int(arg))
        elif kind == "sum_with":
            other_path = spec.path.parent / str(arg)
            if not other_path.exists():
                raise ConfigError(f"{spec.name}: sum_with file not found: {other_path}")
            other = load_csv(other_path, unit=current.unit)
            current = ts.sum_series(current, other, name=current.name)
        else:
            raise ConfigError(f"{spec.name}: unknown transform {kind!r}")
    return current


def load_series(spec: SeriesSpec) -> TimeSeries:
    series = load_csv(spec.path, name=spec.name, unit=spec.unit)
    return _apply_transforms(series, spec)


def build_dataset(config: AnalysisConfig) -> Dataset:
    """Ingest, transform, and align every configured series."""
    response = load_series(config.response)
    baseline = config.raw.get("response", {}).get("anomaly_baseline")
    if baseline is not None:
        if len(baseline) != 2:
            raise ConfigError("response.anomaly_baseline must be [start, end]")
        response = ts.anomalies(response, int(baseline[0]), int(baseline[1]))
    covariates = [load_series(spec) for spec in config.covariates]
    dataset = align([response] + covariates,
                    roles=[spec.role for spec in config.covariates])
    aux = tuple(load_series(spec) for spec in config.auxiliary)
    if aux:
        dataset = replace(dataset, auxiliary=aux)
    return dataset


def data_file_hashes(config: AnalysisConfig) -> dict[str, str]:
    """SHA-256 of every referenced data file, keyed by path relative to the config."""
    hashes = {}
    specs = [config.response, *config.covariates, *config.auxiliary]
    paths = {spec.path for spec in specs}
    for spec in specs:
        for transform in spec.transforms:
            if isinstance(transform, dict) and "sum_with" in transform:
                paths.add(spec.path.parent / str(transform["sum_with"]))
    for p in sorted(paths):
        try:
            rel = str(p.relative_to(config.base_dir))
        except ValueError:
            rel = str(p)
        hashes[rel] = hashlib.sha256(Path(p).read_bytes()).hexdigest()
    return hashes
