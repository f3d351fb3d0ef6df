"""Synthetic data from lagged linear causal graphs, plus size/power experiments.

Graphs are collections of directed edges with integer lags >= 1 and real
coefficients; each node adds independent Gaussian innovations. Generation is
a linear stochastic recursion, so specs must be stationary (companion-matrix
spectral radius below one) and are rejected at construction otherwise. The
preset graphs cover the textbook confounding structures used to validate the
causality tests: a mediator alongside a direct edge, a persistent confounder,
and a confounder plus an independent driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .exceptions import DataError, NonStationaryError, TooFewReplicatesError
from .granger import VarSpec, gc_test
from .series import CovariateRole, Dataset, TimeSeries


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    lag: int
    coef: float

    def __post_init__(self):
        if self.lag < 1:
            raise DataError(
                f"edge {self.source}->{self.target}: lag must be >= 1 "
                "(no instantaneous edges)"
            )
        if not math.isfinite(self.coef):
            raise DataError(f"edge {self.source}->{self.target}: non-finite coefficient")


@dataclass(frozen=True)
class CausalGraphSpec:
    """A lagged linear stochastic system with Gaussian innovations."""

    edges: tuple[Edge, ...]
    noise_sd: Mapping[str, float]
    length: int
    seed: int
    burn_in_factor: int = 10

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if self.length < 1:
            raise DataError("series length must be positive")
        for node, sd in self.noise_sd.items():
            if not sd > 0:
                raise DataError(f"noise sd for {node!r} must be > 0, got {sd}")
        for e in self.edges:
            for node in (e.source, e.target):
                if node not in self.noise_sd:
                    raise DataError(f"edge endpoint {node!r} missing from noise_sd")
        radius = self.spectral_radius()
        if radius >= 1.0:
            raise NonStationaryError(
                f"companion-matrix spectral radius {radius:.4f} >= 1; "
                "the spec defines a non-stationary process"
            )

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(sorted(self.noise_sd))

    @property
    def max_lag(self) -> int:
        return max((e.lag for e in self.edges), default=1)

    def spectral_radius(self) -> float:
        nodes = self.nodes
        idx = {n: i for i, n in enumerate(nodes)}
        n, L = len(nodes), self.max_lag
        companion = np.zeros((n * L, n * L))
        for e in self.edges:
            companion[idx[e.target], (e.lag - 1) * n + idx[e.source]] += e.coef
        if L > 1:
            companion[n:, :-n] = np.eye(n * (L - 1))
        return float(np.max(np.abs(np.linalg.eigvals(companion))))


@dataclass(frozen=True)
class ExperimentReport:
    """Rejection-rate summary of a repeated simulate-and-test experiment."""

    replicates: int
    rejection_rate: float
    mean_f: float
    alpha: float
    scenario: str
    mc_standard_error: float


def simulate(spec: CausalGraphSpec, response: str = "Y") -> Dataset:
    """Generate one dataset from the graph; deterministic given the seed.

    A burn-in of ``burn_in_factor * max_lag`` steps is discarded so the
    retained samples are draws from the stationary distribution.
    """
    nodes = spec.nodes
    if response not in nodes:
        raise DataError(f"response node {response!r} not present in the graph")
    idx = {n: i for i, n in enumerate(nodes)}
    L = spec.max_lag
    burn = spec.burn_in_factor * L
    total = burn + spec.length

    rng = np.random.default_rng(spec.seed)
    sds = np.array([spec.noise_sd[n] for n in nodes])
    values = rng.standard_normal((len(nodes), total)) * sds[:, None]
    for t in range(L, total):
        for e in spec.edges:
            values[idx[e.target], t] += e.coef * values[idx[e.source], t - e.lag]

    years = np.arange(1, spec.length + 1)
    kept = values[:, burn:]
    series = {
        name: TimeSeries(name, "dimensionless", years, kept[idx[name]])
        for name in nodes
    }
    covariates = tuple(
        (series[name], CovariateRole.DRIVER) for name in nodes if name != response
    )
    return Dataset(response=series[response], covariates=covariates)


def run_size_power(
    spec: CausalGraphSpec,
    var_spec: VarSpec,
    alpha: float = 0.05,
    replicates: int = 1000,
    master_seed: int = 0,
    scenario: str = "",
) -> ExperimentReport:
    """Rejection rate of the Granger test over seeded replicates of the graph.

    Per-replicate seeds derive deterministically from (master seed, replicate
    index), so the report does not depend on execution order.
    """
    if replicates < 100:
        raise TooFewReplicatesError(
            f"size/power experiments need >= 100 replicates, got {replicates}"
        )
    child_seeds = np.random.SeedSequence(master_seed).generate_state(
        replicates, dtype=np.uint64
    )
    rejections = 0
    f_sum = 0.0
    for i in range(replicates):
        data = simulate(replace(spec, seed=int(child_seeds[i])),
                        response=var_spec.target)
        result = gc_test(data, var_spec, alpha=alpha)
        rejections += int(result.rejected)
        f_sum += result.f_statistic
    rate = rejections / replicates
    return ExperimentReport(
        replicates=replicates,
        rejection_rate=rate,
        mean_f=f_sum / replicates,
        alpha=alpha,
        scenario=scenario,
        mc_standard_error=math.sqrt(rate * (1.0 - rate) / replicates),
    )


# -- preset graphs ---------------------------------------------------------------
# Numeric choices below are illustrative defaults; the structures are what matter.

def mediator_graph(
    direct: float = 0.5,
    to_mediator: float = 0.7,
    from_mediator: float = 0.5,
    length: int = 500,
    seed: int = 0,
) -> CausalGraphSpec:
    """X -> Z -> Y with an optional direct X -> Y edge (set ``direct=0`` to
    remove it); Z also acts as an independent driver of Y."""
    edges = [
        Edge("X", "Z", 1, to_mediator),
        Edge("Z", "Y", 1, from_mediator),
    ]
    if direct != 0.0:
        edges.append(Edge("X", "Y", 1, direct))
    return CausalGraphSpec(
        edges=tuple(edges),
        noise_sd={"X": 1.0, "Y": 1.0, "Z": 1.0},
        length=length,
        seed=seed,
    )


def confounder_graph(
    strength: float = 0.7,
    persistence: float = 0.8,
    length: int = 500,
    seed: int = 0,
) -> CausalGraphSpec:
    """Z drives both X and Y with no X -> Y edge.

    Z is given lag-1 persistence: without autocorrelation in the common
    cause, lagged X carries no information about Y and the confounding
    bias the graph is meant to exhibit would vanish.
    """
    return CausalGraphSpec(
        edges=(
            Edge("Z", "Z", 1, persistence),
            Edge("Z", "X", 1, strength),
            Edge("Z", "Y", 1, strength),
        ),
        noise_sd={"X": 1.0, "Y": 1.0, "Z": 1.0},
        length=length,
        seed=seed,
    )


def confounder_plus_independent_graph(
    strength: float = 0.7,
    persistence: float = 0.8,
    independent: float = 0.5,
    length: int = 500,
    seed: int = 0,
) -> CausalGraphSpec:
    """Confounder Z plus an independent driver W of the response."""
    return CausalGraphSpec(
        edges=(
            Edge("Z", "Z", 1, persistence),
            Edge("Z", "X", 1, strength),
            Edge("Z", "Y", 1, strength),
            Edge("W", "Y", 1, independent),
        ),
        noise_sd={"X": 1.0, "Y": 1.0, "Z": 1.0, "W": 1.0},
        length=length,
        seed=seed,
    )


def null_graph(length: int = 500, seed: int = 0,
               target_persistence: float = 0.5) -> CausalGraphSpec:
    """Autoregressive Y and independent noise X with no cross edges."""
    return CausalGraphSpec(
        edges=(Edge("Y", "Y", 1, target_persistence),),
        noise_sd={"X": 1.0, "Y": 1.0},
        length=length,
        seed=seed,
    )


def direct_edge_graph(coef: float = 0.8, length: int = 500,
                      seed: int = 0) -> CausalGraphSpec:
    """Y depends on its own lag and on lagged X."""
    return CausalGraphSpec(
        edges=(
            Edge("Y", "Y", 1, 0.5),
            Edge("X", "Y", 1, coef),
        ),
        noise_sd={"X": 1.0, "Y": 1.0},
        length=length,
        seed=seed,
    )
